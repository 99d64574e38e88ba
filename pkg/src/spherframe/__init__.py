"""Polynomial frames on the sphere: cubature, analysis/synthesis, Besov norms and greedy approximation."""
from .besov import BesovParams, approx_besov_norm, coef_besov_norm, diag_besov_norm, sigma_besov_norm
from .frame import (CoefficientTree, FrameSystem, TruncationWarning, analyze, atom_eval, build_frame,
                    localization_profile, synthesize, synthesize_function)
from .gegenbauer import KernelSeries, dim_harmonics, eval_kernel_series, eval_Pk, reproducing_kernel
from .greedy import bernstein_check, greedy_approx, greedy_select, jackson_experiment, tau_for
from .harmonic import (BandlimitedFunction, lp_norm, random_polynomial, reproduce, sample, sigma_j, zonal)
from .quadrature import (Cap, CubatureRule, InfeasibleCubature, build_product_rule, build_scattered_rule,
                         discrete_norm, mz_ratio)
from .window import DEFAULT_WINDOW, Window, check_partition
from ._rng import make_rng

__version__ = "0.1.0"

__all__ = [
    "BesovParams", "approx_besov_norm", "coef_besov_norm", "diag_besov_norm", "sigma_besov_norm",
    "CoefficientTree", "FrameSystem", "TruncationWarning", "analyze", "atom_eval", "build_frame",
    "localization_profile", "synthesize", "synthesize_function",
    "KernelSeries", "dim_harmonics", "eval_kernel_series", "eval_Pk", "reproducing_kernel",
    "bernstein_check", "greedy_approx", "greedy_select", "jackson_experiment", "tau_for",
    "BandlimitedFunction", "lp_norm", "random_polynomial", "reproduce", "sample", "sigma_j", "zonal",
    "Cap", "CubatureRule", "InfeasibleCubature", "build_product_rule", "build_scattered_rule", "discrete_norm",
    "mz_ratio", "DEFAULT_WINDOW", "Window", "check_partition", "make_rng",
]
