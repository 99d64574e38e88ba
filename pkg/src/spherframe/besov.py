"""Besov (quasi-)norms from frame coefficients, from band-pass blocks and from
near-best approximation errors, plus their empirical equivalence constants."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _spectral as sp
from .frame import CoefficientTree, FrameSystem, analyze
from .harmonic import BandlimitedFunction, reproduction_multiplier, rule_lp_norm
from .quadrature import CubatureRule, build_product_rule
from .window import DEFAULT_WINDOW, Window

SPREAD_LIMIT = 100.0


@dataclass(frozen=True)
class BesovParams:
    alpha: float
    p: float
    tau: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not (self.p > 0 and self.tau > 0):
            raise ValueError("p and tau must be positive (or inf)")


def _lq(values, q):
    """(sum |v|^q)^(1/q), max for q = inf."""
    v = np.abs(np.asarray(values, dtype=float))
    if v.size == 0:
        return 0.0
    if np.isinf(q):
        return float(v.max())
    return float(np.sum(v ** q) ** (1 / q))


def coef_besov_norm(tree: CoefficientTree, params: BesovParams, F: FrameSystem) -> float:
    """Sequence norm with level weights 2^{-j(d-1)(1/p - 1/2 - alpha/(d-1))}."""
    tree.check(F)
    d1 = F.dim - 1
    inv_p = 0.0 if np.isinf(params.p) else 1.0 / params.p
    expo = inv_p - 0.5 - params.alpha / d1
    terms = [2.0 ** (-j * d1 * expo) * _lq(c, params.p) for j, c in enumerate(tree.levels)]
    return _lq(terms, params.tau)


def diag_besov_norm(tree: CoefficientTree, alpha: float, tau: float, F: FrameSystem) -> float:
    """(sum_B |c_B|^tau |B|^{1 - tau/2 - alpha tau/(d-1)})^{1/tau} with exact cap measures."""
    tree.check(F)
    d1 = F.dim - 1
    vals = []
    for j, c in enumerate(tree.levels):
        B = F.cap_measure(j)
        if np.isinf(tau):
            vals.append(np.abs(c) * B ** (-0.5 - alpha / d1))
        else:
            # |c| |B|^{1/tau - 1/2 - alpha/(d-1)} raised to tau reproduces the sum above
            vals.append(np.abs(c) * B ** (1 / tau - 0.5 - alpha / d1))
    return _lq(np.concatenate(vals), tau)


def _reference_rule(f: BandlimitedFunction, jmax: int, p: float) -> CubatureRule:
    N = max(2 * f.degree, 1 << (jmax + 1))
    if not p == 2:
        N = max(N, 4 * f.degree)
    if f.carrier.grid is not None and f.carrier.degree >= N:
        return f.carrier
    return build_product_rule(f.dim, N)


def _values_on(A, rule: CubatureRule):
    g = rule.grid
    return sp.synth_grid(g.z, g.n_lon, A).reshape(-1)


def _need_p(p):
    if p < 1:
        raise ValueError("Hardy-space norms for p < 1 are not computable here; use p >= 1")


def sigma_norms(f: BandlimitedFunction, p: float, window: Window = DEFAULT_WINDOW, jmax: int = 6,
                reference_rule: Optional[CubatureRule] = None) -> np.ndarray:
    """||sigma_j f||_p for j = 0..jmax."""
    rule = reference_rule or _reference_rule(f, jmax, p)
    out = np.zeros(jmax + 1)
    for j in range(jmax + 1):
        mult = window.multipliers(j, f.degree)
        if mult.any():
            out[j] = rule_lp_norm(_values_on(sp.apply_multiplier(f.coeffs, mult), rule), rule, p)
    return out


def sigma_besov_norm(f: BandlimitedFunction, params: BesovParams, window: Window = DEFAULT_WINDOW,
                     jmax: int = 6, reference_rule: Optional[CubatureRule] = None) -> float:
    """(sum_{j<=jmax} 2^{j alpha tau} ||sigma_j f||_p^tau)^{1/tau} (L^p in place of H^p)."""
    _need_p(params.p)
    s = sigma_norms(f, params.p, window, jmax, reference_rule)
    return _lq(2.0 ** (np.arange(jmax + 1) * params.alpha) * s, params.tau)


def approx_errors(f: BandlimitedFunction, p: float, window: Window = DEFAULT_WINDOW, jmax: int = 6,
                  reference_rule: Optional[CubatureRule] = None) -> np.ndarray:
    """Near-best errors ||f - sum_{i<=j+1} sigma_i sigma_i f||_p for j = 0..jmax."""
    rule = reference_rule or _reference_rule(f, jmax, p)
    out = np.zeros(jmax + 1)
    for j in range(jmax + 1):
        keep = reproduction_multiplier(j + 1, f.degree, window)
        if np.allclose(keep, 1.0, rtol=0, atol=1e-15):
            continue
        out[j] = rule_lp_norm(_values_on(sp.apply_multiplier(f.coeffs, 1.0 - keep), rule), rule, p)
    return out


def approx_besov_norm(f: BandlimitedFunction, params: BesovParams, window: Window = DEFAULT_WINDOW,
                      jmax: int = 6, reference_rule: Optional[CubatureRule] = None) -> float:
    """Dyadic condensation (E_0^tau + sum_j 2^{j alpha tau} E_{2^j}(f)_p^tau)^{1/tau} + |<f, 1>|.

    E_0 is the distance from the constants, ||f - <f, 1>||_p.
    """
    _need_p(params.p)
    rule = reference_rule or _reference_rule(f, jmax, params.p)
    E = approx_errors(f, params.p, window, jmax, rule)
    drop_mean = np.ones(f.degree + 1)
    drop_mean[0] = 0.0
    E0 = rule_lp_norm(_values_on(sp.apply_multiplier(f.coeffs, drop_mean), rule), rule, params.p)
    mean = float(np.real(f.coeffs[0, 0]))
    terms = np.concatenate([[E0], 2.0 ** (np.arange(jmax + 1) * params.alpha) * E])
    return _lq(terms, params.tau) + abs(mean)


def truncation_ratio(terms, tau) -> float:
    """Last term over the total, the reported truncation error of a dyadic sum."""
    terms = np.abs(np.asarray(terms, dtype=float))
    total = _lq(terms, tau)
    return float(terms[-1] / total) if total > 0 else 0.0


def _spread(r):
    r = np.asarray(r, dtype=float)
    return float(r.max() / r.min()) if r.min() > 0 else float("inf")


def equivalence_report(functions: Sequence[BandlimitedFunction], params: BesovParams, F: FrameSystem,
                       ids: Optional[Sequence] = None) -> dict:
    """Coefficient/sigma and coefficient/approximation ratios over an ensemble."""
    _need_p(params.p)
    rows = []
    for i, f in enumerate(functions):
        tree = analyze(F, f)
        coef = coef_besov_norm(tree, params, F)
        diag = diag_besov_norm(tree, params.alpha, params.tau, F) if params.p == params.tau else None
        sig = sigma_besov_norm(f, params, F.window, F.jmax)
        app = approx_besov_norm(f, params, F.window, F.jmax)
        rows.append({"id": ids[i] if ids is not None else i, "coef": coef, "diag": diag,
                     "sigma": sig, "approx": app})
    cs = [r["coef"] / r["sigma"] for r in rows]
    ca = [r["coef"] / r["approx"] for r in rows]
    stats = {
        "coef_over_sigma": {"min": min(cs), "max": max(cs), "spread": _spread(cs)},
        "coef_over_approx": {"min": min(ca), "max": max(ca), "spread": _spread(ca)},
        "limit": SPREAD_LIMIT,
    }
    stats["passed"] = bool(stats["coef_over_sigma"]["spread"] < SPREAD_LIMIT
                           and stats["coef_over_approx"]["spread"] < SPREAD_LIMIT)
    return {"params": _params_json(params), "per_function": rows, "spread_stats": stats}


def _params_json(params: BesovParams):
    return {"alpha": params.alpha, "p": params.p, "tau": params.tau}
