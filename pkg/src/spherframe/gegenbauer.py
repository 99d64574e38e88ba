"""Normalized ultraspherical reproducing kernels on S^{d-1}.

``P_k(t) = (2k+d-2)/(d-2) * C_k^{(d-2)/2}(t)`` is the reproducing kernel of the
degree-k harmonics with respect to the normalized surface measure, so that
``P_k(1) = dim H_k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

LMAX = 4096
_T_TOL = 1e-12


def _check(d, t):
    if d < 3:
        raise ValueError(f"dimension must be >= 3, got {d}")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + _T_TOL):
        raise ValueError("argument outside [-1, 1]")
    return np.clip(t, -1.0, 1.0)


def dim_harmonics(d: int, k: int) -> int:
    """Dimension of the space of degree-k spherical harmonics on S^{d-1}."""
    if k < 0:
        return 0
    if k == 0:
        return 1
    return comb(k + d - 1, d - 1) - comb(k + d - 3, d - 1)


def dim_polynomials(d: int, n: int) -> int:
    """Dimension of Pi_n, the spherical polynomials of degree <= n."""
    return comb(n + d - 1, d - 1) + comb(n + d - 2, d - 1)


def _ratio_table(d, kmax, t):
    # r_k = C_k(t) / C_k(1) stays in [-1, 1], so the recurrence cannot overflow
    lam = (d - 2) / 2
    r = np.empty((kmax + 1,) + t.shape)
    r[0] = 1.0
    if kmax >= 1:
        r[1] = t
    for k in range(2, kmax + 1):
        r[k] = (2 * (k + lam - 1) * t * r[k - 1] - (k - 1) * r[k - 2]) / (k + 2 * lam - 1)
    return r


def eval_Pk(d: int, k: int, t):
    """Evaluate P_k(t) by the forward normalized three-term recurrence."""
    t = _check(d, t)
    if not 0 <= k <= LMAX:
        raise ValueError(f"degree must lie in [0, {LMAX}], got {k}")
    return float(dim_harmonics(d, k)) * _ratio_table(d, k, t)[k]


def eval_Pk_deriv(d: int, k: int, t, i: int = 1):
    """i-th derivative of P_k at t, for i in {0, 1}.

    Uses d/dt C_k^lam = 2 lam C_{k-1}^{lam+1}.
    """
    if i == 0:
        return eval_Pk(d, k, t)
    if i != 1:
        raise NotImplementedError("only derivative orders 0 and 1 are supported")
    t = _check(d, t)
    if k == 0:
        return np.zeros_like(t)[()]
    lam = (d - 2) / 2
    # C_{k-1}^{lam+1} is the Gegenbauer polynomial of the sphere in dimension d + 2
    c_up = _ratio_table(d + 2, k - 1, t)[k - 1] * _gegenbauer_at_one(d + 2, k - 1)
    return (2 * k + d - 2) / (d - 2) * 2 * lam * c_up


def _gegenbauer_at_one(d, k):
    # C_k^{(d-2)/2}(1) = binom(k + d - 3, k)
    return float(comb(k + d - 3, k))


@dataclass(frozen=True)
class KernelSeries:
    """A zonal kernel ``sum_k coeffs[k] * P_k(t)``."""

    dim: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if self.dim < 3:
            raise ValueError(f"dimension must be >= 3, got {self.dim}")
        if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
            raise ValueError("coeffs must be a non-empty finite 1-D array")
        if c.size - 1 > LMAX:
            raise ValueError(f"degree exceeds {LMAX}")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, t):
        return eval_kernel_series(self, t)


def eval_kernel_series(s: KernelSeries, t):
    """Clenshaw summation of ``sum_k c_k P_k(t)`` on the Gegenbauer family.

    The series is rewritten as ``sum_k a_k r_k(t)`` with ``r_k = C_k/C_k(1)``
    and ``a_k = c_k dim H_k``; r_k obeys
    ``r_{k+1} = alpha_k t r_k + beta_k r_{k-1}``.
    """
    d = s.dim
    t = _check(d, t)
    lam = (d - 2) / 2
    L = s.degree
    a = s.coeffs * np.array([float(dim_harmonics(d, k)) for k in range(L + 1)])
    if L == 0:
        return a[0] * np.ones_like(t)[()]

    def alpha(k):  # coefficient of t r_k in r_{k+1}
        return 2 * (k + lam) / (k + 2 * lam)

    def beta(k):  # coefficient of r_{k-1} in r_{k+1}
        return -k / (k + 2 * lam)

    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for k in range(L, 0, -1):
        b1, b2 = a[k] + alpha(k) * t * b1 + beta(k + 1) * b2, b1
    # r_0 = 1, r_1 = t
    return (a[0] + t * b1 + beta(1) * b2)[()]


def reproducing_kernel(d: int, L: int) -> KernelSeries:
    """K_L = sum_{k<=L} P_k, the reproducing kernel of Pi_L."""
    return KernelSeries(d, np.ones(L + 1))
