"""Positive cubature on the sphere, cap geometry and discrete MZ norms."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import nnls
from scipy.special import betainc, roots_legendre

from .gegenbauer import dim_harmonics, dim_polynomials
from ._rng import make_rng

log = logging.getLogger(__name__)

MOMENT_TOL = 1e-9


class InfeasibleCubature(ValueError):
    """The moment system has no nonnegative solution within tolerance."""

    def __init__(self, residual, msg=None):
        self.residual = residual
        super().__init__(msg or f"no nonnegative cubature found (residual {residual:.3e})")


@dataclass(frozen=True)
class ProductGrid:
    """Latitude/longitude layout of a product rule (d = 3 only)."""

    z: np.ndarray  # Gauss-Legendre nodes in cos(theta)
    lat_weights: np.ndarray  # Gauss-Legendre weights, sum 2
    n_lon: int

    @property
    def shape(self):
        return (len(self.z), self.n_lon)


@dataclass(frozen=True)
class CubatureRule:
    dim: int
    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    kind: str = "product"
    grid: Optional[ProductGrid] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        w = np.asarray(self.weights, dtype=float)
        if nodes.shape != (len(w), self.dim):
            raise ValueError("nodes must have shape (len(weights), dim)")
        if np.any(w < 0):
            raise ValueError("cubature weights must be nonnegative")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.weights)

    def integrate(self, values):
        values = np.asarray(values, dtype=float)
        return np.tensordot(self.weights, values, axes=(0, 0))

    def weight_constant(self) -> float:
        """Empirical max of N^{d-1} a_k (the bound constant of the rule)."""
        N = max(self.degree, 1)
        return float(N ** (self.dim - 1) * self.weights.max())


def lonlat_nodes(z, n_lon):
    s = np.sqrt(np.clip(1 - z * z, 0, None))
    lon = 2 * np.pi * np.arange(n_lon) / n_lon
    return np.stack(
        [np.outer(s, np.cos(lon)), np.outer(s, np.sin(lon)), np.repeat(z[:, None], n_lon, axis=1)],
        axis=-1,
    ).reshape(-1, 3)


def build_product_rule(d: int, N: int) -> CubatureRule:
    """Gauss-Legendre (polar) x equiangular (azimuth) rule exact on Pi_N."""
    if d != 3:
        raise NotImplementedError(f"product rules are only available for d = 3 (got d = {d})")
    if N < 0:
        raise ValueError("degree must be nonnegative")
    n_lat = N // 2 + 1
    n_lon = N + 1
    z, u = roots_legendre(n_lat)
    nodes = lonlat_nodes(z, n_lon)
    w = np.repeat(u / (2 * n_lon), n_lon)
    w = w / w.sum()
    grid = ProductGrid(z=z, lat_weights=u, n_lon=n_lon)
    return CubatureRule(dim=3, degree=N, nodes=nodes, weights=w, kind="product", grid=grid)


def fibonacci_points(n: int) -> np.ndarray:
    """Golden-angle spiral with ``n`` nearly equal-area points on S^2."""
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    lon = np.pi * (1 + 5 ** 0.5) * i
    s = np.sqrt(1 - z * z)
    return np.column_stack([s * np.cos(lon), s * np.sin(lon), z])


def _centers(d, m, seed):
    if d == 3:
        # irrational rotation keeps the centers off any symmetry of the data
        X = fibonacci_points(m)
        c, s = np.cos(0.7), np.sin(0.7)
        return X @ np.array([[1, 0, 0], [0, c, -s], [0, s, c]])
    g = make_rng(seed).standard_normal((m, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _zonal_ratios(d, N, G):
    """Yield ``P_k(G) / P_k(1)`` for k = 1..N, two recurrence terms in memory."""
    lam = (d - 2) / 2
    prev, cur = np.ones_like(G), G.copy()
    yield cur
    for k in range(2, N + 1):
        prev, cur = cur, (2 * (k + lam - 1) * G * cur - (k - 1) * prev) / (k + 2 * lam - 1)
        yield cur


def _moment_system(points, d, N, centers):
    """Rows ``P_k(xi_i . eta_m) / P_k(1)``; target 1 for k = 0 and 0 otherwise."""
    G = np.clip(centers @ points.T, -1.0, 1.0)
    rows = [np.ones((1, len(points)))] + list(_zonal_ratios(d, N, G))
    rhs = np.zeros(1 + N * len(centers))
    rhs[0] = 1.0
    return np.vstack(rows), rhs


def moment_residual(rule: CubatureRule, N: Optional[int] = None, seed: int = 1) -> float:
    """Max zonal moment error over degrees 1..N at a fresh set of centers."""
    N = rule.degree if N is None else N
    m = 2 * dim_harmonics(rule.dim, N) + 3
    centers = _centers(rule.dim, m, seed + 17)
    worst = abs(rule.weights.sum() - 1.0)
    step = max(1, 4_000_000 // len(rule))
    for i0 in range(0, m, step):
        G = np.clip(centers[i0:i0 + step] @ rule.nodes.T, -1.0, 1.0)
        for r in _zonal_ratios(rule.dim, N, G):
            worst = max(worst, float(np.max(np.abs(r @ rule.weights))))
    return worst


def _merge_duplicates(points, tol=1e-13):
    keys = np.round(points / tol).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    return points[first], inverse.reshape(-1)


def build_scattered_rule(points, d: int, N: int, seed: int = 0) -> CubatureRule:
    """Nonnegative weights on given sites reproducing all moments of Pi_N.

    Moments are matched against zonal kernel columns at auxiliary centers, and
    the nonnegative system is solved by NNLS. Raises ``InfeasibleCubature``
    when the residual exceeds ``MOMENT_TOL``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != d:
        raise ValueError("points must have shape (n, d)")
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    pts, _ = _merge_duplicates(pts)
    # a positive rule exact on Pi_N cannot vanish on all of |q|^2, q in Pi_{N/2}
    n_needed = dim_polynomials(d, N // 2)
    if len(pts) < n_needed:
        raise InfeasibleCubature(np.inf, f"{len(pts)} sites are fewer than dim Pi_{N // 2} = {n_needed}")
    m = 2 * dim_harmonics(d, N) + 1
    M, b = _moment_system(pts, d, N, _centers(d, m, seed))
    w, _ = nnls(M, b, maxiter=50 * M.shape[1])
    residual = float(np.max(np.abs(M @ w - b)))
    if residual > MOMENT_TOL:
        raise InfeasibleCubature(residual)
    rule = CubatureRule(dim=d, degree=N, nodes=pts, weights=w, kind="scattered")
    recheck = moment_residual(rule, N, seed)
    if recheck > MOMENT_TOL:
        raise InfeasibleCubature(recheck, f"moments fail on independent centers ({recheck:.3e})")
    log.debug("scattered rule: %d sites, %d active, residual %.2e", len(w), np.count_nonzero(w), residual)
    return rule


@dataclass(frozen=True)
class Cap:
    center: np.ndarray
    radius: float
    measure: float

    def contains(self, X) -> np.ndarray:
        X = np.atleast_2d(X)
        return np.arccos(np.clip(X @ self.center, -1.0, 1.0)) <= self.radius


def cap_measure(d: int, r: float) -> float:
    """Normalized surface measure of a geodesic cap of radius r on S^{d-1}."""
    if not 0 < r <= np.pi:
        raise ValueError(f"cap radius must lie in (0, pi], got {r}")
    if d == 3:
        return (1 - np.cos(r)) / 2
    # int_0^r sin^{d-2} / int_0^pi sin^{d-2} via the regularized incomplete beta
    a = (d - 1) / 2
    if r <= np.pi / 2:
        return 0.5 * betainc(a, 0.5, np.sin(r) ** 2)
    return 1 - 0.5 * betainc(a, 0.5, np.sin(r) ** 2)


def make_cap(center, radius, d=None) -> Cap:
    center = np.asarray(center, dtype=float)
    d = len(center) if d is None else d
    return Cap(center=center, radius=float(radius), measure=float(cap_measure(d, radius)))


def discrete_norm(values, rule: CubatureRule, p: float, t: float = 1.0) -> float:
    """Weighted MZ functional (N^{1-d} sum (N^{d-1} a_k)^t |f(xi_k)|^p)^{1/p}.

    ``p = inf`` gives ``max_k (N^{d-1} a_k)^t |f(xi_k)|``; 0^0 is taken as 1.
    """
    v = np.abs(np.asarray(values, dtype=float))
    if v.shape != rule.weights.shape:
        raise ValueError(f"got {v.shape[0] if v.ndim else 0} values for a rule with {len(rule)} nodes")
    scale = float(max(rule.degree, 1)) ** (rule.dim - 1)
    s = (scale * rule.weights) ** t
    if np.isinf(p):
        return float(np.max(s * v))
    return float((np.sum(s * v ** p) / scale) ** (1 / p))


def mz_ratio(f, rule: CubatureRule, p: float, t: float = 1.0, reference_rule: Optional[CubatureRule] = None) -> float:
    """Discrete MZ functional of f on ``rule`` divided by its L^p norm."""
    from .harmonic import lp_norm, default_reference_rule

    if f.degree > rule.degree:
        raise ValueError("rule degree is below the polynomial degree")
    ref = reference_rule or default_reference_rule(f, p)
    vals = f.eval_at(rule.nodes)
    return discrete_norm(vals, rule, p, t) / lp_norm(f, p, ref)
