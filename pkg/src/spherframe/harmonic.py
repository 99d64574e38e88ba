"""Band-limited functions on the sphere and their zonal-kernel operators.

A :class:`BandlimitedFunction` is a polynomial f in Pi_L stored by its values on
a positive cubature rule exact to degree 2L. Every operator here is a
kernel integral ``(Tf)(x) = sum_i w_i f(xi_i) K(x . xi_i)`` with a zonal
K = sum_k m_k P_k, which the carrier rule evaluates exactly.

Two evaluation routes exist. The kernel route applies the formula above and
works in any dimension. On d = 3 product carriers the same operators are
applied as degree multipliers on exact harmonic coefficients, which is what
makes frames with millions of nodes tractable. ``method="auto"`` picks the
spectral route whenever the carrier supports it.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import _spectral as sp
from .gegenbauer import KernelSeries, eval_kernel_series, eval_Pk
from .quadrature import CubatureRule, build_product_rule
from .window import DEFAULT_WINDOW, Window

_UNIT_TOL = 1e-12
_KERNEL_CHUNK = 2_000_000  # kernel matrix entries per block
SUP_STARTS = 4  # grid maxima polished for sup norms


def _as_points(X, d):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != d:
        raise ValueError(f"expected points of dimension {d}, got {X.shape[1]}")
    if np.any(np.abs(np.linalg.norm(X, axis=1) - 1) > _UNIT_TOL):
        raise ValueError("evaluation points must be unit vectors")
    return X


def kernel_apply(rule: CubatureRule, values, kernel: KernelSeries, X):
    """``sum_i w_i v_i K(x . xi_i)`` at each row of X (values may be 2-D)."""
    values = np.asarray(values, dtype=float)
    wv = rule.weights.reshape((-1,) + (1,) * (values.ndim - 1)) * values
    step = max(1, _KERNEL_CHUNK // max(len(rule), 1))
    out = np.empty((len(X),) + values.shape[1:])
    for i0 in range(0, len(X), step):
        G = np.clip(X[i0:i0 + step] @ rule.nodes.T, -1.0, 1.0)
        out[i0:i0 + step] = np.tensordot(eval_kernel_series(kernel, G), wv, axes=(1, 0))
    return out


@dataclass(frozen=True, eq=False)
class BandlimitedFunction:
    dim: int
    degree: int
    carrier: CubatureRule
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.shape != (len(self.carrier),):
            raise ValueError("one sample per carrier node is required")
        if self.carrier.degree < 2 * self.degree:
            raise ValueError(f"carrier exactness {self.carrier.degree} < 2 * degree {self.degree}")
        if self.carrier.dim != self.dim:
            raise ValueError("carrier dimension mismatch")
        object.__setattr__(self, "samples", s)

    @property
    def spectral(self) -> bool:
        return self.carrier.grid is not None

    @cached_property
    def coeffs(self) -> np.ndarray:
        """Exact harmonic coefficients (d = 3 product carriers only)."""
        if not self.spectral:
            raise ValueError("harmonic coefficients need a product-grid carrier")
        g = self.carrier.grid
        v = (self.carrier.weights * self.samples).reshape(g.shape)
        return sp.grid_point_masses(g.z, g.n_lon, v, self.degree)

    def eval_at(self, X, method: str = "auto"):
        return eval_at(self, X, method)

    def with_samples(self, samples, degree=None):
        return BandlimitedFunction(self.dim, self.degree if degree is None else degree, self.carrier, samples)

    def _binary(self, other, op):
        if isinstance(other, BandlimitedFunction):
            if other.carrier is not self.carrier:
                raise ValueError("functions live on different carriers")
            return self.with_samples(op(self.samples, other.samples), max(self.degree, other.degree))
        return self.with_samples(op(self.samples, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, c):
        return self.with_samples(self.samples * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def _route(f, method):
    if method == "auto":
        return "spectral" if f.spectral else "kernel"
    if method == "spectral" and not f.spectral:
        raise ValueError("spectral route needs a d = 3 product carrier")
    if method not in ("spectral", "kernel"):
        raise ValueError(f"unknown method {method!r}")
    return method


def from_coeffs(A, degree, carrier: CubatureRule) -> BandlimitedFunction:
    g = carrier.grid
    vals = sp.synth_grid(g.z, g.n_lon, A).reshape(-1)
    return BandlimitedFunction(3, degree, carrier, vals)


def default_carrier(d: int, L: int) -> CubatureRule:
    return build_product_rule(d, 2 * L)


def sample(func, d: int, L: int, carrier: Optional[CubatureRule] = None) -> BandlimitedFunction:
    """Wrap a vectorized callable known to lie in Pi_L."""
    carrier = carrier or default_carrier(d, L)
    return BandlimitedFunction(d, L, carrier, np.asarray(func(carrier.nodes), dtype=float))


def zonal(d: int, m: int, e, carrier: Optional[CubatureRule] = None, L: Optional[int] = None) -> BandlimitedFunction:
    """The degree-m harmonic ``x -> P_m(x . e)``."""
    e = np.asarray(e, dtype=float)
    e = e / np.linalg.norm(e)
    return sample(lambda X: eval_Pk(d, m, np.clip(X @ e, -1, 1)), d, m if L is None else L, carrier)


def random_polynomial(d: int, L: int, rng: np.random.Generator, carrier: Optional[CubatureRule] = None):
    """``f(x) = sum_{m<=L} c_m P_m(x . e_m)`` with random unit e_m and c_m ~ U[-1, 1].

    Returns ``(f, spec)`` where ``spec = (c, E)`` evaluates f independently
    through :func:`eval_random_polynomial`.
    """
    c = rng.uniform(-1.0, 1.0, L + 1)
    E = rng.standard_normal((L + 1, d))
    E /= np.linalg.norm(E, axis=1, keepdims=True)
    spec = (c, E)
    return sample(lambda X: eval_random_polynomial(spec, X), d, L, carrier), spec


def eval_random_polynomial(spec, X):
    c, E = spec
    X = np.atleast_2d(X)
    d = X.shape[1]
    return sum(c[m] * eval_Pk(d, m, np.clip(X @ E[m], -1, 1)) for m in range(len(c)))


def eval_at(f: BandlimitedFunction, X, method: str = "auto"):
    """Evaluate f at unit vectors via its reproducing kernel ``K_L = sum_{k<=L} P_k``."""
    X = _as_points(X, f.dim)
    if _route(f, method) == "spectral":
        return sp.synth_points(f.coeffs, X)
    return kernel_apply(f.carrier, f.samples, KernelSeries(f.dim, np.ones(f.degree + 1)), X)


def apply_multiplier(f: BandlimitedFunction, mult, degree: int, method: str = "auto") -> BandlimitedFunction:
    """The operator ``x -> <f, sum_k mult[k] P_k(x . )>``, resampled on f's carrier."""
    mult = np.asarray(mult, dtype=float)[: f.degree + 1]
    degree = min(degree, f.degree)
    if _route(f, method) == "spectral":
        A = sp.truncate(sp.apply_multiplier(f.coeffs, mult), max(degree, 0))
        return from_coeffs(A, degree, f.carrier)
    vals = kernel_apply(f.carrier, f.samples, KernelSeries(f.dim, mult), f.carrier.nodes)
    return f.with_samples(vals, degree)


def project_degree(f: BandlimitedFunction, k: int, method: str = "auto") -> BandlimitedFunction:
    """Orthogonal projection Y_k(f) onto the degree-k harmonics."""
    if not 0 <= k <= f.degree:
        raise ValueError(f"degree {k} outside 0..{f.degree}")
    mult = np.zeros(k + 1)
    mult[k] = 1.0
    return apply_multiplier(f, mult, k, method)


def sigma_j(f: BandlimitedFunction, j: int, window: Window = DEFAULT_WINDOW, method: str = "auto"):
    """Band-pass sigma_j(f)(x) = <f, G_j(x . )>; lies in Pi_{2^j}."""
    if j < 0:
        raise ValueError("level must be nonnegative")
    mult = window.multipliers(j, f.degree)
    return apply_multiplier(f, mult, 1 << j if j > 0 else 0, method)


def reproduction_multiplier(J: int, L: int, window: Window = DEFAULT_WINDOW) -> np.ndarray:
    return sum(window.multipliers(j, L) ** 2 for j in range(J + 1))


def reproduce(f: BandlimitedFunction, J: int, window: Window = DEFAULT_WINDOW, method: str = "auto"):
    """``sum_{j<=J} sigma_j(sigma_j(f))``, which equals f once 2^(J-1) >= deg f."""
    if f.degree > 0 and (J < 1 or (1 << (J - 1)) < f.degree):
        raise ValueError(f"J = {J} is too small to reproduce degree {f.degree}")
    if _route(f, method) == "spectral":
        return apply_multiplier(f, reproduction_multiplier(J, f.degree, window), f.degree, "spectral")
    out = None
    for j in range(J + 1):
        g = sigma_j(sigma_j(f, j, window, "kernel"), j, window, "kernel")
        out = g.with_samples(g.samples, f.degree) if out is None else out + g.with_samples(g.samples, f.degree)
    return out


def lp_norm(f: BandlimitedFunction, p: float, reference_rule: Optional[CubatureRule] = None) -> float:
    """L^p (quasi-)norm by quadrature on ``reference_rule`` (exact for p = 2 at degree >= 2L).

    For p = inf the largest node values are polished by a local maximization.
    """
    rule = reference_rule or default_reference_rule(f, p)
    if rule is f.carrier:
        vals = f.samples
    elif f.spectral and rule.grid is not None:
        g = rule.grid
        vals = sp.synth_grid(g.z, g.n_lon, f.coeffs).reshape(-1)
    else:
        vals = f.eval_at(rule.nodes)
    if np.isinf(p):
        return _polished_sup(f, rule.nodes, np.abs(vals))
    return rule_lp_norm(vals, rule, p)


def _polished_sup(f, nodes, absvals, n_start=SUP_STARTS, rounds=24):
    """Zoom search on tangent-plane grids around the largest node values."""
    best = float(absvals.max())
    g = np.linspace(-4, 4, 9)
    offsets = np.stack(np.meshgrid(*([g] * (f.dim - 1)), indexing="ij"), axis=-1).reshape(-1, f.dim - 1)
    for i in np.argsort(absvals)[::-1][:n_start]:
        x = nodes[i]
        h = 0.25 / max(f.degree, 1)
        for _ in range(rounds):
            Q, _ = np.linalg.qr(np.column_stack([x, np.eye(f.dim)]))
            Y = x + offsets @ (h * Q[:, 1:f.dim]).T
            Y /= np.linalg.norm(Y, axis=1, keepdims=True)
            v = np.abs(f.eval_at(Y))
            k = int(np.argmax(v))
            x = Y[k]
            best = max(best, float(v[k]))
            h /= 3
    return best


def rule_lp_norm(vals, rule: CubatureRule, p: float) -> float:
    vals = np.abs(np.asarray(vals, dtype=float))
    if np.isinf(p):
        return float(vals.max())
    return float(np.dot(rule.weights, vals ** p) ** (1 / p))


def default_reference_rule(f: BandlimitedFunction, p: float) -> CubatureRule:
    """Carrier for p = 2; for even integer p a rule exact on |f|^p; else 8x oversampling."""
    if p == 2:
        return f.carrier
    if f.dim != 3:
        return f.carrier
    if np.isfinite(p) and float(p).is_integer() and int(p) % 2 == 0:
        N = int(p) * f.degree
    else:
        N = 8 * max(f.degree, 8)
    return f.carrier if f.carrier.degree >= N else build_product_rule(3, N)
