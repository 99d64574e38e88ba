"""The polynomial frame psi_{j,k}(x) = sqrt(lambda_{j,k}) G_j(x . x_{j,k}) on S^2."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import _spectral as sp
from .gegenbauer import KernelSeries, eval_kernel_series
from .harmonic import BandlimitedFunction, _as_points, kernel_apply
from .quadrature import Cap, CubatureRule, build_product_rule, cap_measure
from .window import DEFAULT_WINDOW, Window

MAX_LEVEL_NODES = 10_000_000
DEFAULT_OVERSAMPLING = 4
_SPARSE_LEVEL = 4096  # below this many nonzeros a level is synthesized point by point


class FrameResourceError(MemoryError):
    pass


class TruncationWarning(UserWarning):
    pass


def level_degree(j: int, oversampling: int = DEFAULT_OVERSAMPLING) -> int:
    """Exactness of the level-j node set: 2^(j + oversampling)."""
    return 0 if j == 0 else 1 << (j + oversampling)


def level_node_count(j: int, oversampling: int = DEFAULT_OVERSAMPLING) -> int:
    N = level_degree(j, oversampling)
    return 1 if j == 0 else (N // 2 + 1) * (N + 1)


@dataclass(frozen=True, eq=False)
class FrameSystem:
    dim: int
    jmax: int
    window: Window
    levels: tuple
    oversampling: int = DEFAULT_OVERSAMPLING

    def __len__(self):
        return sum(len(r) for r in self.levels)

    @property
    def level_sizes(self) -> List[int]:
        return [len(r) for r in self.levels]

    def cap_radius(self, j: int) -> float:
        return np.pi / 2.0 ** j

    def cap_measure(self, j: int) -> float:
        return float(cap_measure(self.dim, self.cap_radius(j)))

    def cap(self, j: int, k: int) -> Cap:
        return Cap(self.levels[j].nodes[k], self.cap_radius(j), self.cap_measure(j))

    def kernel(self, j: int) -> KernelSeries:
        """G_j as a kernel series."""
        L = 0 if j == 0 else 1 << j
        return KernelSeries(self.dim, self.window.multipliers(j, L))

    def max_degree(self) -> int:
        return 0 if self.jmax == 0 else 1 << self.jmax


def build_frame(d: int, jmax: int, window: Window = DEFAULT_WINDOW,
                oversampling: int = DEFAULT_OVERSAMPLING) -> FrameSystem:
    """Levels 0..jmax; level j >= 1 is a product rule exact on Pi_{2^(j+oversampling)}."""
    if d != 3:
        raise NotImplementedError("frames are built from product rules, available for d = 3 only")
    if jmax < 0:
        raise ValueError("jmax must be nonnegative")
    for j in range(1, jmax + 1):
        n = level_node_count(j, oversampling)
        if n > MAX_LEVEL_NODES:
            raise FrameResourceError(f"level {j} would need {n} nodes (limit {MAX_LEVEL_NODES})")
    levels = [CubatureRule(dim=d, degree=0, nodes=np.array([[0.0, 0.0, 1.0]]), weights=np.ones(1), kind="point")]
    for j in range(1, jmax + 1):
        levels.append(build_product_rule(d, level_degree(j, oversampling)))
    return FrameSystem(dim=d, jmax=jmax, window=window, levels=tuple(levels), oversampling=oversampling)


@dataclass
class CoefficientTree:
    """Per-level arrays of frame coefficients aligned with the level nodes."""

    levels: List[np.ndarray]
    truncated: bool = False
    meta: dict = field(default_factory=dict)

    @classmethod
    def zeros(cls, F: FrameSystem) -> "CoefficientTree":
        return cls([np.zeros(n) for n in F.level_sizes])

    def check(self, F: FrameSystem):
        if [len(c) for c in self.levels] != F.level_sizes:
            raise ValueError("coefficient tree does not match the frame's level sizes")

    def flat(self) -> np.ndarray:
        return np.concatenate(self.levels)

    def index(self):
        """(j, k) for every entry of :meth:`flat`."""
        j = np.concatenate([np.full(len(c), i) for i, c in enumerate(self.levels)])
        k = np.concatenate([np.arange(len(c)) for c in self.levels])
        return j, k

    def nnz(self) -> int:
        return int(sum(np.count_nonzero(c) for c in self.levels))

    def copy(self) -> "CoefficientTree":
        return CoefficientTree([c.copy() for c in self.levels], self.truncated, dict(self.meta))

    def __mul__(self, s):
        return CoefficientTree([c * s for c in self.levels], self.truncated, dict(self.meta))

    __rmul__ = __mul__


def atom_eval(F: FrameSystem, j: int, k: int, X):
    """psi_{j,k} at unit vectors X."""
    if not 0 <= j <= F.jmax or not 0 <= k < len(F.levels[j]):
        raise IndexError(f"no atom ({j}, {k}) in this frame")
    X = _as_points(X, F.dim)
    rule = F.levels[j]
    t = np.clip(X @ rule.nodes[k], -1.0, 1.0)
    return np.sqrt(rule.weights[k]) * eval_kernel_series(F.kernel(j), t)


def analyze(F: FrameSystem, f: BandlimitedFunction, method: str = "auto") -> CoefficientTree:
    """Frame coefficients <f, psi_{j,k}> = sqrt(lambda_{j,k}) sigma_j(f)(x_{j,k})."""
    if f.dim != F.dim:
        raise ValueError("dimension mismatch")
    truncated = f.degree > (1 << max(F.jmax - 1, 0)) if F.jmax > 0 else f.degree > 0
    if truncated:
        warnings.warn(f"degree {f.degree} exceeds 2^(jmax-1); coefficients above level {F.jmax} are dropped",
                      TruncationWarning, stacklevel=2)
    spectral = method == "spectral" or (method == "auto" and f.spectral)
    levels = []
    for j, rule in enumerate(F.levels):
        mult = F.window.multipliers(j, f.degree)
        if not mult.any():
            levels.append(np.zeros(len(rule)))
            continue
        if spectral:
            A = sp.truncate(sp.apply_multiplier(f.coeffs, mult), min(f.degree, F.kernel(j).degree))
            if rule.grid is not None:
                vals = sp.synth_grid(rule.grid.z, rule.grid.n_lon, A).reshape(-1)
            else:
                vals = sp.synth_points(A, rule.nodes)
        else:
            vals = kernel_apply(f.carrier, f.samples, KernelSeries(F.dim, mult), rule.nodes)
        levels.append(np.sqrt(rule.weights) * vals)
    return CoefficientTree(levels, truncated=truncated)


def tree_coeffs(F: FrameSystem, tree: CoefficientTree) -> np.ndarray:
    """Harmonic coefficients of ``sum c_{j,k} psi_{j,k}`` (exact, via point masses)."""
    tree.check(F)
    top = max((j for j, c in enumerate(tree.levels) if np.any(c)), default=0)
    L = 0 if top == 0 else 1 << top
    A = np.zeros((L + 1, L + 1), dtype=complex)
    for j, (c, rule) in enumerate(zip(tree.levels, F.levels)):
        nz = np.flatnonzero(c)
        if nz.size == 0:
            continue
        Lj = 0 if j == 0 else 1 << j
        v = np.sqrt(rule.weights) * c
        if rule.grid is not None and nz.size > _SPARSE_LEVEL:
            Aj = sp.grid_point_masses(rule.grid.z, rule.grid.n_lon, v.reshape(rule.grid.shape), Lj)
        else:
            Aj = sp.points_point_masses(rule.nodes[nz], v[nz], Lj)
        A += sp.truncate(sp.apply_multiplier(Aj, F.window.multipliers(j, Lj)), L)
    return A


def synthesize(F: FrameSystem, tree: CoefficientTree, X, method: str = "auto"):
    """Pointwise ``sum_{j,k} c_{j,k} psi_{j,k}(x)`` for each row x of X."""
    X = _as_points(X, F.dim)
    tree.check(F)
    if method in ("auto", "spectral"):
        return sp.synth_points(tree_coeffs(F, tree), X)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    out = np.zeros(len(X))
    for j, (c, rule) in enumerate(zip(tree.levels, F.levels)):
        nz = np.flatnonzero(c)
        if nz.size == 0:
            continue
        G = F.kernel(j)
        step = max(1, 2_000_000 // len(X))
        for i0 in range(0, nz.size, step):
            idx = nz[i0:i0 + step]
            t = np.clip(X @ rule.nodes[idx].T, -1.0, 1.0)
            out += eval_kernel_series(G, t) @ (np.sqrt(rule.weights[idx]) * c[idx])
    return out


def synthesize_function(F: FrameSystem, tree: CoefficientTree, carrier: Optional[CubatureRule] = None):
    """The expansion as a :class:`BandlimitedFunction` on a product carrier."""
    A = tree_coeffs(F, tree)
    L = A.shape[0] - 1
    carrier = carrier or build_product_rule(F.dim, 2 * L)
    if carrier.degree < 2 * L:
        raise ValueError("carrier too coarse for the expansion degree")
    vals = sp.synth_grid(carrier.grid.z, carrier.grid.n_lon, A).reshape(-1)
    return BandlimitedFunction(F.dim, L, carrier, vals)


def theta_grid(j: int, n: int = 10_000, per_scale: int = 20) -> np.ndarray:
    """Uniform grid on (0, pi] refined geometrically towards 0."""
    uni = np.linspace(np.pi / n, np.pi, n)
    extra = [np.pi * 2.0 ** -(s + np.arange(per_scale) / per_scale) for s in range(1, j + 12)]
    return np.unique(np.concatenate([uni] + extra))


def localization_profile(F: FrameSystem, j: int, ell: int) -> float:
    """sup_theta |G_j(cos theta)| (1 + 2^j theta)^ell / 2^(j(d-1))."""
    if j < 1 or j > F.jmax:
        raise ValueError("level must satisfy 1 <= j <= jmax")
    th = theta_grid(j)
    G = np.abs(eval_kernel_series(F.kernel(j), np.cos(th)))
    return float(np.max(G * (1 + 2.0 ** j * th) ** ell) / 2.0 ** (j * (F.dim - 1)))


def square_function(F: FrameSystem, tree: CoefficientTree, X) -> np.ndarray:
    """(sum_B |c_B|^2 |B|^{-1} chi_B(x))^{1/2} at the rows of X."""
    X = _as_points(X, F.dim)
    acc = np.zeros(len(X))
    for j, (c, rule) in enumerate(zip(tree.levels, F.levels)):
        nz = np.flatnonzero(c)
        if nz.size == 0:
            continue
        r = F.cap_radius(j)
        step = max(1, 2_000_000 // len(X))
        for i0 in range(0, nz.size, step):
            idx = nz[i0:i0 + step]
            inside = np.arccos(np.clip(X @ rule.nodes[idx].T, -1.0, 1.0)) <= r
            acc += inside @ (c[idx] ** 2) / F.cap_measure(j)
    return np.sqrt(acc)
