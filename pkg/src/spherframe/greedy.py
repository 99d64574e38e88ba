"""Greedy n-term approximation in the frame and Jackson/Bernstein rate checks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre
from scipy.stats import linregress

from . import _spectral as sp
from .besov import diag_besov_norm
from .frame import CoefficientTree, FrameSystem, analyze, synthesize, tree_coeffs
from .harmonic import BandlimitedFunction, rule_lp_norm
from .quadrature import build_product_rule

G_RULE_DEGREE = 512


def tau_for(alpha: float, p: float, d: int) -> float:
    """tau = (alpha/(d-1) + 1/p)^{-1}."""
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    return 1.0 / (alpha / (d - 1) + inv_p)


@dataclass(frozen=True)
class GreedySelection:
    order: List[Tuple[int, int]]
    scores: np.ndarray  # scores of the selected atoms, in order
    p: float
    threshold: float  # best score left outside the selection (0 if none)

    def __len__(self):
        return len(self.order)

    def as_set(self):
        return set(self.order)


def atom_scores(tree: CoefficientTree, p: float, F: FrameSystem) -> np.ndarray:
    """Flat array of |c_B| |B|^{1/p - 1/2} aligned with ``tree.flat()``."""
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    return np.concatenate([np.abs(c) * F.cap_measure(j) ** (inv_p - 0.5) for j, c in enumerate(tree.levels)])


def ranking(tree: CoefficientTree, p: float, F: FrameSystem):
    """Nonzero atoms sorted by descending score, ties by (j, k)."""
    tree.check(F)
    s = atom_scores(tree, p, F)
    j, k = tree.index()
    nz = np.flatnonzero(tree.flat())
    order = nz[np.lexsort((k[nz], j[nz], -s[nz]))]
    return order, s, j, k


def greedy_select(tree: CoefficientTree, n: int, p: float, F: FrameSystem) -> GreedySelection:
    if n < 0:
        raise ValueError("n must be nonnegative")
    order, s, j, k = ranking(tree, p, F)
    top = order[:n]
    rest = order[n:]
    return GreedySelection(
        order=[(int(j[i]), int(k[i])) for i in top],
        scores=s[top],
        p=p,
        threshold=float(s[rest].max()) if rest.size else 0.0,
    )


def restrict(tree: CoefficientTree, sel: GreedySelection) -> CoefficientTree:
    out = CoefficientTree([np.zeros_like(c) for c in tree.levels])
    for j, k in sel.order:
        out.levels[j][k] = tree.levels[j][k]
    return out


def greedy_approx(F: FrameSystem, tree: CoefficientTree, n: int, p: float, X) -> np.ndarray:
    """G_n^p evaluated at X: the expansion restricted to the top-n atoms."""
    return synthesize(F, restrict(tree, greedy_select(tree, n, p, F)), X)


def _pad(A, L):
    return sp.truncate(A, L)


def jackson_experiment(F: FrameSystem, f: BandlimitedFunction, alpha: float, p: float,
                       n_grid: Sequence[int], tree: Optional[CoefficientTree] = None) -> dict:
    """Greedy errors e_n = ||f - G_n^p f||_p and the normalized ratios e_n n^{alpha/(d-1)} / |f|_B.

    The Besov norm is the cap-weighted coefficient norm with tau = (alpha/(d-1) + 1/p)^{-1}.
    """
    if p < 1:
        raise ValueError("error norms need p >= 1")
    n_grid = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be increasing")
    tree = analyze(F, f) if tree is None else tree
    d = F.dim
    tau = tau_for(alpha, p, d)
    bnorm = diag_besov_norm(tree, alpha, tau, F)
    L = max(F.max_degree(), f.degree)
    rule = build_product_rule(d, 2 * L)
    Af = _pad(f.coeffs, L)
    errors, ratios = [], []
    for n in n_grid:
        sub = restrict(tree, greedy_select(tree, n, p, F))
        diff = Af - _pad(tree_coeffs(F, sub), L)
        vals = sp.synth_grid(rule.grid.z, rule.grid.n_lon, diff).reshape(-1)
        e = rule_lp_norm(vals, rule, p)
        errors.append(e)
        ratios.append(e * n ** (alpha / (d - 1)) / bnorm if bnorm > 0 else 0.0)
    errors = np.array(errors)
    ratios = np.array(ratios)
    pos = errors > 0
    if pos.sum() >= 2:
        fit = linregress(np.log(np.array(n_grid)[pos]), np.log(errors[pos]))
        slope, stderr = float(fit.slope), float(fit.stderr)
    else:
        slope, stderr = float("nan"), float("nan")
    med = float(np.median(ratios))
    return {
        "alpha": alpha, "p": p, "tau": tau, "besov_norm": bnorm,
        "n": n_grid, "error": errors.tolist(), "ratio": ratios.tolist(),
        "slope": slope, "slope_stderr": stderr, "target_slope": -alpha / (d - 1),
        "ratio_max_over_median": float(ratios.max() / med) if med > 0 else float("nan"),
    }


def synthetic_besov_tree(F: FrameSystem, alpha: float, eps: float, rng: np.random.Generator,
                         jtop: Optional[int] = None) -> CoefficientTree:
    """Random-sign coefficients 2^{-j(d-1)(1/2 + (alpha + eps)/(d-1))} on levels 0..jtop."""
    jtop = F.jmax - 1 if jtop is None else jtop
    d1 = F.dim - 1
    levels = []
    for j, n in enumerate(F.level_sizes):
        if j > jtop:
            levels.append(np.zeros(n))
            continue
        mag = 2.0 ** (-j * d1 * (0.5 + (alpha + eps) / d1))
        levels.append(mag * rng.choice([-1.0, 1.0], size=n))
    return CoefficientTree(levels, meta={"alpha": alpha, "eps": eps, "jtop": jtop})


# --- Bernstein side -------------------------------------------------------

def _atoms(tree: CoefficientTree, F: FrameSystem):
    rows = []
    for j, c in enumerate(tree.levels):
        B = F.cap_measure(j)
        for k in np.flatnonzero(c):
            rows.append((abs(c[k]) * B ** -0.5, j, int(k)))
    # priority: larger value first, then (j, k)
    rows.sort(key=lambda r: (-r[0], r[1], r[2]))
    vals = np.array([r[0] for r in rows])
    centers = np.array([F.levels[r[1]].nodes[r[2]] for r in rows]).reshape(-1, F.dim)
    radii = np.array([F.cap_radius(r[1]) for r in rows])
    return vals, centers, radii


def _in_caps(X, centers, radii):
    """Boolean (len(X), n_caps) cap membership by geodesic distance."""
    return np.arccos(np.clip(X @ centers.T, -1.0, 1.0)) <= radii


def _cap_grid(center, radius, n_theta, n_phi):
    """Polar product rule on a cap (normalized measure, d = 3)."""
    u, w = roots_legendre(n_theta)
    th = radius * (u + 1) / 2
    ph = 2 * np.pi * np.arange(n_phi) / n_phi
    c = center / np.linalg.norm(center)
    a = np.eye(3)[np.argmin(np.abs(c))]
    e1 = np.cross(c, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(c, e1)
    st, ct = np.sin(th)[:, None], np.cos(th)[:, None]
    X = (ct[..., None] * c + st[..., None] * (np.cos(ph)[None, :, None] * e1 + np.sin(ph)[None, :, None] * e2))
    wt = (radius / 2) * w * np.sin(th) / (2 * n_phi)
    return X.reshape(-1, 3), np.repeat(wt, n_phi)


def max_function_norm(tree: CoefficientTree, F: FrameSystem, p: float, method: str = "cap",
                      n_theta: int = 96, n_phi: int = 192) -> float:
    """|| max_B |a_B| |B|^{-1/2} chi_B ||_p.

    ``method="cap"`` integrates each atom's winning region on a polar rule
    centered on its cap (exact for a single cap); ``method="grid"`` uses the
    nodes of a degree-512 product rule.
    """
    if F.dim != 3:
        raise NotImplementedError("max-function norms are implemented for d = 3")
    vals, centers, radii = _atoms(tree, F)
    if vals.size == 0:
        return 0.0
    if np.isinf(p):
        return float(vals.max())
    if method == "grid":
        rule = build_product_rule(3, G_RULE_DEGREE)
        g = np.zeros(len(rule))
        for i0 in range(0, vals.size, 64):
            inside = _in_caps(rule.nodes, centers[i0:i0 + 64], radii[i0:i0 + 64])
            g = np.maximum(g, (inside * vals[i0:i0 + 64]).max(axis=1))
        return rule_lp_norm(g, rule, p)
    if method != "cap":
        raise ValueError(f"unknown method {method!r}")
    total = 0.0
    for q in range(vals.size):
        X, w = _cap_grid(centers[q], radii[q], n_theta, n_phi)
        if q:
            w = w * ~_in_caps(X, centers[:q], radii[:q]).any(axis=1)
        total += vals[q] ** p * w.sum()
    return float(total ** (1 / p))


def bernstein_check(F: FrameSystem, tree: CoefficientTree, alpha: float, p: float,
                    method: str = "cap") -> dict:
    """R = |f|_{B^alpha_tau(H^tau)} / (n^{alpha/(d-1)} ||max_B |a_B||B|^{-1/2} chi_B||_p)."""
    if p < 1:
        raise ValueError("p >= 1 required")
    n = tree.nnz()
    if n == 0:
        raise ValueError("tree has no nonzero coefficients")
    tau = tau_for(alpha, p, F.dim)
    num = diag_besov_norm(tree, alpha, tau, F)
    g = max_function_norm(tree, F, p, method)
    return {"n": n, "alpha": alpha, "p": p, "tau": tau, "besov": num, "g_norm": g,
            "R": num / (n ** (alpha / (F.dim - 1)) * g)}


def random_sparse_tree(F: FrameSystem, n: int, rng: np.random.Generator, levels=None) -> CoefficientTree:
    """n atoms at random (level, node) positions with N(0, 1) coefficients."""
    levels = list(range(1, F.jmax + 1)) if levels is None else list(levels)
    tree = CoefficientTree.zeros(F)
    placed = 0
    while placed < n:
        j = int(rng.choice(levels))
        k = int(rng.integers(len(F.levels[j])))
        if tree.levels[j][k] == 0:
            tree.levels[j][k] = rng.standard_normal()
            placed += 1
    return tree
