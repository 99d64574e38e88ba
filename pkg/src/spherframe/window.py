"""Smooth dyadic window with an exact Littlewood-Paley partition of unity.

phi(x) = sqrt(s(x) - s(x/2)) where s is a C-infinity step rising from 0 at 1/2
to 1 at 1. The squares of the dyadic dilates telescope, so
``sum_j phi(2^-j x)^2 == 1`` for every x > 0 up to rounding.
"""
from __future__ import annotations

import numpy as np

_H_CLAMP = 1e-8


def _bump(v):
    v = np.asarray(v, dtype=float)
    out = np.zeros_like(v)
    m = v > _H_CLAMP
    out[m] = np.exp(-1.0 / v[m])
    return out


def eval_step(x):
    """Smooth nondecreasing step: 0 for x <= 1/2, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    u = np.clip(2 * x - 1, 0.0, 1.0)
    hu, hv = _bump(u), _bump(1 - u)
    out = hu / (hu + hv)
    out = np.where(x <= 0.5, 0.0, np.where(x >= 1.0, 1.0, out))
    return out[()]


def eval_phi(x):
    """Window value; even in x and supported in 1/2 <= |x| <= 2."""
    x = np.abs(np.asarray(x, dtype=float))
    v = eval_step(x) - eval_step(x / 2)
    return np.sqrt(np.maximum(v, 0.0))[()]


def check_partition(xs, tol: float = 1e-12):
    """Max deviation of ``sum_j phi(2^-j x)^2`` from 1 over ``xs``.

    Only the dyadic levels that can be nonzero at each x are summed.
    Returns ``(max_deviation, passed)``.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(xs <= 0):
        raise ValueError("partition check needs positive x")
    j0 = np.floor(np.log2(xs))
    total = np.zeros_like(xs)
    # phi(2^-j x) != 0 requires 2^-j x in (1/2, 2), i.e. j in {j0, j0 + 1}
    for shift in (-1, 0, 1, 2):
        total += eval_phi(np.ldexp(xs, -(j0 + shift).astype(int))) ** 2
    dev = float(np.max(np.abs(total - 1.0)))
    return dev, dev <= tol


class Window:
    """The concrete window used by the frame (a thin namespace object)."""

    step = staticmethod(eval_step)
    phi = staticmethod(eval_phi)

    def __call__(self, x):
        return eval_phi(x)

    def multipliers(self, j: int, L: int) -> np.ndarray:
        """Degree multipliers of G_j for degrees 0..L.

        G_0 = 1 acts as the projection on constants; for j >= 1 the coefficient
        of P_k is phi(k / 2^(j-1)) on floor(2^(j-2)) <= k <= 2^j.
        """
        out = np.zeros(L + 1)
        if j == 0:
            out[0] = 1.0
            return out
        lo, hi = (1 << j) >> 2, 1 << j
        k = np.arange(lo, min(hi, L) + 1)
        out[k] = eval_phi(k / 2.0 ** (j - 1))
        return out

    def __repr__(self):
        return "Window()"


DEFAULT_WINDOW = Window()
