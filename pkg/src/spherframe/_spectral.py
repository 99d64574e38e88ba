"""Exact spherical-harmonic transforms on S^2 for Gauss-Legendre x equiangular grids.

Coefficients are stored as a complex array ``A[l, m]`` (0 <= m <= l <= L) with

    f(theta, phi) = sum_{l, m} Lam_lm(cos theta) * Re(A[l, m] * exp(i m phi)),

where ``Lam_lm`` are associated Legendre functions normalized so that
``int_{-1}^{1} Lam_lm^2 dz = 2``. With this convention the degree-l
reproducing kernel is ``P_l(x.y) = sum_m eps_m Lam_lm(z_x) Lam_lm(z_y) cos(m dphi)``
with eps_0 = 1 and eps_m = 2, so the coefficients of a weighted sum of point
masses are ``A[l, m] = eps_m sum_k v_k Lam_lm(z_k) exp(-i m phi_k)``.
"""
from __future__ import annotations

import numpy as np


def alf_blocks(z, L):
    """Yield ``(m, block)`` with ``block[l - m] = Lam_lm(z)`` for l = m..L."""
    z = np.asarray(z, dtype=float)
    s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    diag = np.ones_like(z)
    for m in range(L + 1):
        if m > 0:
            diag = np.sqrt((2 * m + 1) / (2 * m)) * s * diag
        block = np.empty((L - m + 1,) + z.shape)
        block[0] = diag
        if L > m:
            block[1] = np.sqrt(2 * m + 3) * z * diag
        for l in range(m + 2, L + 1):
            a = np.sqrt((2 * l - 1) * (2 * l + 1) / ((l - m) * (l + m)))
            b = np.sqrt((2 * l + 1) * (l + m - 1) * (l - m - 1) / ((l - m) * (l + m) * (2 * l - 3)))
            block[l - m] = a * z * block[l - m - 1] - b * block[l - m - 2]
        yield m, block


def _eps(m):
    return 1.0 if m == 0 else 2.0


def grid_point_masses(z, n_lon, v, L):
    """Coefficients of ``sum v[a, b] delta(x_ab)`` truncated at degree L.

    ``v`` has shape (n_lat, n_lon) or (n_lat, n_lon, nfun) on the grid with
    latitudes ``z`` and longitudes ``2 pi b / n_lon``.
    """
    v = np.asarray(v, dtype=float)
    F = np.fft.fft(v, axis=1)  # F[a, m] = sum_b v[a, b] exp(-2 pi i m b / n_lon)
    A = np.zeros((L + 1, L + 1) + v.shape[2:], dtype=complex)
    for m, block in alf_blocks(z, L):
        Fm = F[:, m % n_lon]
        A[m:, m] = _eps(m) * np.tensordot(block, Fm, axes=(1, 0))
    return A


def points_point_masses(X, v, L):
    """Coefficients of ``sum_k v[k] delta(X[k])`` for arbitrary points."""
    X = np.asarray(X, dtype=float)
    v = np.asarray(v, dtype=float)
    z = X[:, 2]
    lon = np.arctan2(X[:, 1], X[:, 0])
    A = np.zeros((L + 1, L + 1) + v.shape[1:], dtype=complex)
    for m, block in alf_blocks(z, L):
        e = np.exp(-1j * m * lon)
        w = v * (e if v.ndim == 1 else e[:, None])
        A[m:, m] = _eps(m) * np.tensordot(block, w, axes=(1, 0))
    return A


def synth_grid(z, n_lon, A):
    """Evaluate coefficients ``A`` on the product grid; returns (n_lat, n_lon, ...)."""
    L = A.shape[0] - 1
    extra = A.shape[2:]
    H = np.zeros((len(z), n_lon) + extra, dtype=complex)
    for m, block in alf_blocks(z, L):
        # bins alias modulo n_lon; exact at the grid longitudes
        H[:, m % n_lon] += np.tensordot(block, A[m:, m], axes=(0, 0))
    return np.real(np.fft.ifft(H, axis=1)) * n_lon


def synth_points(A, X, chunk=20000):
    """Evaluate coefficients ``A`` at arbitrary unit vectors ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    L = A.shape[0] - 1
    out = np.empty((len(X),) + A.shape[2:])
    for i0 in range(0, len(X), chunk):
        Xc = X[i0:i0 + chunk]
        lon = np.arctan2(Xc[:, 1], Xc[:, 0])
        acc = np.zeros((len(Xc),) + A.shape[2:])
        for m, block in alf_blocks(Xc[:, 2], L):
            S = np.tensordot(block, A[m:, m], axes=(0, 0))
            e = np.exp(1j * m * lon)
            acc += np.real(S * (e if S.ndim == 1 else e[:, None]))
        out[i0:i0 + chunk] = acc
    return out


def apply_multiplier(A, mult):
    """Scale each degree l of ``A`` by ``mult[l]`` (missing degrees -> 0)."""
    L = A.shape[0] - 1
    mm = np.zeros(L + 1)
    n = min(L + 1, len(mult))
    mm[:n] = mult[:n]
    return A * mm.reshape((L + 1,) + (1,) * (A.ndim - 1))


def truncate(A, L):
    """Resize coefficient array to degree L (zero-padding or cutting)."""
    L0 = A.shape[0] - 1
    if L == L0:
        return A
    out = np.zeros((L + 1, L + 1) + A.shape[2:], dtype=A.dtype)
    n = min(L, L0) + 1
    out[:n, :n] = A[:n, :n]
    return out
