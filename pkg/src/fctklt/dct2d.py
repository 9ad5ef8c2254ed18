"""Orthonormal 2-D DCT (type II) and its inverse.

Two routes are provided. :func:`dct2_reference` evaluates the quadruple sum
literally and exists to check :func:`dct2_forward`, which runs a separable
1-D transform along each axis. For power-of-two lengths the 1-D transform is
Makhoul's N-point FFT reordering (O(N log N)); other lengths multiply by the
explicit basis matrix.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DimensionError

__all__ = [
    "dct_matrix",
    "dct2_reference",
    "dct2_forward",
    "dct2_inverse",
    "dct1_forward",
    "dct1_inverse",
]


def _eps(p: int) -> float:
    return 1.0 / math.sqrt(2.0) if p == 0 else 1.0


@lru_cache(maxsize=32)
def _basis(n: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    c = np.sqrt(2.0 / n) * np.cos(np.pi * (2 * m + 1) * k / (2 * n))
    c[0, :] *= 1.0 / math.sqrt(2.0)
    c.setflags(write=False)
    return c


def dct_matrix(n: int) -> np.ndarray:
    """Return the n x n orthonormal DCT-II matrix ``C`` (rows are basis vectors)."""
    if n < 1:
        raise DimensionError(f"transform length must be >= 1, got {n}")
    return _basis(n).copy()


def _as_plane(plane) -> np.ndarray:
    arr = np.asarray(plane, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D plane, got shape {arr.shape}")
    return arr


def dct2_reference(plane) -> np.ndarray:
    """Direct O(N^4) evaluation of the orthonormal N x N 2-D DCT."""
    x = _as_plane(plane)
    n = x.shape[0]
    if x.shape[1] != n:
        raise DimensionError(f"reference DCT needs a square plane, got {x.shape}")
    cos = [[math.cos(math.pi * (2 * m + 1) * k / (2 * n)) for m in range(n)] for k in range(n)]
    rows = x.tolist()
    y = np.empty((n, n))
    for k in range(n):
        ck = cos[k]
        for l in range(n):
            cl = cos[l]
            acc = 0.0
            for m in range(n):
                row = rows[m]
                inner = 0.0
                for q in range(n):
                    inner += row[q] * cl[q]
                acc += inner * ck[m]
            y[k, l] = (2.0 / n) * _eps(k) * _eps(l) * acc
    return y


def _is_pow2(n: int) -> bool:
    return n & (n - 1) == 0


@lru_cache(maxsize=32)
def _twiddle(n: int) -> np.ndarray:
    k = np.arange(n)
    w = np.exp(-1j * np.pi * k / (2 * n)) * np.sqrt(2.0 / n)
    w[0] /= math.sqrt(2.0)
    w.setflags(write=False)
    return w


def dct1_forward(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """Orthonormal DCT-II along one axis."""
    x = np.moveaxis(np.asarray(x, dtype=np.float64), axis, -1)
    n = x.shape[-1]
    if n == 1:
        out = x.copy()
    elif _is_pow2(n):
        # even samples ascending, odd samples descending
        v = np.concatenate([x[..., ::2], x[..., 1::2][..., ::-1]], axis=-1)
        out = np.real(np.fft.fft(v, axis=-1) * _twiddle(n))
    else:
        out = x @ _basis(n).T
    return np.moveaxis(out, -1, axis)


def dct1_inverse(y: np.ndarray, axis: int = -1) -> np.ndarray:
    """Inverse of :func:`dct1_forward` (orthonormal DCT-III)."""
    y = np.moveaxis(np.asarray(y, dtype=np.float64), axis, -1)
    n = y.shape[-1]
    if n == 1:
        out = y.copy()
    elif _is_pow2(n):
        k = np.arange(n)
        u = y / np.abs(_twiddle(n))
        mirrored = np.zeros_like(u)
        mirrored[..., 1:] = u[..., :0:-1]
        v = np.real(np.fft.ifft(np.exp(1j * np.pi * k / (2 * n)) * (u - 1j * mirrored), axis=-1))
        out = np.empty_like(v)
        out[..., ::2] = v[..., : n // 2]
        out[..., 1::2] = v[..., n // 2 :][..., ::-1]
    else:
        out = y @ _basis(n)
    return np.moveaxis(out, -1, axis)


def dct2_forward(plane) -> np.ndarray:
    """Separable orthonormal 2-D DCT: all rows, then all columns."""
    x = _as_plane(plane)
    return dct1_forward(dct1_forward(x, axis=1), axis=0)


def dct2_inverse(coeffs) -> np.ndarray:
    """Inverse 2-D DCT; ``dct2_inverse(dct2_forward(p))`` restores ``p``."""
    y = _as_plane(coeffs)
    return dct1_inverse(dct1_inverse(y, axis=0), axis=1)
