"""Karhunen-Loeve transform across the blocks of a :class:`SubBlockStack`.

Each pixel position inside a block yields one sample vector with one
component per block, so a stack of n blocks of size B x B gives B*B samples
of dimension n. The covariance of those samples is diagonalised by a cyclic
Jacobi solver and the stack is projected onto the eigenvectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .blockscan import SubBlockStack
from .errors import DimensionError

__all__ = [
    "KltBasis",
    "compute_mean",
    "compute_covariance",
    "eigen_symmetric",
    "jacobi_eigh",
    "fit_basis",
    "klt_forward",
    "klt_inverse",
]

MAX_SWEEPS = 100
SWEEP_TOL = 1e-12


@dataclass(frozen=True)
class KltBasis:
    """Mean vector, eigenvectors (columns) and descending eigenvalues."""

    mean: np.ndarray
    eigenvectors: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        vecs = np.asarray(self.eigenvectors, dtype=np.float64)
        vals = np.asarray(self.eigenvalues, dtype=np.float64).reshape(-1)
        n = mean.shape[0]
        if vecs.shape != (n, n) or vals.shape != (n,):
            raise DimensionError(
                f"inconsistent basis shapes: mean {mean.shape}, vectors {vecs.shape}, values {vals.shape}"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "eigenvectors", vecs)
        object.__setattr__(self, "eigenvalues", vals)

    @property
    def n(self) -> int:
        return self.mean.shape[0]


def compute_mean(stack: SubBlockStack) -> np.ndarray:
    """Per-block average over all B*B pixel positions."""
    return stack.vectors().mean(axis=1)


def compute_covariance(stack: SubBlockStack, mean: np.ndarray) -> np.ndarray:
    """Population covariance (divide by B*B) of the per-position vectors."""
    x = stack.vectors()
    mean = np.asarray(mean, dtype=np.float64)
    if mean.shape != (x.shape[0],):
        raise DimensionError(f"mean has shape {mean.shape}, expected ({x.shape[0]},)")
    d = x - mean[:, None]
    c = d @ d.T / d.shape[1]
    return 0.5 * (c + c.T)


@lru_cache(maxsize=16)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Pairings covering every (p, q), p < q, once; pairs within a round are disjoint."""
    players = list(range(n)) + ([None] if n % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = []
        for i in range(size // 2):
            a, b = players[i], players[size - 1 - i]
            if a is not None and b is not None:
                pairs.append((min(a, b), max(a, b)))
        pairs.sort()
        p = np.array([a for a, _ in pairs], dtype=np.intp)
        q = np.array([b for _, b in pairs], dtype=np.intp)
        rounds.append((p, q))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return tuple(rounds)


def jacobi_eigh(c: np.ndarray, tol: float = SWEEP_TOL, max_sweeps: int = MAX_SWEEPS):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Rotations are applied in round-robin order: each round annihilates n/2
    disjoint off-diagonal pairs at once, and n-1 rounds make one sweep over
    every pair. Iteration stops once the off-diagonal Frobenius norm drops
    below ``tol * trace`` (``tol * ||C||_F`` when the trace is not positive)
    or after ``max_sweeps`` sweeps.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` in solver order (unsorted).
    """
    a = np.array(c, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    trace = float(np.trace(a))
    scale = trace if trace > 0 else float(np.linalg.norm(a))
    rounds = _round_robin(n) if n > 1 else ()
    sweeps = 0

    def off_norm():
        off = a.copy()
        np.fill_diagonal(off, 0.0)
        return float(np.linalg.norm(off))

    while sweeps < max_sweeps and off_norm() > tol * scale:
        for p, q in rounds:
            apq = a[p, q]
            app = a[p, p]
            aqq = a[q, q]
            active = np.abs(apq) > 0
            if not active.any():
                continue
            safe = np.where(active, apq, 1.0)
            with np.errstate(over="ignore"):
                theta = (aqq - app) / (2.0 * safe)
                t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(theta == 0, 1.0, t)
            t = np.where(active, t, 0.0)
            cos = 1.0 / np.sqrt(t * t + 1.0)
            sin = t * cos

            col_p = a[:, p].copy()
            col_q = a[:, q]
            a[:, p] = cos * col_p - sin * col_q
            a[:, q] = sin * col_p + cos * col_q
            row_p = a[p, :].copy()
            row_q = a[q, :]
            a[p, :] = cos[:, None] * row_p - sin[:, None] * row_q
            a[q, :] = sin[:, None] * row_p + cos[:, None] * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0

            vp = v[:, p].copy()
            vq = v[:, q]
            v[:, p] = cos * vp - sin * vq
            v[:, q] = sin * vp + cos * vq
        sweeps += 1
    return np.diag(a).copy(), v, sweeps


def eigen_symmetric(c) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvectors (columns) of a symmetric matrix.

    Ties keep solver order (stable sort). Each eigenvector is flipped so its
    largest-magnitude entry (the first, on ties) is non-negative.
    """
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise DimensionError("matrix has non-finite entries")
    if np.max(np.abs(c - c.T)) > 1e-12 * max(1.0, float(np.max(np.abs(c)))):
        raise DimensionError("matrix is not symmetric")
    vals, vecs, _ = jacobi_eigh(0.5 * (c + c.T))
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    lead = np.argmax(np.abs(vecs), axis=0)
    signs = np.where(vecs[lead, np.arange(vecs.shape[1])] < 0, -1.0, 1.0)
    return vals, vecs * signs


def fit_basis(stack: SubBlockStack) -> KltBasis:
    """Mean, covariance and eigen-decomposition of a full stack."""
    if stack.channels != stack.n:
        raise DimensionError("basis must be fitted on an unpruned stack")
    mean = compute_mean(stack)
    vals, vecs = eigen_symmetric(compute_covariance(stack, mean))
    # covariance is PSD; negative values are round-off
    vals = np.maximum(vals, 0.0)
    return KltBasis(mean, vecs, vals)


def klt_forward(stack: SubBlockStack, basis: KltBasis) -> SubBlockStack:
    """Project each pixel-position vector: y = V^T (x - mean)."""
    if basis.n != stack.channels:
        raise DimensionError(f"basis has {basis.n} channels, stack has {stack.channels}")
    x = stack.vectors()
    return stack.with_vectors(basis.eigenvectors.T @ (x - basis.mean[:, None]))


def klt_inverse(stack: SubBlockStack, basis: KltBasis) -> SubBlockStack:
    """Reconstruct x = V y + mean per pixel position."""
    if basis.n != stack.channels:
        raise DimensionError(f"basis has {basis.n} channels, stack has {stack.channels}")
    y = stack.vectors()
    return stack.with_vectors(basis.eigenvectors @ y + basis.mean[:, None])
