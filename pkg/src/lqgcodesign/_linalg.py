"""Symmetric-matrix helpers shared across the package.

Everything here operates on dense float64 arrays and relies on
``numpy.linalg.eigvalsh``/``eigh`` so that symmetry is exploited and results
are deterministic for a given build of numpy.
"""

from __future__ import annotations

import numpy as np


class NumericalError(RuntimeError):
    """A matrix failed a conditioning requirement during a computation."""


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return (A + A^T) / 2."""
    return 0.5 * (a + a.T)


def min_eigenvalue(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(symmetrize(a))[0])


def max_eigenvalue(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(symmetrize(a))[-1])


def sym_condition(a: np.ndarray) -> float:
    """Condition number of a symmetric matrix; inf when not positive definite."""
    eigs = np.linalg.eigvalsh(symmetrize(a))
    lo, hi = float(eigs[0]), float(eigs[-1])
    if lo <= 0.0:
        return float("inf")
    return hi / lo


def general_condition(a: np.ndarray) -> float:
    """Condition number from singular values; inf for a singular matrix."""
    svals = np.linalg.svd(a, compute_uv=False)
    lo, hi = float(svals[-1]), float(svals[0])
    if lo <= 0.0:
        return float("inf")
    return hi / lo


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Symmetric square root of a PSD matrix; negative eigenvalues clipped to 0."""
    vals, vecs = np.linalg.eigh(symmetrize(a))
    vals = np.clip(vals, 0.0, None)
    return symmetrize((vecs * np.sqrt(vals)) @ vecs.T)

def inv_sqrt_pd(a: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    """Inverse symmetric square root; eigenvalues clamped below at ``floor``."""
    vals, vecs = np.linalg.eigh(symmetrize(a))
    vals = np.maximum(vals, floor)
    return symmetrize((vecs / np.sqrt(vals)) @ vecs.T)


def sym_inverse(a: np.ndarray) -> np.ndarray:
    """Inverse of a symmetric matrix, symmetrized against roundoff drift."""
    return symmetrize(np.linalg.inv(symmetrize(a)))


def block_diag(blocks: list[np.ndarray] | tuple[np.ndarray, ...]) -> np.ndarray:
    """Square block-diagonal assembly of square blocks."""
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size))
    ofs = 0
    for b in blocks:
        k = b.shape[0]
        out[ofs:ofs + k, ofs:ofs + k] = b
        ofs += k
    return out


def frozen(a: np.ndarray) -> np.ndarray:
    """Contiguous float64 copy marked read-only, safe to share across readers."""
    out = np.array(a, dtype=float, order="C", copy=True)
    out.setflags(write=False)
    return out
