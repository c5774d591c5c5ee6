"""Positive representations of vectors and matrices.

A real vector ``w`` is lifted to the nonnegative vector ``pi_vec(w) = (w+, w-)``;
matrices are lifted to the block forms ``pi_mat`` (nonnegative) and
``gamma_metzler`` (Metzler).  ``delta(k)`` maps lifted vectors back:
``delta(k) @ pi_vec(w) == w``.
"""

from __future__ import annotations

import numpy as np


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def pos_part(m) -> np.ndarray:
    """Entrywise positive part ``max(m, 0)``."""
    a = np.asarray(m, dtype=float)
    # +0.0 normalizes -0.0 entries
    return np.where(a > 0, a, 0.0) + 0.0


def neg_part(m) -> np.ndarray:
    """Entrywise negative part ``max(-m, 0)``; zero entries map to 0."""
    a = np.asarray(m, dtype=float)
    return np.where(a < 0, -a, 0.0) + 0.0


def abs_part(m) -> np.ndarray:
    return pos_part(m) + neg_part(m)


def delta(k: int) -> np.ndarray:
    """The k x 2k selector ``[I_k, -I_k]``."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    return np.hstack([np.eye(k), -np.eye(k)])


def pi_vec(w) -> np.ndarray:
    """Min-positive representation ``(w+, w-)`` of a vector."""
    v = np.asarray(w, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    return np.concatenate([pos_part(v), neg_part(v)])


def pi_mat(m) -> np.ndarray:
    """Min-positive representation ``[[M+, M-], [M-, M+]]`` of a k x l matrix."""
    a = _as_matrix(m)
    p, n = pos_part(a), neg_part(a)
    return np.block([[p, n], [n, p]])


def gamma_metzler(a) -> np.ndarray:
    """Min-Metzler representation of a square matrix.

    The diagonal of ``a`` stays on the diagonal blocks; off-diagonal entries are
    split into positive parts (diagonal blocks) and negative parts (off blocks).
    """
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"gamma_metzler needs a square matrix, got {a.shape}")
    dg = np.diag(np.diag(a))
    off = a - dg
    top = dg + pos_part(off)
    return np.block([[top, neg_part(off)], [neg_part(off), top]])


def is_metzler(a) -> bool:
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    off = a - np.diag(np.diag(a))
    return bool(np.all(off >= 0))
