"""Dense small-matrix primitives: least squares, orthonormalization, rank.

Everything downstream (flat conversion, pair projection, clustering) reduces
to least-squares solves and orthonormal bases of small dense matrices, at
most 2(d-k) x d. All solvers here go through the SVD rather than the normal
equations: the systems are tiny, and the SVD gives the minimum-norm solution
and a numerical rank in one pass, which the degenerate-pair handling needs.

Rank decisions use a relative tolerance: singular values are kept while
s > rank_tol * s_max. The default 1e-9 only guards deliberately degenerate
inputs; data in general position never comes close.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError

RANK_TOL = 1e-9


class LstsqResult(NamedTuple):
    x: np.ndarray
    residual: float
    rank: int


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InvalidInputError(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix entries must be finite")
    return A


def _as_vector(b, length: int | None = None) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.ndim != 1:
        raise InvalidInputError(f"expected a 1-D vector, got shape {b.shape}")
    if length is not None and b.shape[0] != length:
        raise InvalidInputError(f"vector length {b.shape[0]} != expected {length}")
    if not np.all(np.isfinite(b)):
        raise InvalidInputError("vector entries must be finite")
    return b


def least_squares(A, b, rank_tol: float = RANK_TOL) -> LstsqResult:
    """Minimum-norm least-squares solution of A x = b.

    Returns (x, residual, rank) where x minimizes ||A x - b||, residual is
    that minimal value, and rank is the numerical rank of A at rank_tol.
    For rank-deficient A the minimizer set is an affine subspace; x is its
    minimum-norm element (the pseudo-inverse solution).
    """
    A = _as_matrix(A)
    b = _as_vector(b, A.shape[0])
    if not rank_tol > 0:
        raise InvalidInputError("rank_tol must be positive")
    u, s, vt = np.linalg.svd(A, full_matrices=False)
    smax = s[0] if s.size else 0.0
    keep = s > rank_tol * smax
    rank = int(np.count_nonzero(keep))
    if rank == 0:
        x = np.zeros(A.shape[1])
    else:
        x = vt[keep].T @ ((u[:, keep].T @ b) / s[keep])
    residual = float(np.linalg.norm(A @ x - b))
    return LstsqResult(x, residual, rank)


def orthonormalize(vectors, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Returns a (r, d) array whose rows are orthonormal and span the same
    subspace as the input; linearly dependent inputs are dropped silently.
    Empty input yields an empty (0, 0) array.
    """
    vecs = [np.asarray(v, dtype=float) for v in vectors]
    if not vecs:
        return np.empty((0, 0))
    d = vecs[0].shape[-1]
    for v in vecs:
        if v.ndim != 1 or v.shape[0] != d:
            raise InvalidInputError("all vectors must be 1-D of equal length")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("vector entries must be finite")
    scale = max(float(np.linalg.norm(v)) for v in vecs)
    if scale == 0.0:
        return np.empty((0, d))
    basis: list[np.ndarray] = []
    for v in vecs:
        w = v.copy()
        for _ in range(2):  # second pass restores orthogonality lost to cancellation
            for q in basis:
                w -= (q @ w) * q
        norm = float(np.linalg.norm(w))
        if norm <= rank_tol * scale:
            continue  # dependent on the basis so far
        basis.append(w / norm)
    if not basis:
        return np.empty((0, d))
    return np.array(basis)


def _canonical_signs(rows: np.ndarray) -> np.ndarray:
    """Flip each row so its largest-magnitude entry is positive.

    SVD-derived bases have an arbitrary sign per vector; fixing it makes
    derived representations reproducible across runs and backends.
    """
    if rows.size == 0:
        return rows
    idx = np.argmax(np.abs(rows), axis=1)
    signs = np.sign(rows[np.arange(rows.shape[0]), idx])
    signs[signs == 0] = 1.0
    return rows * signs[:, None]


def nullspace_basis(M, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the nullspace of M, as rows of a (c - rank, c) array."""
    M = _as_matrix(M)
    _, s, vt = np.linalg.svd(M, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.count_nonzero(s > rank_tol * smax))
    return _canonical_signs(vt[rank:].copy())


def span_and_complement(M, rank_tol: float = RANK_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases (rows) of the row span of M and of its orthogonal
    complement, from a single SVD. Raises no error on rank deficiency; the
    split row count follows the numerical rank.
    """
    M = _as_matrix(M)
    _, s, vt = np.linalg.svd(M, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.count_nonzero(s > rank_tol * smax))
    vt = _canonical_signs(vt.copy())
    return vt[:rank], vt[rank:]
