"""Distance, closest points, and midpoint for pairs of flats.

The midpoint of two flats is the minimum-norm least-squares solution of the
stacked implicit system

    [C_f]       [e_f]
    [C_g] x  =  [e_g]

With row-orthonormal C blocks, ||C x - e|| is the distance from x to the
flat, so the minimizer is the point minimizing the sum of squared distances
to both flats: the geometric midpoint of the closest-point segment. The
closest points themselves are the projections of the midpoint onto each
flat, and the pair distance is the gap between them.

For flats in general position with k_f + k_g < d the minimizer is unique.
Parallel-ish flats make the stacked system rank deficient; the minimum-norm
midpoint is still a valid representative of the midpoint set and the result
carries ``degenerate=True``. (A uniqueness claim without this caveat fails
exactly in that case.)

The batch path packs all per-flat bases into dense arrays and runs a kernel
(numba or numpy, see _backend) over an explicit pair-index array, so the
same machinery serves the O(n^2) enumeration and Monte Carlo paired draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .geometry import Flat
from .numerics import RANK_TOL, span_and_complement
from ._backend import get_pair_kernel


@dataclass(frozen=True)
class PairProjection:
    i: int
    j: int
    midpoint: np.ndarray
    distance: float
    closest_i: np.ndarray
    closest_j: np.ndarray
    degenerate: bool = False


def _pack(flats: list[Flat], rank_tol: float):
    """Per-flat orthonormal data for the kernel.

    Returns (V, e, base, kk) where V[i] is a d x d orthonormal matrix whose
    first kk[i] rows span the directions and the rest span the complement,
    e[i, :d-kk[i]] = C_i @ base_i, and base[i] is the base point.
    """
    n = len(flats)
    d = flats[0].d
    V = np.zeros((n, d, d))
    e = np.zeros((n, d))
    base = np.zeros((n, d))
    kk = np.zeros(n, dtype=np.int64)
    for i, f in enumerate(flats):
        if f.d != d:
            raise InvalidInputError(
                f"flat {i} lives in R^{f.d}, expected R^{d}")
        span, comp = span_and_complement(f.directions, rank_tol)
        k = span.shape[0]
        V[i, :k] = span
        V[i, k:] = comp
        e[i, : d - k] = comp @ f.base
        base[i] = f.base
        kk[i] = k
    return V, e, base, kk


def project_pairs(
    flats: list[Flat],
    pairs: np.ndarray,
    rank_tol: float = RANK_TOL,
):
    """Array fast path: pair projections for an explicit (m, 2) index array.

    Returns (midpoints, distances, closest_a, closest_b, degenerate) as
    arrays aligned with ``pairs``. Used by all_pairs and by the Monte Carlo
    estimators, which would drown in per-pair object overhead otherwise.
    """
    if len(flats) < 1:
        raise InvalidInputError("need at least one flat")
    pairs = np.ascontiguousarray(np.asarray(pairs, dtype=np.int64))
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise InvalidInputError("pairs must be an (m, 2) index array")
    V, e, base, kk = _pack(flats, rank_tol)
    m = pairs.shape[0]
    d = V.shape[1]
    mid = np.empty((m, d))
    dist = np.empty(m)
    ca = np.empty((m, d))
    cb = np.empty((m, d))
    deg = np.zeros(m, dtype=np.bool_)
    if m:
        kernel = get_pair_kernel()
        kernel(V, e, base, kk, pairs[:, 0].copy(), pairs[:, 1].copy(),
               float(rank_tol), mid, dist, ca, cb, deg)
    return mid, dist, ca, cb, deg


def pair_projection(f: Flat, g: Flat, rank_tol: float = RANK_TOL) -> PairProjection:
    """Midpoint, distance, and closest points for one pair of flats."""
    if f.d != g.d:
        raise InvalidInputError(
            f"ambient dimensions differ: {f.d} vs {g.d}")
    mid, dist, ca, cb, deg = project_pairs([f, g], np.array([[0, 1]]), rank_tol)
    return PairProjection(0, 1, mid[0], float(dist[0]), ca[0], cb[0], bool(deg[0]))


def all_pairs(flats: list[Flat], rank_tol: float = RANK_TOL) -> list[PairProjection]:
    """All n(n-1)/2 pair projections, ordered lexicographically by (i, j)."""
    n = len(flats)
    if n < 2:
        raise InvalidInputError("need at least two flats")
    idx = lexicographic_pairs(n)
    mid, dist, ca, cb, deg = project_pairs(flats, idx, rank_tol)
    return [
        PairProjection(int(idx[t, 0]), int(idx[t, 1]), mid[t], float(dist[t]),
                       ca[t], cb[t], bool(deg[t]))
        for t in range(idx.shape[0])
    ]


def lexicographic_pairs(n: int) -> np.ndarray:
    """(n(n-1)/2, 2) index array with i < j in lexicographic order."""
    iu = np.triu_indices(n, k=1)
    return np.column_stack(iu).astype(np.int64)
