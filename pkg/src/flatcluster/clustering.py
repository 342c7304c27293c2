"""Flat clustering from pairwise midpoints: filter, link, prune, vote.

Pipeline: compute all pair projections, keep pairs with distance at most
the accept threshold, single-linkage the accepted midpoints at the link
threshold (two groups merge when any midpoint of one is within the link
threshold of any midpoint of the other), prune groups whose midpoint count
is not strictly greater than M, and finally assign each flat to the
surviving cluster holding the majority of its accepted midpoints, ties
going to the lowest cluster index.

The linkage result is the transitive closure of the within-threshold
relation, i.e. connected components of the threshold graph, which is a
partition independent of any processing order. It is computed by a
breadth-first sweep with vectorized distance blocks; a brute-force
disjoint-set pass over all edges yields the identical partition and serves
as the test oracle.

Two variants from the same building blocks:

* cluster_recursive peels off the largest cluster each round, removes its
  member flats, and repeats with an adaptive size floor (remaining flats
  divided by remaining clusters when the cluster count is known).
* cluster_sampled clusters a uniform random subset and assigns every
  unsampled flat to the nearest cluster center if that flat-to-point
  distance is within the ball radius, labeling it unassigned otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InvalidInputError
from .geometry import Flat, flat_point_distance
from .numerics import RANK_TOL
from .pairwise import PairProjection, all_pairs


@dataclass(frozen=True)
class ClusterParams:
    """Thresholds for Algorithm parameters.

    accept_threshold and link_threshold default to 2 * ball_radius (the
    within-ball distance bound). min_cluster_size is the pruning floor M;
    clusters survive only with midpoint count strictly greater than M, so
    M = 0 keeps everything.
    """

    accept_threshold: float | None = None
    link_threshold: float | None = None
    min_cluster_size: int = 1
    ball_radius: float = 1.0

    def __post_init__(self):
        if not self.ball_radius > 0:
            raise InvalidInputError("ball_radius must be positive")
        if self.accept_threshold is None:
            object.__setattr__(self, "accept_threshold", 2.0 * self.ball_radius)
        if self.link_threshold is None:
            object.__setattr__(self, "link_threshold", 2.0 * self.ball_radius)
        if not (self.accept_threshold >= 0 and self.link_threshold >= 0):
            raise InvalidInputError("thresholds must be nonnegative")
        if self.min_cluster_size < 0:
            raise InvalidInputError("min_cluster_size must be >= 0")


@dataclass(frozen=True)
class Cluster:
    """One cluster: flat membership plus the midpoints that define it."""

    members: tuple[int, ...]
    midpoints: np.ndarray
    center: np.ndarray
    size: int  # midpoint count, the pruning quantity


@dataclass(frozen=True)
class Clustering:
    clusters: tuple[Cluster, ...]
    accepted_pairs: int
    rejected_pairs: int
    unassigned: tuple[int, ...] = ()


def filter_pairs(pairs: list[PairProjection], params: ClusterParams) -> list[PairProjection]:
    """Pairs with distance <= accept_threshold, input order preserved."""
    thr = params.accept_threshold
    return [p for p in pairs if p.distance <= thr]


def _link_components(points: np.ndarray, thr: float) -> tuple[np.ndarray, int]:
    """Connected components of the pairwise <= thr graph.

    Labels are assigned in order of each component's smallest point index,
    which makes the output canonical. Frontier expansion touches every
    point once, with cdist blocks bounded to keep memory flat.
    """
    n = points.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    unvisited = np.ones(n, dtype=bool)
    block = 256
    comp = 0
    for s in range(n):
        if not unvisited[s]:
            continue
        unvisited[s] = False
        labels[s] = comp
        frontier = points[s : s + 1]
        while frontier.shape[0]:
            cand = np.flatnonzero(unvisited)
            if cand.size == 0:
                break
            hit_mask = np.zeros(cand.size, dtype=bool)
            for lo in range(0, frontier.shape[0], block):
                dblock = cdist(frontier[lo : lo + block], points[cand])
                hit_mask |= (dblock <= thr).any(axis=0)
            hit = cand[hit_mask]
            if hit.size == 0:
                break
            labels[hit] = comp
            unvisited[hit] = False
            frontier = points[hit]
        comp += 1
    return labels, comp


def union_find_cluster(
    accepted: list[PairProjection], params: ClusterParams
) -> Clustering:
    """Single-linkage grouping of accepted midpoints, before any pruning.

    Every accepted midpoint lands in exactly one group; flats are attached
    by the same majority-vote rule used post-pruning. accepted_pairs counts
    the inputs; rejected_pairs is zero here because rejected pairs never
    reach this stage.
    """
    groups = _linked_groups(accepted, params.link_threshold)
    clusters = _build_clusters(accepted, groups)
    return Clustering(tuple(clusters), len(accepted), 0)


def _linked_groups(
    accepted: list[PairProjection], link_threshold: float
) -> list[np.ndarray]:
    """Indices into `accepted` per component, ordered by smallest index."""
    if not accepted:
        return []
    mids = np.array([p.midpoint for p in accepted])
    labels, ncomp = _link_components(mids, link_threshold)
    return [np.flatnonzero(labels == c) for c in range(ncomp)]


def _build_clusters(
    accepted: list[PairProjection], groups: list[np.ndarray]
) -> list[Cluster]:
    """Attach flats to midpoint groups by majority vote over accepted
    midpoints; a tie picks the lowest cluster index, a flat with no
    midpoint in any surviving group is left out."""
    if not groups:
        return []
    max_flat = max(max(p.i, p.j) for p in accepted)
    votes = np.zeros((max_flat + 1, len(groups)), dtype=np.int64)
    for c, grp in enumerate(groups):
        for t in grp:
            votes[accepted[t].i, c] += 1
            votes[accepted[t].j, c] += 1
    members: list[list[int]] = [[] for _ in groups]
    for f in range(max_flat + 1):
        total = votes[f].sum()
        if total == 0:
            continue
        members[int(np.argmax(votes[f]))].append(f)  # argmax takes lowest on tie
    out = []
    for c, grp in enumerate(groups):
        mids = np.array([accepted[t].midpoint for t in grp])
        out.append(
            Cluster(
                members=tuple(members[c]),
                midpoints=mids,
                center=mids.mean(axis=0),
                size=int(grp.size),
            )
        )
    return out


def _cluster_core(
    flats: list[Flat],
    params: ClusterParams,
    floor: float,
    rank_tol: float,
    pairs: list[PairProjection] | None = None,
) -> Clustering:
    if len(flats) < 2:
        raise InvalidInputError("clustering needs at least two flats")
    if pairs is None:
        pairs = all_pairs(flats, rank_tol)
    accepted = filter_pairs(pairs, params)
    rejected = len(pairs) - len(accepted)
    groups = [g for g in _linked_groups(accepted, params.link_threshold)
              if g.size > floor]
    clusters = _build_clusters(accepted, groups)
    return Clustering(tuple(clusters), len(accepted), rejected)


def cluster(
    flats: list[Flat],
    params: ClusterParams,
    rank_tol: float = RANK_TOL,
    *,
    pairs: list[PairProjection] | None = None,
) -> Clustering:
    """Full pipeline: all pairs -> filter -> link -> prune (> M) -> vote.

    `pairs` may carry a precomputed all_pairs(flats) result to avoid
    recomputing it when the caller also needs the raw projections.
    """
    return _cluster_core(flats, params, float(params.min_cluster_size),
                         rank_tol, pairs)


def cluster_recursive(
    flats: list[Flat],
    params: ClusterParams,
    num_clusters: int | None = None,
    rank_tol: float = RANK_TOL,
) -> Clustering:
    """Peel off the largest cluster per round, then re-cluster the rest.

    The pruning floor per round is remaining_flats / remaining_clusters when
    num_clusters is given (never below min_cluster_size), else
    min_cluster_size. Stops when a round yields nothing above the floor,
    fewer than two flats remain, or num_clusters clusters were found.
    accepted/rejected counts accumulate over rounds.
    """
    if len(flats) < 2:
        raise InvalidInputError("clustering needs at least two flats")
    remaining = list(range(len(flats)))
    found: list[Cluster] = []
    accepted_total = 0
    rejected_total = 0
    while len(remaining) >= 2:
        if num_clusters is not None:
            left = num_clusters - len(found)
            if left <= 0:
                break
            floor = max(len(remaining) / left, float(params.min_cluster_size))
        else:
            floor = float(params.min_cluster_size)
        sub = _cluster_core([flats[i] for i in remaining], params, floor, rank_tol)
        accepted_total += sub.accepted_pairs
        rejected_total += sub.rejected_pairs
        if not sub.clusters:
            break
        best = max(sub.clusters, key=lambda c: c.size)
        if not best.members:
            break
        members = tuple(remaining[i] for i in best.members)
        found.append(Cluster(members, best.midpoints, best.center, best.size))
        taken = set(members)
        remaining = [i for i in remaining if i not in taken]
    return Clustering(tuple(found), accepted_total, rejected_total)


def cluster_sampled(
    flats: list[Flat],
    params: ClusterParams,
    sample_size: int,
    seed: int,
    rank_tol: float = RANK_TOL,
) -> Clustering:
    """Cluster a uniform sample, then attach unsampled flats by center.

    An unsampled flat joins the cluster whose center estimate is nearest in
    flat-to-point distance, provided that distance is <= ball_radius;
    otherwise it is reported in `unassigned`.
    """
    n = len(flats)
    if n < 2:
        raise InvalidInputError("clustering needs at least two flats")
    if not 2 <= sample_size <= n:
        raise InvalidInputError(
            f"sample_size must be in [2, {n}], got {sample_size}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    sample = np.sort(rng.choice(n, size=sample_size, replace=False))
    sub = cluster([flats[i] for i in sample], params, rank_tol)
    members = [[int(sample[m]) for m in c.members] for c in sub.clusters]
    unassigned: list[int] = []
    sampled = set(sample.tolist())
    rest = [i for i in range(n) if i not in sampled]
    for i in rest:
        if not sub.clusters:
            unassigned.append(i)
            continue
        dists = [flat_point_distance(flats[i], c.center) for c in sub.clusters]
        best = int(np.argmin(dists))
        if dists[best] <= params.ball_radius:
            members[best].append(i)
        else:
            unassigned.append(i)
    clusters = tuple(
        Cluster(tuple(sorted(members[c])), sc.midpoints, sc.center, sc.size)
        for c, sc in enumerate(sub.clusters)
    )
    return Clustering(clusters, sub.accepted_pairs, sub.rejected_pairs,
                      tuple(unassigned))
