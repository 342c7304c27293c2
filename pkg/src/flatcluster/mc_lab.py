"""Monte Carlo estimators for the flat-distance statistics.

Every estimator draws from a single generator seeded by its `seed`
argument, with a fixed per-sample draw order, so results are a pure
function of (parameters, seed). Pair distances run through the same
projection kernel the clustering pipeline uses; flats are drawn and
evaluated in bounded chunks so memory stays flat at any sample count.

Statistics covered: the mean midpoint-gap integrals S0 (both flats in one
unit ball), S1 (flats through the points +-1 on an axis) and S_delta
(through +-delta, which scales as delta * S1, a pointwise identity when
directions are shared between the two scales), the cross-pair rejection
rate Pr(gap > 2), midpoint concentration about the ball center, the
midpoint reach probability Pr(||midpoint|| <= r0), the classical
half-probability for chords of a disk, the tangent-pair intersection
reach, and the cross/within separation ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import InvalidInputError
from .generator import (
    sample_cluster_flat,
    sample_disk_chord_line,
    sample_flat_through_point,
    sample_tangent_line_pair,
    tangent_pair_intersection,
)
from .pairwise import project_pairs

Z99 = float(norm.ppf(0.995))  # two-sided 99% normal quantile

_MIN_SAMPLES = 100


@dataclass(frozen=True)
class McEstimate:
    """One Monte Carlo result: point value, its standard error, and the
    (samples, seed, label) needed to reproduce or cite it."""

    value: float
    stderr: float
    samples: int
    seed: int
    label: str

    def __post_init__(self):
        if self.samples < _MIN_SAMPLES:
            raise InvalidInputError(f"need at least {_MIN_SAMPLES} samples")
        if not (np.isfinite(self.value) and np.isfinite(self.stderr) and self.stderr >= 0):
            raise InvalidInputError("value and stderr must be finite, stderr >= 0")

    @property
    def ci99(self) -> tuple[float, float]:
        return (self.value - Z99 * self.stderr, self.value + Z99 * self.stderr)


@dataclass(frozen=True)
class ConcentrationReport:
    """Midpoint concentration summary, averaged over repetitions.

    variance is the trace of the empirical midpoint covariance;
    variance_per_coord divides it by the ambient dimension (mean
    per-coordinate variance), reported alongside because the trace sums
    d growing-count coordinates and the two move differently with d.
    """

    mean_offset: float
    variance: float
    variance_per_coord: float
    per_rep_mean_offsets: np.ndarray
    per_rep_variances: np.ndarray
    d: int
    k: int
    sigma: float
    n_flats: int
    samples: int
    seed: int


def _estimate(values: np.ndarray, seed: int, label: str) -> McEstimate:
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    stderr = float(values.std(ddof=1) / np.sqrt(n))
    return McEstimate(float(values.mean()), stderr, n, seed, label)


def _chunk_len(d: int) -> int:
    # bound the packed (2b, d, d) kernel input to a few tens of MB
    return max(16, min(4096, 2_000_000 // (d * d)))


def _pair_stream(draw_pair, samples: int, d: int):
    """Distances, midpoint norms, and degeneracy flags for `samples`
    pairs produced by draw_pair(), evaluated in chunks. Chunking never
    changes the draw order: flats are drawn sample by sample."""
    dist = np.empty(samples)
    midnorm = np.empty(samples)
    degen = np.zeros(samples, dtype=bool)
    done = 0
    step = _chunk_len(d)
    while done < samples:
        b = min(step, samples - done)
        flats = []
        for _ in range(b):
            f, g = draw_pair()
            flats.append(f)
            flats.append(g)
        idx = np.arange(2 * b, dtype=np.int64).reshape(b, 2)
        mid, dd, _ca, _cb, dg = project_pairs(flats, idx)
        dist[done : done + b] = dd
        midnorm[done : done + b] = np.linalg.norm(mid, axis=1)
        degen[done : done + b] = dg
        done += b
    return dist, midnorm, degen


def _check_common(d: int, k: int, sigma: float, samples: int, min_samples: int = _MIN_SAMPLES):
    if samples < min_samples:
        raise InvalidInputError(f"need at least {min_samples} samples")
    if not 1 <= k <= d - 1:
        raise InvalidInputError("need 1 <= k <= d - 1")
    if not sigma > 0:
        raise InvalidInputError("sigma must be positive")


def estimate_S0(d: int, k: int, sigma: float, samples: int, seed: int) -> McEstimate:
    """Mean midpoint gap for two flats drawn in the origin unit ball."""
    _check_common(d, k, sigma, samples)
    if k > d // 2:
        raise InvalidInputError("need k <= d // 2 so two spans stay disjoint")
    rng = np.random.default_rng(seed)
    origin = np.zeros(d)

    def draw_pair():
        return (
            sample_cluster_flat(origin, k, d, sigma, 1.0, rng),
            sample_cluster_flat(origin, k, d, sigma, 1.0, rng),
        )

    dist, _, _ = _pair_stream(draw_pair, samples, d)
    return _estimate(dist, seed, "S0")


def _through_point_mean(
    delta: float, d: int, k: int, sigma: float, samples: int, seed: int, label: str
) -> McEstimate:
    _check_common(d, k, sigma, samples)
    rng = np.random.default_rng(seed)

    def draw_pair():
        return (
            sample_flat_through_point(-delta, k, d, sigma, rng),
            sample_flat_through_point(+delta, k, d, sigma, rng),
        )

    dist, _, _ = _pair_stream(draw_pair, samples, d)
    return _estimate(dist, seed, label)


def estimate_S1(d: int, k: int, sigma: float, samples: int, seed: int) -> McEstimate:
    """Mean gap for independent flats through -1 and +1 on the first axis."""
    return _through_point_mean(1.0, d, k, sigma, samples, seed, "S1")


def estimate_S_delta(
    delta: float, d: int, k: int, sigma: float, samples: int, seed: int
) -> McEstimate:
    """Mean gap for flats through -delta and +delta; scales as delta * S1."""
    if not delta > 0:
        raise InvalidInputError("delta must be positive")
    return _through_point_mean(delta, d, k, sigma, samples, seed, "S_delta")


def paired_delta_distances(
    delta: float, d: int, k: int, sigma: float, samples: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample gaps at offsets +-delta and +-1 with shared directions.

    Each sample replays one child stream twice, so the delta-pair and the
    unit-pair differ only in base points; the returned arrays then satisfy
    dist_delta = delta * dist_1 exactly (to rounding), sample by sample.
    """
    if not delta > 0:
        raise InvalidInputError("delta must be positive")
    _check_common(d, k, sigma, samples)
    children = np.random.SeedSequence(seed).spawn(samples)
    dist_d = np.empty(samples)
    dist_1 = np.empty(samples)
    done = 0
    step = max(8, _chunk_len(d) // 2)
    while done < samples:
        b = min(step, samples - done)
        flats = []
        for t in range(b):
            child = children[done + t]
            rng_unit = np.random.default_rng(child)
            flats.append(sample_flat_through_point(-1.0, k, d, sigma, rng_unit))
            flats.append(sample_flat_through_point(+1.0, k, d, sigma, rng_unit))
            rng_delta = np.random.default_rng(child)
            flats.append(sample_flat_through_point(-delta, k, d, sigma, rng_delta))
            flats.append(sample_flat_through_point(+delta, k, d, sigma, rng_delta))
        rows = np.arange(b, dtype=np.int64) * 4
        idx = np.concatenate(
            [
                np.column_stack([rows, rows + 1]),
                np.column_stack([rows + 2, rows + 3]),
            ]
        )
        _, dd, _ca, _cb, _dg = project_pairs(flats, idx)
        dist_1[done : done + b] = dd[:b]
        dist_d[done : done + b] = dd[b:]
        done += b
    return dist_d, dist_1


def estimate_rejection_fraction(
    delta: float, d: int, k: int, sigma: float, samples: int, seed: int
) -> McEstimate:
    """Pr(gap > 2) for cross pairs through -delta and +delta: the fraction
    a threshold-2 acceptance rule drops."""
    if not delta > 1:
        raise InvalidInputError("delta must exceed 1")
    _check_common(d, k, sigma, samples)
    rng = np.random.default_rng(seed)

    def draw_pair():
        return (
            sample_flat_through_point(-delta, k, d, sigma, rng),
            sample_flat_through_point(+delta, k, d, sigma, rng),
        )

    dist, _, _ = _pair_stream(draw_pair, samples, d)
    return _estimate((dist > 2.0).astype(np.float64), seed, "rejection_fraction")


def midpoint_concentration(
    d: int, k: int, sigma: float, n_flats: int, samples: int, seed: int
) -> ConcentrationReport:
    """Empirical midpoint mean offset and covariance trace, averaged over
    `samples` independent repetitions of n_flats ball flats."""
    if n_flats < 3:
        raise InvalidInputError("need n_flats >= 3")
    if samples < 1:
        raise InvalidInputError("need at least one repetition")
    _check_common(d, k, sigma, _MIN_SAMPLES)  # validates d, k, sigma only
    rng = np.random.default_rng(seed)
    origin = np.zeros(d)
    rows, cols = np.triu_indices(n_flats, 1)
    idx = np.column_stack([rows, cols]).astype(np.int64)
    offsets = np.empty(samples)
    traces = np.empty(samples)
    for rep in range(samples):
        flats = [
            sample_cluster_flat(origin, k, d, sigma, 1.0, rng)
            for _ in range(n_flats)
        ]
        mid, _dd, _ca, _cb, _dg = project_pairs(flats, idx)
        offsets[rep] = np.linalg.norm(mid.mean(axis=0))
        traces[rep] = float(mid.var(axis=0, ddof=1).sum())
    offsets.setflags(write=False)
    traces.setflags(write=False)
    return ConcentrationReport(
        mean_offset=float(offsets.mean()),
        variance=float(traces.mean()),
        variance_per_coord=float(traces.mean() / d),
        per_rep_mean_offsets=offsets,
        per_rep_variances=traces,
        d=d, k=k, sigma=sigma, n_flats=n_flats, samples=samples, seed=seed,
    )


def disk_intersection_probability(samples: int, seed: int) -> McEstimate:
    """Probability that two uniform chords of the unit disk cross inside
    it. Parallel draws (degenerate, measure zero) count as not inside."""
    if samples < 10_000:
        raise InvalidInputError("need at least 10^4 samples")
    rng = np.random.default_rng(seed)

    def draw_pair():
        return sample_disk_chord_line(rng), sample_disk_chord_line(rng)

    _, midnorm, degen = _pair_stream(draw_pair, samples, 2)
    inside = (~degen) & (midnorm <= 1.0)
    return _estimate(inside.astype(np.float64), seed, "disk_intersection")


def tangent_pair_reach(samples: int, seed: int, r0: float) -> McEstimate:
    """Pr(r <= r0) where r is the intersection radius of a random
    unit-circle tangent pair; r = 1 / sin(phi / 2) for meeting angle phi."""
    if not r0 > 1:
        raise InvalidInputError("r0 must exceed 1 (tangent pairs never meet closer)")
    if samples < _MIN_SAMPLES:
        raise InvalidInputError(f"need at least {_MIN_SAMPLES} samples")
    rng = np.random.default_rng(seed)
    hits = np.empty(samples)
    for t in range(samples):
        f1, f2, phi = sample_tangent_line_pair(rng)
        r = float(np.linalg.norm(tangent_pair_intersection(f1, f2, phi)))
        hits[t] = 1.0 if r <= r0 else 0.0
    return _estimate(hits, seed, "tangent_reach")


def midpoint_reach_bound(
    d: int, k: int, sigma: float, samples: int, seed: int, r0: float
) -> McEstimate:
    """Pr(||midpoint|| <= r0) for pairs of flats meeting the origin unit
    ball."""
    if not r0 > 0:
        raise InvalidInputError("r0 must be positive")
    _check_common(d, k, sigma, samples)
    rng = np.random.default_rng(seed)
    origin = np.zeros(d)

    def draw_pair():
        return (
            sample_cluster_flat(origin, k, d, sigma, 1.0, rng),
            sample_cluster_flat(origin, k, d, sigma, 1.0, rng),
        )

    _, midnorm, _ = _pair_stream(draw_pair, samples, d)
    return _estimate((midnorm <= r0).astype(np.float64), seed, "midpoint_reach")


def separation_ratio(
    delta: float,
    d: int,
    k: int,
    sigma: float,
    samples: int,
    seed: int,
    eps: float = 1.0,
) -> McEstimate:
    """Fraction of samples where cross-cluster distance divided by
    within-cluster distance reaches delta - eps.

    Within pair: two flats in the origin unit ball. Cross pair: one flat
    in each of the balls centered at -delta and +delta on the first axis.
    delta <= 1 leaves those balls touching or overlapping, where the gate
    is vacuous, so it is rejected.
    """
    if not delta > 1:
        raise InvalidInputError("delta must exceed 1 (balls must separate)")
    if not eps > 0:
        raise InvalidInputError("eps must be positive")
    _check_common(d, k, sigma, samples)
    rng = np.random.default_rng(seed)
    origin = np.zeros(d)
    center_lo = np.zeros(d)
    center_lo[0] = -delta
    center_hi = np.zeros(d)
    center_hi[0] = +delta
    ratios = np.empty(samples)
    done = 0
    step = max(8, _chunk_len(d) // 2)
    while done < samples:
        b = min(step, samples - done)
        flats = []
        for _ in range(b):
            flats.append(sample_cluster_flat(origin, k, d, sigma, 1.0, rng))
            flats.append(sample_cluster_flat(origin, k, d, sigma, 1.0, rng))
            flats.append(sample_cluster_flat(center_lo, k, d, sigma, 1.0, rng))
            flats.append(sample_cluster_flat(center_hi, k, d, sigma, 1.0, rng))
        rows = np.arange(b, dtype=np.int64) * 4
        idx = np.concatenate(
            [
                np.column_stack([rows, rows + 1]),
                np.column_stack([rows + 2, rows + 3]),
            ]
        )
        _, dd, _ca, _cb, _dg = project_pairs(flats, idx)
        within = dd[:b]
        cross = dd[b:]
        # 2k >= d makes within-pairs intersect (gap 0); inf ratio is correct
        with np.errstate(divide="ignore"):
            ratios[done : done + b] = cross / within
        done += b
    return _estimate((ratios >= delta - eps).astype(np.float64), seed,
                     "separation_ratio")
