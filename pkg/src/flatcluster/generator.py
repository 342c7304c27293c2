"""Synthetic dataset generation: Gaussian flats conditioned on a ball.

A cluster flat is a random k-flat whose span directions have i.i.d.
Gaussian entries and whose base point is Gaussian about the cluster
center, conditioned on the flat meeting the unit-radius ball around that
center. Rejection sampling expresses that law directly but stops making
draws in high ambient dimension, where nearly every unconditioned flat
misses the ball. sample_cluster_flat therefore samples the conditional
law in closed form:

* the in-span offset is unconstrained, N(0, sigma^2 I_k) in span
  coordinates;
* the offset normal to the span has an isotropic direction and a radial
  part whose unconditioned law is sigma * chi(d - k); conditioning on
  intersection truncates that radius to [0, radius], done exactly by
  inverse-CDF through the regularized incomplete gamma function.

Both routes draw from the identical distribution; the truncated-radius
route never rejects. When even the truncation mass underflows to zero
(sigma enormous relative to the ball) the configuration is refused rather
than silently mis-sampled.

Also here: flats through a point at distance r from the origin (the
probe family for distance-scaling studies; their directions stay raw,
not orthonormalized, so that two draws from identical generator state
differ only in the base point), uniform-measure chord lines of the unit
disk, and tangent line pairs with a prescribed intersection angle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaincinv

from .errors import ConfigurationError, DegenerateFlatError, InvalidInputError
from .geometry import Flat, flat_point_distance
from .numerics import RANK_TOL, span_and_complement

_MAX_REDRAWS = 100
_BALL_SLACK = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GenConfig:
    """Dataset recipe: m = len(centers) clusters of per_cluster flats each.

    delta defaults to the minimum pairwise center distance; passing it
    explicitly asserts the centers are at least that far apart. mu is the
    direction-coefficient mean and only 0.0 is supported: the sampling
    operations draw zero-mean entries, and accepting a nonzero mean here
    while ignoring it would corrupt downstream statistics silently.
    """

    d: int
    k: int
    centers: np.ndarray
    per_cluster: int
    sigma: float = 1.0
    mu: float = 0.0
    radius: float = 1.0
    delta: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.d < 2:
            raise InvalidInputError("ambient dimension must be >= 2")
        if not 1 <= self.k <= self.d // 2:
            raise InvalidInputError(
                f"flat dimension must satisfy 1 <= k <= d//2, got k={self.k}, d={self.d}")
        centers = np.asarray(self.centers, dtype=np.float64)
        if centers.ndim != 2 or centers.shape[0] < 1 or centers.shape[1] != self.d:
            raise InvalidInputError("centers must be a (m, d) array with m >= 1")
        if not np.all(np.isfinite(centers)):
            raise InvalidInputError("centers must be finite")
        object.__setattr__(self, "centers", _readonly(centers))
        if self.per_cluster < 1:
            raise InvalidInputError("per_cluster must be >= 1")
        if not self.sigma > 0:
            raise InvalidInputError("sigma must be positive")
        if not self.radius > 0:
            raise InvalidInputError("radius must be positive")
        if self.mu != 0.0:
            raise ConfigurationError(
                "nonzero coefficient mean is not supported by the samplers")
        m = centers.shape[0]
        if m >= 2:
            diff = centers[:, None, :] - centers[None, :, :]
            dist = np.sqrt((diff**2).sum(axis=2))
            min_sep = float(dist[np.triu_indices(m, 1)].min())
        else:
            min_sep = 0.0
        if self.delta is None:
            object.__setattr__(self, "delta", min_sep)
        elif m >= 2 and min_sep < self.delta:
            raise InvalidInputError(
                f"centers are {min_sep:.6g} apart, below the declared delta {self.delta:.6g}")

    @property
    def num_clusters(self) -> int:
        return int(self.centers.shape[0])

    @property
    def n_flats(self) -> int:
        return self.num_clusters * self.per_cluster


@dataclass(frozen=True)
class LabeledDataset:
    """Generated flats with their ground-truth cluster labels."""

    flats: list[Flat]
    true_labels: np.ndarray
    config: GenConfig

    def __post_init__(self):
        labels = np.asarray(self.true_labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size != len(self.flats):
            raise InvalidInputError("one label per flat required")
        m = self.config.num_clusters
        if labels.size and not ((labels >= 0) & (labels < m)).all():
            raise InvalidInputError("labels must index into config.centers")
        labels = np.array(labels, dtype=np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "true_labels", labels)
        r = self.config.radius + _BALL_SLACK
        for f, lab in zip(self.flats, labels):
            if flat_point_distance(f, self.config.centers[lab]) > r:
                raise InvalidInputError(
                    "flat does not meet the ball of its labeled cluster")


def _draw_span_matrix(k: int, d: int, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """(k, d) Gaussian matrix, redrawn on rank deficiency (probability 0)."""
    for _ in range(_MAX_REDRAWS):
        G = sigma * rng.standard_normal((k, d))
        s = np.linalg.svd(G, compute_uv=False)
        if s[-1] > RANK_TOL * s[0]:
            return G
    raise DegenerateFlatError("could not draw independent directions")


def sample_cluster_flat(
    center: np.ndarray,
    k: int,
    d: int,
    sigma: float,
    radius: float,
    rng: np.random.Generator,
) -> Flat:
    """One flat from the ball-conditioned Gaussian law around `center`.

    Draw order is fixed (directions, in-span offset, normal direction,
    truncation uniform) so equal generator states yield equal flats.
    """
    center = np.asarray(center, dtype=np.float64)
    if center.shape != (d,):
        raise InvalidInputError(f"center must have shape ({d},)")
    if not 1 <= k <= d - 1:
        raise InvalidInputError("need 1 <= k <= d - 1")
    if not (sigma > 0 and radius > 0):
        raise InvalidInputError("sigma and radius must be positive")
    G = _draw_span_matrix(k, d, sigma, rng)
    span, comp = span_and_complement(G)
    z = sigma * rng.standard_normal(k)
    w = rng.standard_normal(d - k)
    nw = np.linalg.norm(w)
    while nw == 0.0:
        w = rng.standard_normal(d - k)
        nw = np.linalg.norm(w)
    w /= nw
    nu = d - k
    # mass of the unconditioned normal-offset radius landing inside the ball
    F = gammainc(nu / 2.0, radius**2 / (2.0 * sigma**2))
    if F == 0.0:
        raise ConfigurationError(
            "intersection probability underflows; shrink sigma or grow radius")
    u = rng.random()
    r_perp = sigma * np.sqrt(2.0 * gammaincinv(nu / 2.0, u * F))
    base = center + span.T @ z + comp.T @ (r_perp * w)
    return Flat(base, span)


def sample_flat_through_point(
    r: float, k: int, d: int, sigma: float, rng: np.random.Generator
) -> Flat:
    """Flat based at (r, 0, ..., 0) with raw Gaussian directions.

    The directions are deliberately not orthonormalized: replaying one
    generator state at two values of r then gives flats that differ in
    the base point alone, which is what exact distance-scaling
    comparisons require.
    """
    if not 1 <= k <= d - 1:
        raise InvalidInputError("need 1 <= k <= d - 1")
    if not sigma > 0:
        raise InvalidInputError("sigma must be positive")
    base = np.zeros(d)
    base[0] = r
    return Flat(base, sigma * rng.standard_normal((k, d)))


def generate_dataset(config: GenConfig) -> LabeledDataset:
    """All flats of the recipe, shuffled, with ground-truth labels.

    Each flat gets its own child stream of config.seed (index
    cluster * per_cluster + slot) and the final shuffle gets the last
    child, so any one flat can be re-derived without replaying the rest
    and the output is a pure function of the config.
    """
    n = config.n_flats
    children = np.random.SeedSequence(config.seed).spawn(n + 1)
    flats: list[Flat] = []
    labels = np.empty(n, dtype=np.int64)
    for ci in range(config.num_clusters):
        for t in range(config.per_cluster):
            idx = ci * config.per_cluster + t
            rng = np.random.default_rng(children[idx])
            flats.append(
                sample_cluster_flat(
                    config.centers[ci], config.k, config.d,
                    config.sigma, config.radius, rng,
                )
            )
            labels[idx] = ci
    perm = np.random.default_rng(children[n]).permutation(n)
    return LabeledDataset([flats[p] for p in perm], labels[perm], config)


def sample_disk_chord_line(rng: np.random.Generator) -> Flat:
    """Line meeting the unit disk, under the kinematic (uniform) measure:
    signed offset uniform on [-1, 1], normal angle uniform on [0, pi)."""
    u = rng.uniform(-1.0, 1.0)
    theta = rng.uniform(0.0, np.pi)
    normal = np.array([np.cos(theta), np.sin(theta)])
    direction = np.array([[-np.sin(theta), np.cos(theta)]])
    return Flat(u * normal, direction)


def sample_tangent_line_pair(
    rng: np.random.Generator,
) -> tuple[Flat, Flat, float]:
    """Two unit-circle tangent lines meeting at angle phi ~ U(0, pi].

    Tangency points sit at circle angles psi and psi + (pi - phi), which
    realizes the intersection angle phi; psi is uniform. A drawn phi of
    exactly 0.0 (parallel tangents, measure zero) is redrawn.
    """
    phi = rng.uniform(0.0, np.pi)
    while phi == 0.0:
        phi = rng.uniform(0.0, np.pi)
    psi1 = rng.uniform(0.0, 2.0 * np.pi)
    psi2 = psi1 + (np.pi - phi)
    f1 = _tangent_line(psi1)
    f2 = _tangent_line(psi2)
    return f1, f2, phi


def _tangent_line(psi: float) -> Flat:
    base = np.array([np.cos(psi), np.sin(psi)])
    direction = np.array([[-np.sin(psi), np.cos(psi)]])
    return Flat(base, direction)


def tangent_pair_intersection(f1: Flat, f2: Flat, phi: float) -> np.ndarray:
    """Intersection of a tangent pair from sample_tangent_line_pair.

    The point lies on the bisector of the two tangency points at radius
    1 / sin(phi / 2). Solving the two line equations instead loses
    roughly radius^2 ulps to cancellation as phi -> 0, which is why the
    closed form is used; it keeps the radius exact to rounding.
    """
    if not 0.0 < phi <= np.pi:
        raise InvalidInputError("phi must lie in (0, pi]")
    bisector = f1.base + f2.base
    nb = np.linalg.norm(bisector)
    if nb == 0.0:
        raise InvalidInputError("tangency points are antipodal; no intersection")
    return (bisector / nb) / np.sin(phi / 2.0)
