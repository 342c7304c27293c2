"""Flats, balls, isometries: domain types and representation conversion.

A k-flat in R^d is stored parametrically as a base point plus k linearly
independent direction vectors. The implicit form (C, e), with C a row
orthonormal (d-k) x d matrix and C x = e on the flat, is derived on demand.
Row orthonormality matters: it makes the algebraic residual ||C x - e||
equal the Euclidean distance from x to the flat, which is what lets a
stacked least-squares solve return a geometric midpoint downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFlatError, InvalidInputError
from .numerics import (
    RANK_TOL,
    least_squares,
    nullspace_basis,
    span_and_complement,
)


def _frozen_array(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Flat:
    """Affine subspace {base + sum_i t_i * directions[i]} of dimension k.

    directions has shape (k, d) with 1 <= k <= d-1 and full row rank;
    the rows need not be orthonormal. Instances are immutable.
    """

    base: np.ndarray
    directions: np.ndarray

    def __post_init__(self):
        base = _frozen_array(self.base)
        dirs = _frozen_array(self.directions)
        if base.ndim != 1:
            raise InvalidInputError("base must be a vector")
        if dirs.ndim != 2 or dirs.shape[1] != base.shape[0]:
            raise InvalidInputError("directions must be a (k, d) matrix matching base")
        if not (np.all(np.isfinite(base)) and np.all(np.isfinite(dirs))):
            raise InvalidInputError("flat entries must be finite")
        k, d = dirs.shape
        if not 1 <= k <= d - 1:
            raise InvalidInputError(f"flat dimension k={k} must satisfy 1 <= k <= d-1")
        s = np.linalg.svd(dirs, compute_uv=False)
        if s[-1] <= RANK_TOL * s[0]:
            raise DegenerateFlatError("direction vectors are linearly dependent")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "directions", dirs)

    @property
    def k(self) -> int:
        return self.directions.shape[0]

    @property
    def d(self) -> int:
        return self.base.shape[0]


@dataclass(frozen=True)
class ImplicitFlat:
    """Flat as the solution set {x : C x = e} with row-orthonormal C."""

    C: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        C = _frozen_array(self.C)
        e = _frozen_array(self.e)
        if C.ndim != 2 or e.ndim != 1 or C.shape[0] != e.shape[0]:
            raise InvalidInputError("C must be (m, d) and e length m")
        if not (np.all(np.isfinite(C)) and np.all(np.isfinite(e))):
            raise InvalidInputError("implicit entries must be finite")
        m, d = C.shape
        if not 1 <= m <= d - 1:
            raise InvalidInputError(f"need 1 <= d-k <= d-1 rows, got {m} x {d}")
        gram = C @ C.T
        if np.max(np.abs(gram - np.eye(m))) > 1e-10:
            # Contract violation by the caller, not a discovered degeneracy:
            # C is supposed to arrive already orthonormalized.
            raise InvalidInputError("rows of C must be orthonormal")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "e", e)

    @property
    def d(self) -> int:
        return self.C.shape[1]

    @property
    def k(self) -> int:
        return self.C.shape[1] - self.C.shape[0]


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        center = _frozen_array(self.center)
        if center.ndim != 1 or not np.all(np.isfinite(center)):
            raise InvalidInputError("ball center must be a finite vector")
        if not self.radius > 0:
            raise InvalidInputError("ball radius must be positive")
        object.__setattr__(self, "center", center)


@dataclass(frozen=True)
class Isometry:
    """Rigid motion x -> rotation @ x + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = _frozen_array(self.rotation)
        t = _frozen_array(self.translation)
        if R.ndim != 2 or R.shape[0] != R.shape[1] or t.shape != (R.shape[0],):
            raise InvalidInputError("rotation must be d x d and translation length d")
        if np.max(np.abs(R.T @ R - np.eye(R.shape[0]))) > 1e-10:
            raise InvalidInputError("rotation matrix is not orthogonal")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)


def implicitize(f: Flat, rank_tol: float = RANK_TOL) -> ImplicitFlat:
    """Convert to the row-orthonormal implicit form.

    C's rows span the orthogonal complement of span(directions), with a
    canonical sign per row, and e = C @ base.
    """
    span, comp = span_and_complement(f.directions, rank_tol)
    if span.shape[0] < f.k:
        raise DegenerateFlatError("direction vectors are linearly dependent")
    return ImplicitFlat(comp, comp @ f.base)


def parametrize(g: ImplicitFlat, rank_tol: float = RANK_TOL) -> Flat:
    """Convert implicit form back to base + directions.

    The base point is the minimum-norm solution of C x = e; with orthonormal
    rows that is exactly C^T e. Directions are a nullspace basis of C.
    """
    base = g.C.T @ g.e
    # orthonormal rows make the system always consistent; guard anyway
    if np.linalg.norm(g.C @ base - g.e) > 1e-9 * max(1.0, float(np.linalg.norm(g.e))):
        raise DegenerateFlatError("implicit system is inconsistent")
    dirs = nullspace_basis(g.C, rank_tol)
    if dirs.shape[0] == 0:
        raise DegenerateFlatError("implicit system has no free directions")
    return Flat(base, dirs)


def project_point(f: Flat, p) -> np.ndarray:
    """Orthogonal projection of p onto the flat (its unique nearest point)."""
    p = np.asarray(p, dtype=float)
    if p.shape != (f.d,):
        raise InvalidInputError(f"point has length {p.shape}, flat is in R^{f.d}")
    t, _, _ = least_squares(f.directions.T, p - f.base)
    return f.base + f.directions.T @ t


def flat_point_distance(f: Flat, p) -> float:
    """Euclidean distance from a point to a flat."""
    return float(np.linalg.norm(np.asarray(p, dtype=float) - project_point(f, p)))


def apply_isometry(f: Flat, iso: Isometry) -> Flat:
    """Image of the flat under x -> R x + t."""
    if iso.rotation.shape[0] != f.d:
        raise InvalidInputError("isometry dimension mismatch")
    return Flat(iso.rotation @ f.base + iso.translation,
                f.directions @ iso.rotation.T)


def general_position(f: Flat, g: Flat, rank_tol: float = RANK_TOL) -> bool:
    """True iff the combined direction span has the maximal dimension
    min(k_f + k_g, d)."""
    if f.d != g.d:
        raise InvalidInputError("flats live in different ambient dimensions")
    stacked = np.vstack([f.directions, g.directions])
    s = np.linalg.svd(stacked, compute_uv=False)
    rank = int(np.count_nonzero(s > rank_tol * s[0]))
    return rank == min(f.k + g.k, f.d)


def drop_trivial_coordinates(
    flats: list[Flat], rank_tol: float = RANK_TOL
) -> tuple[list[Flat], np.ndarray]:
    """Remove coordinates that are unconstrained in every flat.

    Coordinate j is trivial when e_j lies in every flat's direction span
    (the coordinate is missing from all data points, so it carries no
    information). Returns the projected flats and the indices of the kept
    coordinates. With no trivial coordinates the input flats are returned
    unchanged.
    """
    if not flats:
        return [], np.arange(0)
    d = flats[0].d
    trivial = np.ones(d, dtype=bool)
    for f in flats:
        span, _ = span_and_complement(f.directions, rank_tol)
        # e_j in span  iff  ||P e_j|| = 1  iff  column norm of span basis is 1
        colnorm = np.linalg.norm(span, axis=0)
        trivial &= colnorm >= 1.0 - 1e-9
        if not trivial.any():
            break
    kept = np.flatnonzero(~trivial)
    if kept.size == d:
        return list(flats), kept
    if kept.size < 2:
        raise InvalidInputError("dropping trivial coordinates leaves no geometry")
    out = []
    for f in flats:
        dirs = f.directions[:, kept]
        # spans lose rank when they contained dropped axes; re-extract a basis
        span, _ = span_and_complement(dirs, rank_tol)
        if span.shape[0] == 0 or span.shape[0] >= kept.size:
            raise InvalidInputError(
                "flat degenerates to a point or fills the reduced space")
        out.append(Flat(f.base[kept], span))
    return out, kept
