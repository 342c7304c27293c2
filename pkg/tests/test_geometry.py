"""Flat types, representation conversion, projection, isometries."""

import numpy as np
import pytest

from flatcluster import (
    Ball,
    DegenerateFlatError,
    Flat,
    ImplicitFlat,
    InvalidInputError,
    Isometry,
    apply_isometry,
    drop_trivial_coordinates,
    flat_point_distance,
    general_position,
    implicitize,
    pair_projection,
    parametrize,
    project_point,
)
from conftest import random_flat, random_rotation


class TestFlatType:
    def test_valid_construction(self):
        f = Flat(np.zeros(3), np.array([[1.0, 0.0, 0.0]]))
        assert f.d == 3 and f.k == 1

    def test_dependent_directions_rejected(self):
        with pytest.raises(DegenerateFlatError):
            Flat(np.zeros(3), np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]))

    def test_zero_direction_rejected(self):
        with pytest.raises(DegenerateFlatError):
            Flat(np.zeros(3), np.array([[0.0, 0.0, 0.0]]))

    def test_k_bounds(self):
        with pytest.raises(InvalidInputError):
            Flat(np.zeros(3), np.zeros((0, 3)))
        with pytest.raises(InvalidInputError):
            Flat(np.zeros(3), np.eye(3))  # k = d is a point-set of all R^3

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidInputError):
            Flat(np.array([np.nan, 0.0]), np.array([[1.0, 0.0]]))

    def test_arrays_frozen(self):
        f = Flat(np.zeros(3), np.array([[1.0, 0.0, 0.0]]))
        with pytest.raises(ValueError):
            f.base[0] = 1.0
        with pytest.raises(ValueError):
            f.directions[0, 1] = 1.0


class TestImplicitFlatType:
    def test_row_orthonormality_enforced(self):
        with pytest.raises(InvalidInputError):
            ImplicitFlat(np.array([[1.0, 1.0]]), np.array([0.0]))
        g = ImplicitFlat(np.array([[0.0, 1.0]]), np.array([2.0]))
        assert g.d == 2 and g.k == 1

    def test_ball_defaults_and_validation(self):
        b = Ball(np.zeros(4))
        assert b.radius == 1.0
        with pytest.raises(InvalidInputError):
            Ball(np.zeros(4), radius=0.0)

    def test_isometry_orthogonality_enforced(self):
        with pytest.raises(InvalidInputError):
            Isometry(np.array([[1.0, 0.0], [1.0, 1.0]]), np.zeros(2))


class TestImplicitize:
    def test_x_axis_in_plane(self):
        g = implicitize(Flat(np.zeros(2), np.array([[1.0, 0.0]])))
        assert np.allclose(g.C, [[0.0, 1.0]], atol=1e-14)
        assert np.allclose(g.e, [0.0], atol=1e-14)

    def test_horizontal_plane_at_height_five(self):
        f = Flat(np.array([0.0, 0.0, 5.0]),
                 np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
        g = implicitize(f)
        assert np.allclose(g.C, [[0.0, 0.0, 1.0]], atol=1e-14)
        assert np.allclose(g.e, [5.0], atol=1e-14)

    def test_parametric_points_satisfy_implicit_equations(self, rng):
        f = random_flat(rng, 6, 2)
        g = implicitize(f)
        for _ in range(10):
            x = f.base + f.directions.T @ rng.standard_normal(2)
            assert np.linalg.norm(g.C @ x - g.e) <= 1e-9


class TestParametrize:
    def test_horizontal_line(self):
        f = parametrize(ImplicitFlat(np.array([[0.0, 1.0]]), np.array([3.0])))
        assert np.allclose(f.base, [0.0, 3.0], atol=1e-14)
        assert np.allclose(np.abs(f.directions), [[1.0, 0.0]], atol=1e-14)

    def test_vertical_line_in_space(self):
        g = ImplicitFlat(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
                         np.array([1.0, 2.0]))
        f = parametrize(g)
        assert np.allclose(f.base, [1.0, 2.0, 0.0], atol=1e-14)
        assert np.allclose(np.abs(f.directions), [[0.0, 0.0, 1.0]], atol=1e-14)

    def test_round_trip_preserves_point_set(self, rng):
        for _ in range(25):
            d = int(rng.integers(3, 10))
            k = int(rng.integers(1, d))
            f = random_flat(rng, d, k)
            back = parametrize(implicitize(f))
            assert back.k == f.k
            assert pair_projection(f, back).distance <= 1e-8


class TestProjectPoint:
    def test_axis_projection(self):
        f = Flat(np.zeros(2), np.array([[1.0, 0.0]]))
        assert np.allclose(project_point(f, [3.0, 4.0]), [3.0, 0.0], atol=1e-14)
        assert flat_point_distance(f, [3.0, 4.0]) == pytest.approx(4.0, abs=1e-12)

    def test_line_through_origin(self):
        f = Flat(np.zeros(3), np.array([[1.0, 0.0, 0.0]]))
        assert np.allclose(project_point(f, [1.0, 1.0, 1.0]), [1.0, 0.0, 0.0],
                           atol=1e-14)

    def test_projection_beats_random_candidates(self, rng):
        f = random_flat(rng, 7, 3)
        p = rng.standard_normal(7)
        q = project_point(f, p)
        best = np.linalg.norm(p - q)
        for _ in range(1000):
            x = f.base + f.directions.T @ rng.standard_normal(3)
            assert best <= np.linalg.norm(p - x) + 1e-12

    def test_idempotent(self, rng):
        f = random_flat(rng, 5, 2)
        p = rng.standard_normal(5)
        q = project_point(f, p)
        assert np.linalg.norm(project_point(f, q) - q) <= 1e-12

    def test_residual_orthogonal_to_directions(self, rng):
        f = random_flat(rng, 9, 4)
        p = rng.standard_normal(9)
        q = project_point(f, p)
        assert np.max(np.abs(f.directions @ (p - q))) <= 1e-9 * (1 + np.linalg.norm(p))


class TestIsometry:
    def test_identity_keeps_flat(self, rng):
        f = random_flat(rng, 4, 2)
        iso = Isometry(np.eye(4), np.zeros(4))
        g = apply_isometry(f, iso)
        assert pair_projection(f, g).distance <= 1e-12

    def test_translate_axis(self):
        f = Flat(np.zeros(2), np.array([[1.0, 0.0]]))
        g = apply_isometry(f, Isometry(np.eye(2), np.array([0.0, 1.0])))
        assert np.allclose(g.base, [0.0, 1.0], atol=1e-14)
        assert np.allclose(g.directions, [[1.0, 0.0]], atol=1e-14)

    def test_distances_and_midpoints_commute(self, rng):
        d = 8
        f, g = random_flat(rng, d, 3), random_flat(rng, d, 2)
        iso = Isometry(random_rotation(rng, d), rng.standard_normal(d))
        before = pair_projection(f, g)
        after = pair_projection(apply_isometry(f, iso), apply_isometry(g, iso))
        assert after.distance == pytest.approx(before.distance, abs=1e-9)
        mapped = iso.rotation @ before.midpoint + iso.translation
        assert np.linalg.norm(after.midpoint - mapped) <= 1e-8


class TestGeneralPosition:
    def test_axes_in_space(self):
        x = Flat(np.zeros(3), np.array([[1.0, 0.0, 0.0]]))
        y = Flat(np.zeros(3), np.array([[0.0, 1.0, 0.0]]))
        assert general_position(x, y)

    def test_same_span_not_general(self):
        x = Flat(np.zeros(3), np.array([[1.0, 0.0, 0.0]]))
        x2 = Flat(np.array([0.0, 1.0, 0.0]), np.array([[2.0, 0.0, 0.0]]))
        assert not general_position(x, x2)

    def test_random_flats_almost_surely_general(self, rng):
        hits = sum(
            general_position(random_flat(rng, 10, 3), random_flat(rng, 10, 3))
            for _ in range(1000)
        )
        assert hits == 1000


class TestDropTrivialCoordinates:
    def test_shared_axis_removed_distances_preserved(self, rng):
        # every span contains the third axis, so coordinate 2 carries no
        # cross-flat information and can be dropped
        e2 = np.zeros(5)
        e2[2] = 1.0
        flats = []
        for _ in range(4):
            v = rng.standard_normal(5)
            v[2] = 0.0
            base = rng.standard_normal(5)
            flats.append(Flat(base, np.vstack([e2, v])))
        reduced, kept = drop_trivial_coordinates(flats)
        assert list(kept) == [0, 1, 3, 4]
        assert all(f.d == 4 for f in reduced)
        for a in range(len(flats)):
            for b in range(a + 1, len(flats)):
                full = pair_projection(flats[a], flats[b]).distance
                red = pair_projection(reduced[a], reduced[b]).distance
                assert red == pytest.approx(full, abs=1e-9)

    def test_no_trivial_coordinates_is_identity(self, rng):
        flats = [random_flat(rng, 5, 2) for _ in range(3)]
        reduced, kept = drop_trivial_coordinates(flats)
        assert list(kept) == [0, 1, 2, 3, 4]
        for f, g in zip(flats, reduced):
            assert np.array_equal(f.base, g.base)
