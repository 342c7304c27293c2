"""Minimum-norm least squares, orthonormalization, nullspace extraction."""

import numpy as np
import pytest

from flatcluster import (
    InvalidInputError,
    least_squares,
    nullspace_basis,
    orthonormalize,
    span_and_complement,
)
from oracles import pinv_min_norm


class TestLeastSquares:
    def test_identity_system(self):
        res = least_squares(np.eye(3), np.array([1.0, 2.0, 3.0]))
        assert np.allclose(res.x, [1.0, 2.0, 3.0], atol=1e-14)
        assert res.residual <= 1e-14
        assert res.rank == 3

    def test_overdetermined_system(self):
        A = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        b = np.array([0.0, 0.0, 3.0])
        res = least_squares(A, b)
        assert np.allclose(res.x, [1.0, 1.0], atol=1e-12)
        assert res.residual == pytest.approx(np.sqrt(3.0), abs=1e-12)
        assert res.rank == 2

    def test_rank_deficient_takes_min_norm_solution(self):
        # the solution set is the line x1 + x2 = 1; its smallest point is
        # (1/2, 1/2), confirmed by the pseudo-inverse oracle
        A = np.array([[1.0, 1.0], [2.0, 2.0]])
        b = np.array([1.0, 2.0])
        res = least_squares(A, b)
        assert res.rank == 1
        assert res.residual <= 1e-12
        assert np.allclose(res.x, [0.5, 0.5], atol=1e-12)
        assert np.allclose(res.x, pinv_min_norm(A, b), atol=1e-12)

    def test_nonfinite_inputs_rejected(self):
        with pytest.raises(InvalidInputError):
            least_squares(np.array([[np.nan, 0.0]]), np.array([1.0]))
        with pytest.raises(InvalidInputError):
            least_squares(np.eye(2), np.array([1.0, np.inf]))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            least_squares(np.eye(3), np.array([1.0, 2.0]))

    def test_residual_is_global_minimum(self, rng):
        A = rng.standard_normal((7, 4))
        b = rng.standard_normal(7)
        res = least_squares(A, b)
        for _ in range(100):
            delta = 1e-3 * rng.standard_normal(4)
            assert np.linalg.norm(A @ (res.x + delta) - b) >= res.residual - 1e-10

    def test_min_norm_beats_other_minimizers(self, rng):
        cols = rng.standard_normal((6, 3))
        A = np.hstack([cols, cols[:, :2]])  # rank 3 on 5 columns
        b = rng.standard_normal(6)
        res = least_squares(A, b)
        assert res.rank == 3
        x_oracle = pinv_min_norm(A, b)
        assert abs(np.linalg.norm(A @ x_oracle - b) - res.residual) <= 1e-10
        assert np.linalg.norm(res.x) <= np.linalg.norm(x_oracle) + 1e-8
        # shifting along the nullspace is another minimizer but never smaller
        ns = nullspace_basis(A)
        for row in ns:
            other = res.x + 0.37 * row
            assert abs(np.linalg.norm(A @ other - b) - res.residual) <= 1e-10
            assert np.linalg.norm(res.x) <= np.linalg.norm(other) + 1e-8


class TestOrthonormalize:
    def test_axis_scaling(self):
        out = orthonormalize(np.array([[2.0, 0.0], [0.0, 3.0]]))
        assert np.allclose(out, np.eye(2), atol=1e-14)

    def test_two_oblique_vectors(self):
        vecs = np.array([[1.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
        out = orthonormalize(vecs)
        assert out.shape == (2, 3)
        assert np.allclose(out @ out.T, np.eye(2), atol=1e-12)
        # span containment: each input reconstructs from the output rows
        for v in vecs:
            assert np.linalg.norm(v - out.T @ (out @ v)) <= 1e-12

    def test_dependent_vector_dropped(self):
        out = orthonormalize(np.array([[1.0, 0.0], [2.0, 0.0]]))
        assert out.shape == (1, 2)
        assert np.allclose(np.abs(out), [[1.0, 0.0]], atol=1e-14)

    def test_empty_input_gives_empty_output(self):
        assert orthonormalize(np.zeros((0, 4))).shape[0] == 0

    def test_gram_identity_on_random_inputs(self, rng):
        for _ in range(20):
            k, d = rng.integers(1, 6), rng.integers(6, 12)
            out = orthonormalize(rng.standard_normal((k, d)))
            assert np.max(np.abs(out @ out.T - np.eye(k))) <= 1e-10


class TestNullspaceBasis:
    def test_single_row(self):
        ns = nullspace_basis(np.array([[1.0, 0.0, 0.0]]))
        assert ns.shape == (2, 3)
        assert np.allclose(ns @ ns.T, np.eye(2), atol=1e-12)
        assert np.max(np.abs(ns @ np.array([1.0, 0.0, 0.0]))) <= 1e-12

    def test_full_rank_square_has_empty_nullspace(self):
        assert nullspace_basis(np.eye(3)).shape == (0, 3)

    def test_random_wide_matrix(self, rng):
        M = rng.standard_normal((2, 5))
        ns = nullspace_basis(M)
        assert ns.shape == (3, 5)
        assert np.max(np.abs(M @ ns.T)) <= 1e-10

    def test_rows_orthogonal_to_input_rows(self, rng):
        for _ in range(10):
            M = rng.standard_normal((3, 8))
            ns = nullspace_basis(M)
            assert np.max(np.abs(ns @ M.T)) <= 1e-10


class TestSpanAndComplement:
    def test_partitions_into_orthonormal_frame(self, rng):
        D = rng.standard_normal((3, 7))
        span, comp = span_and_complement(D)
        assert span.shape == (3, 7) and comp.shape == (4, 7)
        frame = np.vstack([span, comp])
        assert np.max(np.abs(frame @ frame.T - np.eye(7))) <= 1e-10
        # span really spans the input rows
        for v in D:
            assert np.linalg.norm(v - span.T @ (span @ v)) <= 1e-9 * np.linalg.norm(v)

    def test_deterministic_and_sign_canonical(self, rng):
        D = rng.standard_normal((2, 5))
        s1, c1 = span_and_complement(D)
        s2, c2 = span_and_complement(D.copy())
        assert np.array_equal(s1, s2) and np.array_equal(c1, c2)
        for row in np.vstack([s1, c1]):
            assert row[np.argmax(np.abs(row))] > 0
