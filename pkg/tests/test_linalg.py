"""Eigendecomposition, clustering, and the small operator helpers."""

import numpy as np
import pytest

from qmeasure.errors import DimMismatch, NotHermitian, NotOrthonormal
from qmeasure.linalg import (
    cluster_eigenvalues,
    commutes,
    dagger,
    eig_hermitian,
    max_abs,
    projector_from_basis,
    random_unitary,
    require_hermitian,
    require_same_dim,
)

RNG_SEEDS = [0, 1, 2, 7, 11]


def random_hermitian(dim, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + dagger(g)) / 2.0


class TestEigHermitian:
    @pytest.mark.parametrize("dim", [1, 2, 3, 5, 8])
    @pytest.mark.parametrize("seed", RNG_SEEDS)
    def test_reconstructs_input(self, dim, seed):
        m = random_hermitian(dim, seed)
        sys = eig_hermitian(m)
        rebuilt = sys.vectors @ np.diag(sys.values) @ dagger(sys.vectors)
        np.testing.assert_allclose(rebuilt, m, atol=1e-10)

    @pytest.mark.parametrize("seed", RNG_SEEDS)
    def test_vectors_orthonormal(self, seed):
        sys = eig_hermitian(random_hermitian(6, seed))
        np.testing.assert_allclose(
            dagger(sys.vectors) @ sys.vectors, np.eye(6), atol=1e-12
        )

    def test_values_ascending(self):
        sys = eig_hermitian(random_hermitian(7, 3))
        assert all(a <= b for a, b in zip(sys.values, sys.values[1:]))

    def test_deterministic(self):
        # the solver, re-orthonormalization, and phase fix must be
        # reproducible bit for bit, since CLI output is compared bytewise
        m = random_hermitian(5, 12)
        a = eig_hermitian(m)
        b = eig_hermitian(m)
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.vectors, b.vectors)

    def test_phase_convention(self):
        # first component above the floor is made real and positive
        sys = eig_hermitian(random_hermitian(4, 5))
        for col in sys.vectors.T:
            lead = col[np.abs(col) > 1e-10][0]
            assert abs(lead.imag) < 1e-12
            assert lead.real > 0

    def test_degenerate_block_still_orthonormal(self):
        u = random_unitary(4, 9)
        m = u @ np.diag([2.0, 2.0, 2.0, 5.0]) @ dagger(u)
        sys = eig_hermitian(m)
        np.testing.assert_allclose(
            dagger(sys.vectors) @ sys.vectors, np.eye(4), atol=1e-12
        )

    def test_known_flip(self):
        sys = eig_hermitian(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(sys.values, [-1.0, 1.0], atol=1e-12)
        s = 1.0 / np.sqrt(2.0)
        np.testing.assert_allclose(
            sys.vectors, np.array([[s, s], [-s, s]]), atol=1e-12
        )

    def test_symmetrizes_tiny_skew(self):
        m = np.array([[1.0, 0.1 + 1e-12j], [0.1 - 3e-12j, 2.0]])
        sys = eig_hermitian(m)
        assert np.all(np.isreal(sys.values))

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            eig_hermitian(np.ones((2, 3)))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            eig_hermitian(np.array([[np.inf, 0.0], [0.0, 1.0]]))


class TestCluster:
    def test_distinct(self):
        assert cluster_eigenvalues([1.0, 2.0, 3.0], 1e-9) == [[0], [1], [2]]

    def test_merges_below_gap(self):
        assert cluster_eigenvalues([1.0, 1.0 + 1e-12, 3.0], 1e-9) == [[0, 1], [2]]

    def test_chain_merging(self):
        # gaps are tested pairwise, so a chain of small steps is one cluster
        vals = [1.0, 1.0 + 4e-10, 1.0 + 8e-10]
        assert cluster_eigenvalues(vals, 1e-9) == [[0, 1, 2]]

    def test_gap_scales_with_magnitude(self):
        vals = [1e6, 1e6 + 1e-4, 2e6]
        assert cluster_eigenvalues(vals, 1e-9) == [[0, 1], [2]]

    def test_singleton(self):
        assert cluster_eigenvalues([7.0], 1e-9) == [[0]]

    def test_empty(self):
        assert cluster_eigenvalues([], 1e-9) == []

    def test_requires_ascending(self):
        with pytest.raises(ValueError):
            cluster_eigenvalues([2.0, 1.0], 1e-9)


class TestProjector:
    def test_single_vector(self):
        p = projector_from_basis(np.eye(2)[:, :1])
        np.testing.assert_allclose(p, np.diag([1.0, 0.0]), atol=1e-15)

    def test_plane(self):
        p = projector_from_basis(np.eye(3)[:, :2])
        np.testing.assert_allclose(p, np.diag([1.0, 1.0, 0.0]), atol=1e-15)

    def test_idempotent_hermitian(self):
        u = random_unitary(5, 4)
        p = projector_from_basis(u[:, :3])
        np.testing.assert_allclose(p @ p, p, atol=1e-12)
        np.testing.assert_allclose(p, dagger(p), atol=1e-12)
        assert abs(np.trace(p).real - 3.0) < 1e-12

    def test_rejects_unnormalized(self):
        with pytest.raises(NotOrthonormal):
            projector_from_basis(np.array([[2.0], [0.0]]))

    def test_rejects_non_orthogonal(self):
        v = np.array([[1.0, 1.0], [0.0, 1e-3]])
        with pytest.raises(NotOrthonormal):
            projector_from_basis(v)


class TestCommutes:
    def test_diagonals_commute(self):
        res = commutes(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))
        assert res.commute
        assert res.residual == 0.0

    def test_pauli_residual(self):
        res = commutes(np.array([[0, 1], [1, 0]]), np.diag([1.0, -1.0]))
        assert not res.commute
        assert res.residual == pytest.approx(2.0)

    def test_anything_commutes_with_identity(self):
        m = np.array([[1.0, 2.0j], [5.0, 0.5]])
        assert commutes(m, np.eye(2)).commute

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            commutes(np.eye(2), np.eye(3))


class TestHelpers:
    def test_max_abs(self):
        assert max_abs(np.array([[1.0, -3.0], [2.0, 0.5]])) == 3.0

    def test_require_hermitian_passes(self):
        require_hermitian(np.diag([1.0, 2.0]), 1e-9)

    def test_require_hermitian_raises(self):
        with pytest.raises(NotHermitian):
            require_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]), 1e-9)

    def test_require_same_dim(self):
        with pytest.raises(DimMismatch):
            require_same_dim(np.eye(2), np.eye(4))


class TestRandomUnitary:
    @pytest.mark.parametrize("dim", [1, 2, 5])
    def test_unitary(self, dim):
        u = random_unitary(dim, 0)
        np.testing.assert_allclose(dagger(u) @ u, np.eye(dim), atol=1e-12)

    def test_seed_reproducible(self):
        assert np.array_equal(random_unitary(4, 3), random_unitary(4, 3))

    def test_generator_advances(self):
        rng = np.random.default_rng(0)
        a = random_unitary(3, rng)
        b = random_unitary(3, rng)
        assert max_abs(a - b) > 1e-3
