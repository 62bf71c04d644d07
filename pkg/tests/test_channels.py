"""Measurement channels: Born weights, both update rules, theta families."""

import numpy as np
import pytest

from qmeasure.channels import (
    WEIGHT_FLOOR,
    born,
    lueders_aggregate,
    lueders_select,
    make_theta_family,
    normalize,
    rotated_theta_family,
    theta_aggregate,
    theta_select,
    von_neumann_aggregate,
)
from qmeasure.errors import (
    BadBasis,
    BadOutcomeIndex,
    DimMismatch,
    ImpossibleOutcome,
    SubspaceViolation,
)
from qmeasure.linalg import dagger, max_abs, random_unitary
from qmeasure.observables import spectral_decompose
from qmeasure.states import from_pure, random_density, validate


def degenerate_observable(spectrum, seed):
    u = random_unitary(len(spectrum), seed)
    return spectral_decompose(u @ np.diag(np.asarray(spectrum, float)) @ dagger(u))


OBS225 = spectral_decompose(np.diag([2.0, 2.0, 5.0]))
PSI3 = from_pure(np.ones(3) / np.sqrt(3.0))


class TestBorn:
    def test_weights_are_traces(self):
        dist = born(OBS225, PSI3)
        assert dist.probability(0) == pytest.approx(2 / 3)
        assert dist.probability(1) == pytest.approx(1 / 3)
        assert dist.eigenvalues == (2.0, 5.0)

    @pytest.mark.parametrize("seed", range(6))
    def test_distribution_normalized(self, seed):
        obs = degenerate_observable([1.0, 1.0, 2.0, 4.0], seed)
        z = random_density(4, 4, seed)
        dist = born(obs, z)
        assert sum(p for _, p in dist.items()) == pytest.approx(1.0, abs=1e-12)
        assert all(0.0 <= p <= 1.0 for _, p in dist.items())

    def test_dim_mismatch(self):
        with pytest.raises(DimMismatch):
            born(OBS225, random_density(2, 2, 0))

    def test_out_of_range_index(self):
        with pytest.raises(BadOutcomeIndex):
            born(OBS225, PSI3).probability(5)


class TestLueders:
    def test_select_is_projection_sandwich(self):
        sel = lueders_select(OBS225, 0, PSI3)
        want = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 0]]) / 3.0
        np.testing.assert_allclose(sel.matrix, want, atol=1e-12)
        assert sel.weight == pytest.approx(2 / 3)

    @pytest.mark.parametrize("seed", range(5))
    def test_select_trace_matches_born(self, seed):
        obs = degenerate_observable([0.0, 0.0, 3.0], seed)
        z = random_density(3, 3, seed)
        dist = born(obs, z)
        for k in range(obs.outcome_count):
            assert lueders_select(obs, k, z).weight == pytest.approx(
                dist.probability(k), abs=1e-12
            )

    @pytest.mark.parametrize("seed", range(5))
    def test_selects_sum_to_aggregate_exactly(self, seed):
        # the aggregate accumulates the same products in the same order,
        # so the equality is bitwise, not just within tolerance
        obs = degenerate_observable([1.0, 1.0, -1.0, 2.0], seed)
        z = random_density(4, 4, seed)
        total = np.zeros((4, 4), dtype=complex)
        for k in range(obs.outcome_count):
            total += lueders_select(obs, k, z).matrix
        assert np.array_equal(total, lueders_aggregate(obs, z).matrix)

    @pytest.mark.parametrize("seed", range(5))
    def test_aggregate_is_valid_state(self, seed):
        obs = degenerate_observable([1.0, 2.0, 2.0, 5.0, 5.0], seed)
        z = random_density(5, 5, seed)
        validate(lueders_aggregate(obs, z))

    @pytest.mark.parametrize("seed", range(5))
    def test_aggregate_idempotent(self, seed):
        obs = degenerate_observable([1.0, 1.0, 4.0], seed)
        z = random_density(3, 3, seed)
        once = lueders_aggregate(obs, z)
        twice = lueders_aggregate(obs, once)
        assert max_abs(once.matrix - twice.matrix) < 1e-12

    def test_normalized_selection_of_pure_stays_pure(self):
        sel = normalize(lueders_select(OBS225, 0, PSI3))
        assert sel.purity() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(
            sel.matrix, from_pure([1.0, 1.0, 0.0]).matrix, atol=1e-12
        )


class TestNormalize:
    def test_divides_by_trace(self):
        sel = lueders_select(OBS225, 1, PSI3)
        z = normalize(sel)
        assert z.trace == pytest.approx(1.0, abs=1e-14)

    def test_zero_branch_raises(self):
        z = from_pure([1.0, 0.0, 0.0])
        with pytest.raises(ImpossibleOutcome):
            normalize(lueders_select(OBS225, 1, z))

    def test_floor_default(self):
        assert WEIGHT_FLOOR == 1e-12


class TestVonNeumann:
    def test_diagonal_in_chosen_basis(self):
        out = von_neumann_aggregate(OBS225, PSI3)
        np.testing.assert_allclose(out.matrix, np.eye(3) / 3.0, atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_equals_lueders_without_degeneracy(self, seed):
        obs = degenerate_observable([-1.0, 0.5, 2.0], seed)
        z = random_density(3, 3, seed)
        np.testing.assert_allclose(
            von_neumann_aggregate(obs, z).matrix,
            lueders_aggregate(obs, z).matrix,
            atol=1e-10,
        )

    def test_differs_from_lueders_under_degeneracy(self):
        gap = max_abs(
            von_neumann_aggregate(OBS225, PSI3).matrix
            - lueders_aggregate(OBS225, PSI3).matrix
        )
        assert gap > 0.3

    def test_custom_basis_choice(self):
        s = 1.0 / np.sqrt(2.0)
        rotated = [
            np.array([[s, s], [s, -s], [0.0, 0.0]]),
            np.array([[0.0], [0.0], [1.0]]),
        ]
        out = von_neumann_aggregate(OBS225, PSI3, basis_choice=rotated)
        validate(out)
        # the rotated first block mixes weight differently from the standard one
        default = von_neumann_aggregate(OBS225, PSI3)
        assert max_abs(out.matrix - default.matrix) > 0.1

    def test_rejects_wrong_block_count(self):
        with pytest.raises(BadBasis):
            von_neumann_aggregate(OBS225, PSI3, basis_choice=[np.eye(3)])

    def test_rejects_non_orthonormal_block(self):
        blocks = [np.ones((3, 2)), np.array([[0.0], [0.0], [1.0]])]
        with pytest.raises(BadBasis):
            von_neumann_aggregate(OBS225, PSI3, basis_choice=blocks)

    def test_rejects_basis_outside_eigenspace(self):
        blocks = [
            np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]),
            np.array([[0.0], [1.0], [0.0]]),
        ]
        with pytest.raises(BadBasis):
            von_neumann_aggregate(OBS225, PSI3, basis_choice=blocks)


class TestThetaFamily:
    @pytest.mark.parametrize("seed", range(6))
    def test_rotated_family_invariants(self, seed):
        obs = degenerate_observable([1.0, 1.0, 1.0, 4.0, 4.0], seed)
        fam = rotated_theta_family(obs, seed)
        assert fam.residual() < 1e-12
        for k, th in enumerate(fam.thetas):
            for kp, pair in enumerate(obs.pairs):
                want = th if k == kp else np.zeros_like(th)
                np.testing.assert_allclose(th @ pair.projector, want, atol=1e-12)

    def test_reduction_is_plain_lueders(self):
        fam = make_theta_family(OBS225, OBS225.basis)
        for th, pair in zip(fam.thetas, OBS225.pairs):
            assert np.array_equal(th, pair.projector)
        np.testing.assert_allclose(
            theta_aggregate(fam, PSI3).matrix,
            lueders_aggregate(OBS225, PSI3).matrix,
            atol=1e-14,
        )

    @pytest.mark.parametrize("seed", range(4))
    def test_select_weight_matches_born(self, seed):
        obs = degenerate_observable([2.0, 2.0, 7.0], seed)
        fam = rotated_theta_family(obs, seed + 100)
        z = random_density(3, 3, seed)
        dist = born(obs, z)
        for k in range(obs.outcome_count):
            assert theta_select(fam, k, z).weight == pytest.approx(
                dist.probability(k), abs=1e-12
            )

    @pytest.mark.parametrize("seed", range(4))
    def test_eigenvalue_repeats_after_update(self, seed):
        obs = degenerate_observable([1.0, 1.0, 6.0], seed)
        fam = rotated_theta_family(obs, seed)
        z = random_density(3, 3, seed)
        for k in range(obs.outcome_count):
            again = born(obs, normalize(theta_select(fam, k, z)))
            assert again.probability(k) == pytest.approx(1.0, abs=1e-10)

    def test_eigenstates_not_invariant(self):
        s = 1.0 / np.sqrt(2.0)
        targets = [
            np.array([[s, s], [s, -s], [0.0, 0.0]]),
            np.array([[0.0], [0.0], [1.0]]),
        ]
        fam = make_theta_family(OBS225, targets)
        z = from_pure([1.0, 0.0, 0.0])
        moved = theta_select(fam, 0, z)
        assert moved.weight == pytest.approx(1.0)
        assert max_abs(moved.matrix - z.matrix) > 0.4

    def test_aggregate_valid_state(self):
        fam = rotated_theta_family(OBS225, 5)
        validate(theta_aggregate(fam, PSI3))

    def test_rejects_target_outside_subspace(self):
        s = 1.0 / np.sqrt(2.0)
        bad = [
            np.array([[s, 0.0], [0.0, 1.0], [s, 0.0]]),
            np.array([[0.0], [0.0], [1.0]]),
        ]
        with pytest.raises(SubspaceViolation):
            make_theta_family(OBS225, bad)

    def test_theta_index_bounds(self):
        fam = rotated_theta_family(OBS225, 0)
        with pytest.raises(BadOutcomeIndex):
            fam.theta(2)

    def test_rotated_family_deterministic(self):
        a = rotated_theta_family(OBS225, 3)
        b = rotated_theta_family(OBS225, 3)
        for ta, tb in zip(a.thetas, b.thetas):
            assert np.array_equal(ta, tb)
