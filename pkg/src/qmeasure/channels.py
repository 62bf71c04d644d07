"""Measurement state-change rules.

Three update rules act on a density operator Z given an observable in
spectral form (eigenvalues r_k, projectors P_k):

* selective projection: Z -> P_k Z P_k, the subensemble in which outcome
  r_k occurred, left unnormalized so its trace is the outcome weight;
* the aggregate of all branches: Z -> sum_k P_k Z P_k, which preserves
  normalization and is idempotent as a channel;
* the degeneracy-breaking variant: Z -> sum_s |psi_s><psi_s| Z |psi_s><psi_s|
  over a full eigenbasis, which depends on the basis chosen inside each
  degenerate eigenspace and generally mixes more than the projection rule.

A fourth, eigenvalue-repeatable family generalizes the selective rule:
each outcome k gets Theta_k = sum_s |theta_s><psi_s| mapping the
eigenbasis of the k-th eigenspace onto an arbitrary orthonormal target
basis of the same eigenspace.  A second measurement after Theta_k still
gives r_k with certainty, but eigenstates are no longer left invariant.

Outputs are never silently renormalized; use ``normalize`` explicitly.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    BadBasis,
    BadOutcomeIndex,
    DimMismatch,
    ImpossibleOutcome,
    InvalidState,
    SubspaceViolation,
)
from .linalg import DEFAULT_TOL, dagger, freeze, max_abs
from .observables import Observable
from .states import DensityOperator, SubensembleState, state_matrix

__all__ = [
    "OutcomeDistribution",
    "ThetaFamily",
    "born",
    "lueders_select",
    "lueders_aggregate",
    "normalize",
    "von_neumann_aggregate",
    "make_theta_family",
    "rotated_theta_family",
    "theta_select",
    "theta_aggregate",
]

# Below this outcome weight, normalizing a branch is treated as selecting
# an impossible outcome rather than a division by noise.
WEIGHT_FLOOR = 1e-12


@dataclass(frozen=True)
class OutcomeDistribution:
    """Eigenvalues with their outcome probabilities, ascending in eigenvalue."""

    eigenvalues: tuple
    probabilities: tuple

    def items(self) -> list:
        return list(zip(self.eigenvalues, self.probabilities))

    def probability(self, k: int) -> float:
        if not 0 <= k < len(self.probabilities):
            raise BadOutcomeIndex(
                f"outcome index {k} out of range [0, {len(self.probabilities) - 1}]"
            )
        return self.probabilities[k]

    def __len__(self) -> int:
        return len(self.eigenvalues)


def _state_for(obs: Observable, z) -> np.ndarray:
    m = state_matrix(z)
    if m.shape[0] != obs.dim:
        raise DimMismatch(f"state dim {m.shape[0]} does not match observable dim {obs.dim}")
    return m


def born(obs: Observable, z, tol: float = DEFAULT_TOL) -> OutcomeDistribution:
    """Outcome distribution w_k = Tr(P_k Z).

    Weights are clamped into [0, 1] only when they stray by at most
    ``tol``; larger excursions mean an invalid state and raise.
    """
    zm = _state_for(obs, z)
    raw = [float(np.trace(p.projector @ zm).real) for p in obs.pairs]
    clamped = []
    for w in raw:
        if w < -tol or w > 1.0 + tol:
            raise InvalidState(f"outcome weight {w!r} outside [0, 1]")
        clamped.append(min(1.0, max(0.0, w)))
    total = sum(clamped)
    if abs(total - 1.0) > tol:
        raise InvalidState(f"outcome weights sum to {total!r}, expected 1")
    return OutcomeDistribution(
        eigenvalues=tuple(p.eigenvalue for p in obs.pairs),
        probabilities=tuple(clamped),
    )


def lueders_select(obs: Observable, k: int, z) -> SubensembleState:
    """Selective update P_k Z P_k for outcome k, unnormalized.

    The trace of the result is the outcome weight; the state stays
    positive and Hermitian, and a pure input stays pure.
    """
    zm = _state_for(obs, z)
    p = obs.pair(k).projector
    return SubensembleState(p @ zm @ p)


def lueders_aggregate(obs: Observable, z) -> DensityOperator:
    """Non-selective update sum_k P_k Z P_k.

    Computed as the in-order sum of the selective branches, so it equals
    that sum exactly, not merely within tolerance.
    """
    zm = _state_for(obs, z)
    out = np.zeros_like(zm)
    for pair in obs.pairs:
        out += pair.projector @ zm @ pair.projector
    return DensityOperator(out)


def normalize(state, floor: float = WEIGHT_FLOOR) -> DensityOperator:
    """Divide a branch state by its trace.

    Raises ImpossibleOutcome when the trace is below ``floor``: that
    branch had (numerically) zero probability and carries no state.
    """
    m = state_matrix(state)
    tr = float(np.trace(m).real)
    if tr < floor:
        raise ImpossibleOutcome(f"branch weight {tr!r} is below {floor:g}")
    return DensityOperator(m / tr)


def _as_block(vectors, dim: int, what: str) -> np.ndarray:
    a = np.asarray(vectors, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.shape[0] != dim:
        # allow a sequence of vectors as rows of a list, stacked to columns
        try:
            a = np.column_stack([np.asarray(v, dtype=complex).reshape(-1) for v in vectors])
        except Exception:
            raise BadBasis(f"{what}: expected {dim}-dimensional column vectors") from None
    if a.shape[0] != dim:
        raise BadBasis(f"{what}: vectors live in dim {a.shape[0]}, expected {dim}")
    return a


def _validated_blocks(obs: Observable, blocks, tol: float, subspace_error) -> list:
    if len(blocks) != obs.outcome_count:
        raise BadBasis(
            f"need one basis block per outcome ({obs.outcome_count}), got {len(blocks)}"
        )
    out = []
    for i, (pair, block) in enumerate(zip(obs.pairs, blocks)):
        b = _as_block(block, obs.dim, f"outcome {i}")
        if b.shape[1] != pair.multiplicity:
            raise BadBasis(
                f"outcome {i}: {b.shape[1]} vectors for a multiplicity-{pair.multiplicity} eigenvalue"
            )
        gram_dev = max_abs(dagger(b) @ b - np.eye(b.shape[1]))
        if gram_dev > tol:
            raise BadBasis(f"outcome {i}: basis not orthonormal, residual {gram_dev:.3e}")
        sub_dev = max_abs(pair.projector @ b - b)
        if sub_dev > tol:
            raise subspace_error(
                f"outcome {i}: basis leaves its eigenvalue subspace by {sub_dev:.3e}"
            )
        out.append(b)
    return out


def von_neumann_aggregate(obs: Observable, z, basis_choice=None, tol: float = DEFAULT_TOL) -> DensityOperator:
    """Degeneracy-breaking update sum_s |psi_s><psi_s| Z |psi_s><psi_s|.

    ``basis_choice`` gives one orthonormal basis per eigenvalue subspace
    (default: the observable's stored basis); the choice matters exactly
    when some eigenvalue is degenerate.  The result is diagonal in the
    chosen basis.  A caller-supplied basis is validated, not projected.
    """
    zm = _state_for(obs, z)
    blocks = (
        list(obs.basis)
        if basis_choice is None
        else _validated_blocks(obs, list(basis_choice), tol, BadBasis)
    )
    out = np.zeros_like(zm)
    for block in blocks:
        for s in range(block.shape[1]):
            v = block[:, s]
            weight = float(np.real(v.conj() @ zm @ v))
            out += weight * np.outer(v, v.conj())
    return DensityOperator(out)


@dataclass(frozen=True)
class ThetaFamily:
    """Eigenvalue-repeatable measurement operators Theta_k, one per outcome.

    Theta_k maps the stored eigenbasis of the k-th eigenspace onto a
    target orthonormal basis of the same eigenspace, so
    Theta_k* Theta_k' = Theta_k' Theta_k* = delta_kk' P_k and
    Theta_k P_k' = delta_kk' Theta_k.
    """

    observable: Observable
    thetas: tuple

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(freeze(np.asarray(t, dtype=complex)) for t in self.thetas))

    @property
    def dim(self) -> int:
        return self.observable.dim

    @property
    def outcome_count(self) -> int:
        return len(self.thetas)

    def theta(self, k: int) -> np.ndarray:
        if not (0 <= k < len(self.thetas)):
            raise BadOutcomeIndex(f"outcome index {k} out of range [0, {len(self.thetas) - 1}]")
        return self.thetas[k]

    def residual(self) -> float:
        """Worst deviation from the family's defining operator identities."""
        worst = 0.0
        projs = self.observable.projectors
        for k, tk in enumerate(self.thetas):
            for kp, tkp in enumerate(self.thetas):
                expect = projs[k] if k == kp else np.zeros_like(tk)
                worst = max(worst, max_abs(dagger(tk) @ tkp - expect))
                worst = max(worst, max_abs(tkp @ dagger(tk) - (projs[k] if k == kp else 0)))
            for kp, pair in enumerate(self.observable.pairs):
                expect_t = tk if k == kp else np.zeros_like(tk)
                worst = max(worst, max_abs(tk @ pair.projector - expect_t))
        return worst


def make_theta_family(obs: Observable, target_bases, tol: float = DEFAULT_TOL) -> ThetaFamily:
    """Build Theta_k = sum_s |theta_s><psi_s| from per-outcome target bases.

    Each target block must hold exactly multiplicity(k) orthonormal
    vectors lying inside the range of P_k; a vector with a component
    outside its eigenspace raises SubspaceViolation.  Choosing the
    observable's own basis reduces the family to plain projection,
    Theta_k = P_k.
    """
    blocks = _validated_blocks(obs, list(target_bases), tol, SubspaceViolation)
    thetas = []
    for psi_block, theta_block in zip(obs.basis, blocks):
        thetas.append(theta_block @ dagger(psi_block))
    return ThetaFamily(observable=obs, thetas=tuple(thetas))


def rotated_theta_family(obs: Observable, seed, tol: float = DEFAULT_TOL) -> ThetaFamily:
    """Theta family whose target basis is a random rotation of each eigenspace.

    Every degenerate eigenspace gets a Haar-random change of basis inside
    itself, so the family repeats eigenvalues without fixing eigenstates.
    ``seed`` is an integer or a numpy Generator.
    """
    from .linalg import random_unitary

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    targets = [block @ random_unitary(block.shape[1], rng) for block in obs.basis]
    return make_theta_family(obs, targets, tol)


def theta_select(fam: ThetaFamily, k: int, z) -> SubensembleState:
    """Selective generalized update Theta_k Z Theta_k*, unnormalized.

    Its trace equals the outcome weight Tr(P_k Z): the eigenvalue is
    repeatable even though the state inside the eigenspace is rotated.
    """
    zm = _state_for(fam.observable, z)
    t = fam.theta(k)
    return SubensembleState(t @ zm @ dagger(t))


def theta_aggregate(fam: ThetaFamily, z) -> DensityOperator:
    """Non-selective generalized update sum_k Theta_k Z Theta_k*."""
    zm = _state_for(fam.observable, z)
    out = np.zeros_like(zm)
    for t in fam.thetas:
        out += t @ zm @ dagger(t)
    return DensityOperator(out)
