"""Hermitian observables kept in spectral form with a verified projector family.

An Observable is the pair list (r_k, P_k) of distinct eigenvalues with their
orthogonal projectors, plus a stored orthonormal eigenbasis grouped per
eigenvalue.  The projector family always satisfies

    P_j P_k = delta_jk P_k        (orthogonality)
    sum_k P_k = identity          (completeness)

within tolerance, whether the observable came from a decomposition or from
an explicit pair list.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    BadOutcomeIndex,
    DimMismatch,
    ValidationError,
)
from .linalg import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_TOL,
    cluster_eigenvalues,
    dagger,
    eig_hermitian,
    freeze,
    max_abs,
    require_hermitian,
    require_same_dim,
)

__all__ = [
    "SpectralPair",
    "Observable",
    "spectral_decompose",
    "observable_from_pairs",
    "reconstruct",
    "is_function_refinement",
]


@dataclass(frozen=True)
class SpectralPair:
    """One distinct eigenvalue with its projector; multiplicity = Tr P."""

    eigenvalue: float
    projector: np.ndarray
    multiplicity: int

    def __post_init__(self):
        object.__setattr__(self, "projector", freeze(np.asarray(self.projector, dtype=complex)))

    @property
    def simple(self) -> bool:
        return self.multiplicity == 1


@dataclass(frozen=True)
class Observable:
    """Spectral form of a Hermitian operator.

    ``pairs`` is ascending in eigenvalue.  ``basis[i]`` holds
    ``pairs[i].multiplicity`` orthonormal eigenvector columns spanning the
    range of ``pairs[i].projector``; together the blocks form a full
    orthonormal eigenbasis.
    """

    dim: int
    pairs: tuple
    basis: tuple

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        object.__setattr__(self, "basis", tuple(freeze(np.asarray(b, dtype=complex)) for b in self.basis))

    @property
    def eigenvalues(self) -> list:
        return [p.eigenvalue for p in self.pairs]

    @property
    def projectors(self) -> list:
        return [p.projector for p in self.pairs]

    @property
    def multiplicities(self) -> list:
        return [p.multiplicity for p in self.pairs]

    @property
    def outcome_count(self) -> int:
        return len(self.pairs)

    def pair(self, k: int) -> SpectralPair:
        if not (0 <= k < len(self.pairs)):
            raise BadOutcomeIndex(
                f"outcome index {k} out of range [0, {len(self.pairs) - 1}]"
            )
        return self.pairs[k]

    def full_basis(self) -> np.ndarray:
        """All eigenvector columns, pair blocks concatenated in order."""
        return np.hstack(self.basis)


def _family_residuals(projectors, dim: int) -> tuple[float, float]:
    """Max deviation from orthogonality and from completeness."""
    ortho = 0.0
    for j, pj in enumerate(projectors):
        for k, pk in enumerate(projectors):
            expect = pk if j == k else 0.0
            ortho = max(ortho, max_abs(pj @ pk - expect))
    complete = max_abs(sum(projectors) - np.eye(dim))
    return ortho, complete


def _check_family(pairs, dim: int, tol: float) -> None:
    ortho, complete = _family_residuals([p.projector for p in pairs], dim)
    if ortho > tol:
        raise ValidationError(f"projector family not orthogonal, residual {ortho:.3e}")
    if complete > tol:
        raise ValidationError(f"projector family not complete, residual {complete:.3e}")
    if sum(p.multiplicity for p in pairs) != dim:
        raise ValidationError("multiplicities do not sum to the dimension")


def spectral_decompose(m, cluster_tol: float = DEFAULT_CLUSTER_TOL, tol: float = DEFAULT_TOL) -> Observable:
    """Decompose a Hermitian matrix into distinct eigenvalues and projectors.

    Numerically equal eigenvalues are merged into one pair; the reported
    eigenvalue is the mean of the merged values, which minimizes the
    reconstruction error.  The stored basis is the deterministic one from
    ``eig_hermitian``, so outputs are reproducible bit for bit.
    """
    eigsys = eig_hermitian(m, tol)
    groups = cluster_eigenvalues(eigsys.values, cluster_tol)
    pairs = []
    basis = []
    for group in groups:
        block = eigsys.vectors[:, group]
        value = float(np.mean(eigsys.values[group]))
        pairs.append(
            SpectralPair(
                eigenvalue=value,
                projector=block @ dagger(block),
                multiplicity=len(group),
            )
        )
        basis.append(block)
    return Observable(dim=eigsys.dim, pairs=tuple(pairs), basis=tuple(basis))


def observable_from_pairs(pairs, tol: float = DEFAULT_TOL) -> Observable:
    """Build an Observable from explicit (eigenvalue, projector) pairs.

    The family is re-validated rather than trusted: each projector must be
    Hermitian and idempotent, the family orthogonal and complete, and the
    eigenvalues distinct.  A basis is derived from each projector's range.
    """
    items = []
    for value, proj in pairs:
        p = require_hermitian(proj, tol, "projector")
        idem = max_abs(p @ p - p)
        if idem > tol:
            raise ValidationError(f"projector not idempotent, residual {idem:.3e}")
        tr = float(np.trace(p).real)
        mult = round(tr)
        if mult < 1 or abs(tr - mult) > tol * max(1, p.shape[0]):
            raise ValidationError(f"projector trace {tr!r} is not a positive integer")
        items.append((float(value), p, mult))
    items.sort(key=lambda it: it[0])
    for (a, _, _), (b, _, _) in zip(items, items[1:]):
        if not (b > a):
            raise ValidationError(f"eigenvalues must be distinct, got {a!r} twice")
    dim = require_same_dim(*(p for _, p, _ in items))
    spairs = tuple(
        SpectralPair(eigenvalue=v, projector=p, multiplicity=m) for v, p, m in items
    )
    _check_family(spairs, dim, tol)
    basis = tuple(_range_basis(p, m, tol) for _, p, m in items)
    return Observable(dim=dim, pairs=spairs, basis=basis)


def _range_basis(projector: np.ndarray, multiplicity: int, tol: float) -> np.ndarray:
    """Deterministic orthonormal basis of a projector's range."""
    eigsys = eig_hermitian(projector, tol)
    cols = [i for i, v in enumerate(eigsys.values) if v > 0.5]
    if len(cols) != multiplicity:
        raise ValidationError(
            f"projector range has dimension {len(cols)}, expected {multiplicity}"
        )
    return eigsys.vectors[:, cols]


def reconstruct(obs: Observable) -> np.ndarray:
    """Reassemble the matrix sum_k r_k P_k."""
    out = np.zeros((obs.dim, obs.dim), dtype=complex)
    for p in obs.pairs:
        out += p.eigenvalue * p.projector
    return out


def is_function_refinement(fine: Observable, coarse: Observable, tol: float = DEFAULT_TOL) -> bool:
    """True iff every coarse projector is a sum of fine projectors.

    Equivalently: coarse arises from fine by merging eigenvalues, so a
    fine measurement is at the same time a coarse one.
    """
    if fine.dim != coarse.dim:
        raise DimMismatch(f"dimensions differ: {fine.dim} vs {coarse.dim}")
    for cp in coarse.pairs:
        total = np.zeros((coarse.dim, coarse.dim), dtype=complex)
        for fp in fine.pairs:
            overlap = float(np.trace(cp.projector @ fp.projector).real)
            if overlap >= fp.multiplicity - 0.5:
                total += fp.projector
        if max_abs(total - cp.projector) > tol * max(1, coarse.dim):
            return False
    return True
