"""Dense complex linear algebra with degeneracy-aware Hermitian eigendecomposition.

Everything downstream (states, observables, channels, compatibility,
constraints) is built on the handful of primitives here.  All functions are
pure: they never mutate their arguments and the arrays they return are marked
read-only, so values can be shared freely across threads.
"""

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimMismatch, NoConvergence, NotHermitian, NotOrthonormal

__all__ = [
    "DEFAULT_TOL",
    "DEFAULT_CLUSTER_TOL",
    "EigenSystem",
    "CommutationResult",
    "as_matrix",
    "dagger",
    "max_abs",
    "freeze",
    "is_hermitian",
    "require_hermitian",
    "require_same_dim",
    "eig_hermitian",
    "cluster_eigenvalues",
    "projector_from_basis",
    "commutes",
    "random_unitary",
]

DEFAULT_TOL = 1e-9
DEFAULT_CLUSTER_TOL = 1e-9

# Component-magnitude floor used when fixing eigenvector phases.
_PHASE_FLOOR = 1e-10


def freeze(a: np.ndarray) -> np.ndarray:
    """Return ``a`` as a read-only array (copy only if needed)."""
    a = np.asarray(a)
    if a.flags.writeable:
        a = a.copy()
        a.flags.writeable = False
    return a


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite square complex matrix.

    Raises
    ------
    ValueError
        If the array is not square, is empty, or contains NaN/inf entries.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError(f"{name} must have dim >= 1")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    """Hermitian adjoint."""
    return np.asarray(m).conj().T


def max_abs(m: np.ndarray) -> float:
    """Entrywise max-abs norm, the norm used by every tolerance check."""
    return float(np.max(np.abs(m))) if np.asarray(m).size else 0.0


def is_hermitian(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    m = np.asarray(m)
    return max_abs(m - dagger(m)) <= tol


def require_hermitian(m, tol: float = DEFAULT_TOL, name: str = "matrix") -> np.ndarray:
    a = as_matrix(m, name)
    dev = max_abs(a - dagger(a))
    if dev > tol:
        raise NotHermitian(f"{name} deviates from its adjoint by {dev:.3e} (tol {tol:.1e})")
    return a


def require_same_dim(*mats: np.ndarray) -> int:
    dims = {np.asarray(m).shape[0] for m in mats}
    if len(dims) != 1:
        raise DimMismatch(f"operands have different dimensions: {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True)
class EigenSystem:
    """Raw eigendecomposition of a Hermitian matrix.

    ``values`` is ascending; column ``vectors[:, i]`` belongs to
    ``values[i]`` and the columns are orthonormal.
    """

    values: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", freeze(self.values))
        object.__setattr__(self, "vectors", freeze(self.vectors))

    @property
    def dim(self) -> int:
        return len(self.values)


class CommutationResult(NamedTuple):
    commute: bool
    residual: float


def _mgs(columns: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt over the columns, in ascending column order."""
    v = np.array(columns, dtype=complex)
    for i in range(v.shape[1]):
        for j in range(i):
            v[:, i] -= v[:, j] * (v[:, j].conj() @ v[:, i])
        norm = np.linalg.norm(v[:, i])
        if norm < 1e-12:
            raise NoConvergence("degenerate cluster collapsed during re-orthonormalization")
        v[:, i] /= norm
    return v


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first non-negligible component is real positive."""
    v = np.array(vectors, dtype=complex)
    for i in range(v.shape[1]):
        col = v[:, i]
        idx = np.flatnonzero(np.abs(col) > _PHASE_FLOOR)
        lead = col[idx[0]] if idx.size else col[np.argmax(np.abs(col))]
        if lead != 0:
            v[:, i] = col * (lead.conjugate() / abs(lead))
    return v


def eig_hermitian(m, tol: float = DEFAULT_TOL) -> EigenSystem:
    """Eigendecompose a Hermitian matrix deterministically.

    Eigenvalues come out ascending.  Within each numerically degenerate
    group the vectors are re-orthonormalized by modified Gram-Schmidt in
    ascending original-column order and every vector's phase is fixed so
    that its first non-negligible component is real positive, so repeated
    calls on identical input give identical output.

    Parameters
    ----------
    m : array_like
        Square matrix, Hermitian within ``tol`` (max-abs deviation).
    tol : float
        Hermiticity tolerance; also the relative gap used to detect
        degenerate groups.

    Raises
    ------
    NotHermitian
        If ``m`` deviates from its adjoint by more than ``tol``.
    NoConvergence
        If the underlying solver fails to converge.
    """
    a = require_hermitian(m, tol)
    h = (a + dagger(a)) / 2.0
    try:
        values, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"eigensolver failed: {exc}") from exc
    vectors = np.array(vectors, dtype=complex)
    for group in cluster_eigenvalues(values, tol):
        if len(group) > 1:
            vectors[:, group] = _mgs(vectors[:, group])
    vectors = _fix_phases(vectors)
    return EigenSystem(values=np.asarray(values, dtype=float), vectors=vectors)


def cluster_eigenvalues(values, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> list[list[int]]:
    """Group an ascending list of eigenvalues into numerically equal clusters.

    Consecutive values whose gap is at most ``cluster_tol * max(1, |value|)``
    land in the same group.  The returned groups are disjoint, cover every
    index, and preserve order.
    """
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1:
        raise ValueError("values must be one-dimensional")
    if vals.size and np.any(np.diff(vals) < 0):
        raise ValueError("values must be sorted ascending")
    groups: list[list[int]] = []
    current: list[int] = []
    for i, v in enumerate(vals):
        if not current:
            current = [i]
            continue
        gap = v - vals[current[-1]]
        scale = max(1.0, abs(v), abs(vals[current[-1]]))
        if gap <= cluster_tol * scale:
            current.append(i)
        else:
            groups.append(current)
            current = [i]
    if current:
        groups.append(current)
    return groups


def _columns(vectors) -> np.ndarray:
    """Accept a (dim, k) array or a sequence of k vectors; return columns."""
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        return np.asarray(vectors, dtype=complex)
    cols = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    if not cols:
        raise ValueError("need at least one vector")
    return np.column_stack(cols)


def projector_from_basis(vectors, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the span of an orthonormal family.

    ``vectors`` is either a (dim, k) array of columns or a sequence of k
    vectors.  The result is Hermitian, idempotent, and has trace k.

    Raises
    ------
    NotOrthonormal
        If the family's Gram matrix deviates from the identity by more
        than ``tol``.
    """
    v = _columns(vectors)
    gram = dagger(v) @ v
    dev = max_abs(gram - np.eye(v.shape[1]))
    if dev > tol:
        raise NotOrthonormal(f"basis Gram matrix deviates from identity by {dev:.3e}")
    return v @ dagger(v)


def commutes(a, b, tol: float = DEFAULT_TOL) -> CommutationResult:
    """Check whether two matrices commute; always report the residual.

    Returns
    -------
    CommutationResult
        ``commute`` is true iff ``max_abs(AB - BA) <= tol``; ``residual``
        is that norm.
    """
    am = as_matrix(a, "A")
    bm = as_matrix(b, "B")
    require_same_dim(am, bm)
    residual = max_abs(am @ bm - bm @ am)
    return CommutationResult(residual <= tol, residual)


def random_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary drawn from ``rng`` (a numpy Generator or seed)."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
