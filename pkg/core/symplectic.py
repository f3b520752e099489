"""
Finite-dimensional strong symplectic spaces.

A space is a complex coordinate space with a skew-adjoint form matrix J, the
form being [u, v] = v* J u. The Hermitian form -i[., .] has signature
(n_plus, n_minus). Subspaces are stored as Euclidean-orthonormal frames.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import singledispatch

import numpy as np
import scipy.linalg

from utils.linalg import (
    DEFAULT_RANK_TOLERANCE,
    as_matrix,
    inv_psd_sqrt,
    null_frame,
    orthonormal_frame,
    phase_normalize,
    principal_angles,
    same_span,
    solve_or_none,
    spectral_norm,
)

from .exceptions import (
    ContractionModelError,
    DimensionMismatch,
    NotAGraph,
    NotIsotropic,
    NotPositiveDefinite,
    NotStrictContraction,
    SingularSystem,
    SymplecticError,
)

logger = logging.getLogger(__name__)

NONDEGENERACY_TOLERANCE = 1e-12


class SpaceKind(Enum):
    STANDARD = "standard"
    GRAPH = "graph"


class SubspaceKind(Enum):
    ISOTROPIC = "isotropic"
    MAX_POS_DEFINITE = "max_pos_definite"
    MAX_NEG_DEFINITE = "max_neg_definite"
    POS_DEFINITE_NOT_MAXIMAL = "pos_definite_not_maximal"
    NEG_DEFINITE_NOT_MAXIMAL = "neg_definite_not_maximal"
    POS_SEMIDEFINITE = "pos_semidefinite"
    NEG_SEMIDEFINITE = "neg_semidefinite"
    INDEFINITE = "indefinite"


@dataclass(frozen=True, eq=False)
class SymplecticSpace:
    form: np.ndarray
    signature: tuple[int, int]

    @property
    def dim(self) -> int:
        return int(self.form.shape[0])

    def pairing(self, u: np.ndarray, v: np.ndarray) -> complex:
        """[u, v] = v* J u."""
        return complex(np.vdot(v, self.form @ u))

    def gram(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """Matrix of [right_j, left_i] entries, i.e. left* J right."""
        return left.conj().T @ self.form @ right

    def hermitian_form(self, frame: np.ndarray) -> np.ndarray:
        """Compression of -iJ to span(frame)."""
        compressed = -1j * self.gram(frame, frame)
        return 0.5 * (compressed + compressed.conj().T)


@dataclass(frozen=True, eq=False)
class Subspace:
    frame: np.ndarray

    @property
    def ambient_dim(self) -> int:
        return int(self.frame.shape[0])

    @property
    def rank(self) -> int:
        return int(self.frame.shape[1])

    @classmethod
    def span(cls, vectors: object, rank_tol: float = DEFAULT_RANK_TOLERANCE) -> "Subspace":
        return cls(orthonormal_frame(as_matrix(vectors, "vectors"), rank_tol))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0), dtype=complex))

    @classmethod
    def whole(cls, ambient_dim: int) -> "Subspace":
        return cls(np.eye(ambient_dim, dtype=complex))

    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.conj().T

    def contains(self, vector: np.ndarray, tol: float = 1e-9) -> bool:
        residual = vector - self.projector() @ vector
        return bool(np.linalg.norm(residual) <= tol * max(1.0, float(np.linalg.norm(vector))))

    def same_as(self, other: "Subspace", tol: float = 1e-9) -> bool:
        return same_span(self.frame, other.frame, tol)


@dataclass(frozen=True, eq=False)
class Polarization:
    space: SymplecticSpace
    plus_frame: Subspace
    minus_frame: Subspace
    # Columns of `basis` are the plus frame and minus frame rescaled so that
    # basis* J basis = diag(iI, -iI); graph parameters are read in these coordinates.
    basis: np.ndarray = field(repr=False)

    @property
    def n_plus(self) -> int:
        return self.plus_frame.rank

    @property
    def n_minus(self) -> int:
        return self.minus_frame.rank

    def to_coordinates(self, vectors: np.ndarray) -> np.ndarray:
        coordinates = solve_or_none(self.basis, vectors)
        if coordinates is None:
            raise SingularSystem("polarization basis is singular")
        return coordinates

    def from_coordinates(self, coordinates: np.ndarray) -> np.ndarray:
        return self.basis @ coordinates


@dataclass(frozen=True, eq=False)
class PseudoUnitary:
    space: SymplecticSpace
    matrix: np.ndarray

    def residual(self) -> float:
        """|| M* J M - J ||."""
        J = self.space.form
        return float(np.linalg.norm(self.matrix.conj().T @ J @ self.matrix - J))

    def validate(self, tol: float = 1e-9) -> None:
        residual = self.residual()
        if residual > tol * max(1.0, spectral_norm(self.matrix) ** 2):
            raise ContractionModelError(f"matrix is not pseudo-unitary (residual {residual:.3e})")

    def compose(self, other: "PseudoUnitary") -> "PseudoUnitary":
        if other.space.dim != self.space.dim:
            raise DimensionMismatch("pseudo-unitaries act on different spaces")
        return PseudoUnitary(self.space, self.matrix @ other.matrix)

    def inverse(self) -> "PseudoUnitary":
        # M* J M = J  =>  M^{-1} = J^{-1} M* J
        J = self.space.form
        return PseudoUnitary(self.space, np.linalg.solve(J, self.matrix.conj().T @ J))


@dataclass(frozen=True, eq=False)
class QuotientSpace:
    parent: SymplecticSpace
    iso: Subspace
    rep_frame: Subspace
    form: np.ndarray

    @property
    def space(self) -> SymplecticSpace:
        return space_from_form(self.form)

    @property
    def signature(self) -> tuple[int, int]:
        return self.space.signature

    def project(self, vectors: np.ndarray, tol: float = 1e-8) -> np.ndarray:
        """Coordinates of the classes of vectors of A^{perp_s} in rep_frame."""
        vectors = as_matrix(vectors, "vectors")
        coordinates = self.rep_frame.frame.conj().T @ vectors
        iso_part = self.iso.frame @ (self.iso.frame.conj().T @ vectors)
        residual = vectors - self.rep_frame.frame @ coordinates - iso_part
        if np.linalg.norm(residual) > tol * max(1.0, float(np.linalg.norm(vectors))):
            logger.warning(
                f"Projected vectors lie {np.linalg.norm(residual):.2e} away from the symplectic complement"
            )
        return coordinates

    def lift(self, coordinates: np.ndarray) -> np.ndarray:
        return self.rep_frame.frame @ coordinates


# Spaces


def space_from_form(form: object, tol: float = NONDEGENERACY_TOLERANCE) -> SymplecticSpace:
    J = as_matrix(form, "form")
    if J.shape[0] != J.shape[1]:
        raise DimensionMismatch(f"form must be square, got {J.shape}")
    if J.shape[0] == 0:
        return SymplecticSpace(J, (0, 0))
    scale = max(1.0, float(np.max(np.abs(J))))
    if np.linalg.norm(J.conj().T + J) > 1e-12 * scale * J.shape[0]:
        raise ContractionModelError("form matrix is not skew-adjoint")
    eigenvalues = scipy.linalg.eigvalsh(-1j * J)
    largest = float(np.max(np.abs(eigenvalues)))
    if float(np.min(np.abs(eigenvalues))) < tol * largest:
        raise SingularSystem("form is degenerate")
    return SymplecticSpace(J, (int(np.sum(eigenvalues > 0)), int(np.sum(eigenvalues < 0))))


def standard_space(n_plus: int, n_minus: int) -> SymplecticSpace:
    """Form i(x1, y1) - i(x2, y2) on C^{n_plus} + C^{n_minus}."""
    if n_plus < 0 or n_minus < 0 or n_plus + n_minus < 1:
        raise DimensionMismatch(f"standard space needs n_plus + n_minus >= 1, got ({n_plus}, {n_minus})")
    diagonal = np.concatenate([np.full(n_plus, 1j), np.full(n_minus, -1j)])
    return space_from_form(np.diag(diagonal))


def graph_space(n: int) -> SymplecticSpace:
    """Form (y1, x2) - (x1, y2) on pairs (x, y) of C^n."""
    if n < 1:
        raise DimensionMismatch(f"graph space needs n >= 1, got {n}")
    identity = np.eye(n, dtype=complex)
    zero = np.zeros((n, n), dtype=complex)
    return space_from_form(np.block([[zero, identity], [-identity, zero]]))


def make_space(kind: SpaceKind | str, *sizes: int) -> SymplecticSpace:
    """``make_space("standard", n_plus, n_minus)`` or ``make_space("graph", n)``."""
    kind = SpaceKind(kind)
    if kind is SpaceKind.STANDARD:
        if len(sizes) != 2:
            raise DimensionMismatch("standard space takes (n_plus, n_minus)")
        return standard_space(*sizes)
    if len(sizes) != 1:
        raise DimensionMismatch("graph space takes (n,)")
    return graph_space(sizes[0])


def direct_sum(first: SymplecticSpace, second: SymplecticSpace) -> SymplecticSpace:
    form = scipy.linalg.block_diag(first.form, second.form)
    return SymplecticSpace(
        form,
        (first.signature[0] + second.signature[0], first.signature[1] + second.signature[1]),
    )


def opposite(space: SymplecticSpace) -> SymplecticSpace:
    return SymplecticSpace(-space.form, (space.signature[1], space.signature[0]))


# Subspaces


def _check_ambient(space: SymplecticSpace, S: Subspace) -> None:
    if S.ambient_dim != space.dim:
        raise DimensionMismatch(
            f"subspace lives in dimension {S.ambient_dim}, space has dimension {space.dim}"
        )


def symp_complement(
    space: SymplecticSpace, S: Subspace, rank_tol: float = DEFAULT_RANK_TOLERANCE
) -> Subspace:
    _check_ambient(space, S)
    if S.rank == 0:
        return Subspace.whole(space.dim)
    return Subspace(null_frame(S.frame.conj().T @ space.form, rank_tol))


def classify_subspace(space: SymplecticSpace, S: Subspace, tol: float = 1e-9) -> SubspaceKind:
    _check_ambient(space, S)
    if S.rank == 0:
        return SubspaceKind.ISOTROPIC
    eigenvalues = scipy.linalg.eigvalsh(space.hermitian_form(S.frame))
    cutoff = tol * max(1.0, float(np.max(np.abs(space.form))))
    n_plus, n_minus = space.signature
    if np.all(np.abs(eigenvalues) <= cutoff):
        return SubspaceKind.ISOTROPIC
    if np.all(eigenvalues > cutoff):
        if S.rank == n_plus:
            return SubspaceKind.MAX_POS_DEFINITE
        return SubspaceKind.POS_DEFINITE_NOT_MAXIMAL
    if np.all(eigenvalues < -cutoff):
        if S.rank == n_minus:
            return SubspaceKind.MAX_NEG_DEFINITE
        return SubspaceKind.NEG_DEFINITE_NOT_MAXIMAL
    if np.all(eigenvalues >= -cutoff):
        return SubspaceKind.POS_SEMIDEFINITE
    if np.all(eigenvalues <= cutoff):
        return SubspaceKind.NEG_SEMIDEFINITE
    return SubspaceKind.INDEFINITE


def is_lagrangian(space: SymplecticSpace, S: Subspace, tol: float = 1e-9) -> bool:
    return (
        2 * S.rank == space.dim
        and classify_subspace(space, S, tol) is SubspaceKind.ISOTROPIC
    )


def quotient(
    space: SymplecticSpace,
    A: Subspace,
    tol: float = 1e-9,
    rank_tol: float = DEFAULT_RANK_TOLERANCE,
) -> QuotientSpace:
    """A^{perp_s}/A with representatives in the Euclidean orthocomplement of A."""
    _check_ambient(space, A)
    if classify_subspace(space, A, tol) is not SubspaceKind.ISOTROPIC:
        raise NotIsotropic("quotient needs an isotropic subspace")
    complement = symp_complement(space, A, rank_tol).frame
    # A lies inside its complement: A* C has unit singular values on A, zeros elsewhere
    rep = Subspace(complement @ null_frame(A.frame.conj().T @ complement, atol=math.sqrt(rank_tol)))
    expected = space.dim - 2 * A.rank
    if rep.rank != expected:
        raise SymplecticError(f"quotient has dimension {rep.rank}, expected {expected}")
    form = space.gram(rep.frame, rep.frame)
    quotient_space = QuotientSpace(space, A, rep, form)
    logger.debug(f"Quotient by rank-{A.rank} isotropic subspace has signature {quotient_space.signature}")
    return quotient_space


# Polarizations and graph coordinates


def polarization(space: SymplecticSpace, plus: Subspace, tol: float = 1e-9) -> Polarization:
    if classify_subspace(space, plus, tol) is not SubspaceKind.MAX_POS_DEFINITE:
        raise NotPositiveDefinite("polarization needs a maximal positive-definite subspace")
    minus = Subspace(phase_normalize(symp_complement(space, plus).frame))
    if classify_subspace(space, minus, tol) is not SubspaceKind.MAX_NEG_DEFINITE:
        raise NotPositiveDefinite("symplectic complement of the polarization is not negative definite")
    plus_basis = plus.frame @ inv_psd_sqrt(space.hermitian_form(plus.frame))
    minus_basis = minus.frame @ inv_psd_sqrt(-space.hermitian_form(minus.frame))
    return Polarization(space, plus, minus, np.hstack([plus_basis, minus_basis]))


def standard_polarization(space: SymplecticSpace) -> Polarization:
    """L spanned by the eigenvectors of -iJ with positive eigenvalue."""
    eigenvalues, eigenvectors = scipy.linalg.eigh(-1j * space.form)
    positive = eigenvectors[:, eigenvalues > 0]
    return polarization(space, Subspace(phase_normalize(positive[:, ::-1])))


def graph_of_param(pol: Polarization, B: object) -> Subspace:
    """W = {x + Bx : x in L}."""
    B = as_matrix(B, "B")
    if B.shape != (pol.n_minus, pol.n_plus):
        raise DimensionMismatch(f"B must be {pol.n_minus}x{pol.n_plus}, got {B.shape}")
    if spectral_norm(B) >= 1.0:
        raise NotStrictContraction(f"||B|| = {spectral_norm(B):.6f} >= 1")
    coordinates = np.vstack([np.eye(pol.n_plus, dtype=complex), B])
    return Subspace.span(pol.from_coordinates(coordinates))


def graph_param_of(pol: Polarization, W: Subspace, tol: float = 1e-9) -> np.ndarray:
    _check_ambient(pol.space, W)
    if classify_subspace(pol.space, W, tol) is not SubspaceKind.MAX_POS_DEFINITE:
        raise NotPositiveDefinite("W is not a maximal positive-definite subspace")
    coordinates = pol.to_coordinates(W.frame)
    top = coordinates[: pol.n_plus]
    bottom = coordinates[pol.n_plus :]
    # B = C2 C1^{-1}
    return np.linalg.solve(top.T, bottom.T).T


# Pseudo-unitary group


def contraction_block_matrix(B: np.ndarray) -> np.ndarray:
    """The pseudo-unitary sending L (parameter 0) to the graph of B, in graph coordinates."""
    n_minus, n_plus = B.shape
    if spectral_norm(B) >= 1.0:
        raise NotStrictContraction(f"||B|| = {spectral_norm(B):.6f} >= 1")
    left = inv_psd_sqrt(np.eye(n_plus) - B.conj().T @ B)
    right = inv_psd_sqrt(np.eye(n_minus) - B @ B.conj().T)
    return np.block([[left, -B.conj().T @ right], [B @ left, -right]])


def mobius(blocks: np.ndarray, n_plus: int, B: np.ndarray) -> np.ndarray:
    """B' = (M21 + M22 B)(M11 + M12 B)^{-1} for a matrix in graph coordinates."""
    M11 = blocks[:n_plus, :n_plus]
    M12 = blocks[:n_plus, n_plus:]
    M21 = blocks[n_plus:, :n_plus]
    M22 = blocks[n_plus:, n_plus:]
    denominator = M11 + M12 @ B
    solution = solve_or_none(denominator.T, (M21 + M22 @ B).T)
    if solution is None:
        raise NotAGraph("M11 + M12 B is singular; the image is not a graph over L")
    return solution.T


def pseudo_unitary_of_contraction(pol: Polarization, B: object) -> PseudoUnitary:
    B = as_matrix(B, "B")
    if B.shape != (pol.n_minus, pol.n_plus):
        raise DimensionMismatch(f"B must be {pol.n_minus}x{pol.n_plus}, got {B.shape}")
    blocks = contraction_block_matrix(B)
    matrix = pol.basis @ blocks @ np.linalg.inv(pol.basis)
    return PseudoUnitary(pol.space, matrix)


def mobius_apply(M: PseudoUnitary, pol: Polarization, B: object) -> np.ndarray:
    B = as_matrix(B, "B")
    if B.shape != (pol.n_minus, pol.n_plus):
        raise DimensionMismatch(f"B must be {pol.n_minus}x{pol.n_plus}, got {B.shape}")
    blocks = np.linalg.solve(pol.basis, M.matrix @ pol.basis)
    return mobius(blocks, pol.n_plus, B)


# Cayley transform


def cayley_matrix(n: int) -> np.ndarray:
    """beta(x, y) = ((y + ix)/sqrt 2, (y - ix)/sqrt 2)."""
    identity = np.eye(n, dtype=complex)
    return np.block([[1j * identity, identity], [-1j * identity, identity]]) / math.sqrt(2.0)


@singledispatch
def cayley(value: object) -> object:
    raise TypeError(f"cayley is not defined for {type(value).__name__}")


@cayley.register
def _(value: np.ndarray) -> np.ndarray:
    if value.shape[0] % 2:
        raise DimensionMismatch(f"cayley needs an even dimension, got {value.shape[0]}")
    return cayley_matrix(value.shape[0] // 2) @ value


@cayley.register
def _(value: Subspace) -> Subspace:
    if value.ambient_dim % 2:
        raise DimensionMismatch(f"cayley needs an even dimension, got {value.ambient_dim}")
    return Subspace.span(cayley_matrix(value.ambient_dim // 2) @ value.frame)


def subspace_angles(first: Subspace, second: Subspace) -> np.ndarray:
    return principal_angles(first.frame, second.frame)
