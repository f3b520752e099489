"""
The four-block reproducing kernel of a contractive Weyl function.

For p, q in the two discs with coordinates lam and mu:

    plus  x plus  : (I - B(lam) B(mu)*) / (1 - lam conj(mu))
    minus x minus : (I - B(conj lam)* B(conj mu)) / (1 - lam conj(mu))
    plus  x minus : (B(lam) - B(conj mu)) / (lam - conj(mu))
    minus x plus  : (B(conj lam)* - B(mu)*) / (lam - conj(mu))

Cross-disc pairs with lam = conj(mu) take the derivative limit, which needs a
realization; sampled Schur functions refuse those pairs.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from utils.linalg import DEFAULT_RANK_TOLERANCE, solve_or_none

from .contraction import (
    BoundaryQuadruple,
    ContractionAnalysis,
    canonical_quadruple,
    defect_fiber,
    weyl_function,
)
from .discs import DiscPoint, confluent
from .exceptions import (
    ConfluentPointUnsupported,
    ContractionModelError,
    GridError,
    SingularSystem,
)
from .realization import SchurFunction, SchurRealization

logger = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-10


def weyl_value(B: SchurFunction, point: DiscPoint) -> np.ndarray:
    """B(lam) on the plus disc and B(conj lam)* on the minus disc."""
    if point.in_plus:
        return B(point.coord)
    return B(point.coord.conjugate()).conj().T


def fiber_dim(B: SchurFunction, point: DiscPoint) -> int:
    return B.n_minus if point.in_plus else B.n_plus


def kernel_block(B: SchurFunction, p: DiscPoint, q: DiscPoint) -> np.ndarray:
    lam, mu = p.coord, q.coord
    if p.disc is q.disc:
        denominator = 1.0 - lam * mu.conjugate()
        if p.in_plus:
            product = B(lam) @ B(mu).conj().T
            return (np.eye(B.n_minus) - product) / denominator
        product = B(lam.conjugate()).conj().T @ B(mu.conjugate())
        return (np.eye(B.n_plus) - product) / denominator

    if confluent(p, q):
        if not isinstance(B, SchurRealization):
            raise ConfluentPointUnsupported(
                f"confluent pair ({p}, {q}) needs a realization, got sampled input"
            )
        if p.in_plus:
            return B.derivative(lam)
        return B.derivative(mu).conj().T

    denominator = lam - mu.conjugate()
    if p.in_plus:
        return (B(lam) - B(mu.conjugate())) / denominator
    return (B(lam.conjugate()).conj().T - B(mu).conj().T) / denominator


def kernel_slope_at_zero_minus(B: SchurRealization, q: DiscPoint) -> np.ndarray:
    """
    d/dlam of K(lam, q) at lam = 0-, with h(lam) = B(conj lam)*.

    q on the plus disc: K is the divided difference of h at (lam, conj mu).
    q on the minus disc: K = (I - h(lam) h(mu)*) / (1 - lam conj(mu)).
    """
    dual = B.dual()
    mu = q.coord
    if q.in_plus:
        if dual.state_dim == 0:
            return np.zeros((B.n_plus, B.n_minus), dtype=complex)
        resolvent = np.linalg.inv(np.eye(dual.state_dim) - mu.conjugate() * dual.A)
        return dual.C @ dual.A @ resolvent @ dual.B_in
    h0 = dual.D
    h_mu = dual(mu)
    slope_h = dual.derivative(0.0)
    return -slope_h @ h_mu.conj().T + (np.eye(B.n_plus) - h0 @ h_mu.conj().T) * mu.conjugate()


def confluent_difference_check(
    B: SchurRealization, lam: complex, offsets: Sequence[float] = (1e-3, 1e-4, 1e-5)
) -> list[float]:
    """
    Distance between the confluent cross-disc value at lam and the difference
    quotient at conj(mu) = lam + h; shrinks linearly in h.
    """
    p = DiscPoint.plus(lam)
    exact = kernel_block(B, p, p.mirror())
    errors = []
    for h in offsets:
        q = DiscPoint.minus((lam + h).conjugate())
        errors.append(float(np.linalg.norm(kernel_block(B, p, q) - exact)))
    return errors


# Independent routes to the kernel


def _fiber_frame(
    B_at: np.ndarray, point: DiscPoint
) -> tuple[np.ndarray, np.ndarray]:
    """
    Frame of the fiber at ``point`` in C^{n_plus} + C^{n_minus} and its Gram matrix.

    Plus points use [B(lam)*; I] with metric +i[., .]; minus points use
    [I; B(conj lam)] with metric -i[., .]. ``B_at`` is the matrix B at the
    plus-disc argument (lam for plus points, conj lam for minus points).
    """
    n_minus, n_plus = B_at.shape
    if point.in_plus:
        frame = np.vstack([B_at.conj().T, np.eye(n_minus)])
        gram = np.eye(n_minus) - B_at @ B_at.conj().T
    else:
        frame = np.vstack([np.eye(n_plus), B_at])
        gram = np.eye(n_plus) - B_at.conj().T @ B_at
    return frame, gram


def projection_pairing(
    B_p: np.ndarray, B_p_mirror: np.ndarray, B_q: np.ndarray, p: DiscPoint, q: DiscPoint
) -> np.ndarray:
    """
    Q(p, q): decompose each column of the fiber frame at q along the fiber at the
    mirror of p onto the fiber at p, then apply the fiber metric at p.
    """
    frame_p, gram_p = _fiber_frame(B_p, p)
    frame_mirror, _ = _fiber_frame(B_p_mirror, p.mirror())
    frame_q, _ = _fiber_frame(B_q, q)
    system = np.hstack([frame_p, frame_mirror])
    solution = solve_or_none(system, frame_q)
    if solution is None:
        raise SingularSystem(f"fibers at {p} and its mirror do not split the space")
    y = solution[: frame_p.shape[1]]
    return gram_p @ y


def _plus_argument_value(values: dict[DiscPoint, np.ndarray], point: DiscPoint) -> np.ndarray:
    # B evaluated at the plus-disc argument belonging to point
    value = values[point]
    return value if point.in_plus else value.conj().T


def kernel_oracle(
    source: ContractionAnalysis | SchurRealization,
    p: DiscPoint,
    q: DiscPoint,
    route: str = "projection",
    quadruple: BoundaryQuadruple | None = None,
) -> np.ndarray:
    """
    The kernel computed without the case table.

    ``projection`` splits the coefficient space into fiber and mirror fiber and
    reads off the pairing, using B from the gamma-field route (analysis) or the
    realization. ``inner_product`` needs an analysis and returns E(p)* E(q),
    where E(p) is phi_- at the mirror of p for plus points and phi_+ at the
    mirror for minus points.
    """
    if route == "inner_product":
        if not isinstance(source, ContractionAnalysis):
            raise ContractionModelError("the inner-product route needs a contraction analysis")
        quadruple = quadruple or canonical_quadruple(source)
        return _section_matrix(source, quadruple, p).conj().T @ _section_matrix(source, quadruple, q)
    if route != "projection":
        raise ValueError(f"unknown kernel route {route!r}")

    if confluent(p, q):
        raise ConfluentPointUnsupported("the projection route has no confluent limit")

    if isinstance(source, ContractionAnalysis):
        quadruple = quadruple or canonical_quadruple(source)
        values = {
            point: weyl_function(source, quadruple, point) for point in {p, p.mirror(), q}
        }
    else:
        values = {point: weyl_value(source, point) for point in {p, p.mirror(), q}}

    Q = projection_pairing(
        _plus_argument_value(values, p),
        _plus_argument_value(values, p.mirror()),
        _plus_argument_value(values, q),
        p,
        q,
    )
    lam, mu = p.coord, q.coord
    if p.disc is q.disc:
        return Q / (1.0 - lam * mu.conjugate())
    return -Q / (lam - mu.conjugate())


def _section_matrix(an: ContractionAnalysis, quadruple: BoundaryQuadruple, point: DiscPoint) -> np.ndarray:
    """E(point): the n x fiber_dim matrix with hat(x)(point) = E(point)* x."""
    return defect_fiber(an, quadruple, point.mirror()).phi


# Gram matrices


@dataclass(frozen=True, eq=False)
class GramMatrix:
    grid: tuple[DiscPoint, ...]
    blocks: np.ndarray
    fiber_dims: tuple[int, ...]
    rank_tol: float = DEFAULT_RANK_TOLERANCE

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.concatenate([[0], np.cumsum(self.fiber_dims)]))

    @cached_property
    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (descending) and eigenvectors of the Hermitian Gram matrix."""
        eigenvalues, eigenvectors = scipy.linalg.eigh(self.blocks)
        return eigenvalues[::-1], eigenvectors[:, ::-1]

    @property
    def norm(self) -> float:
        eigenvalues, _ = self.eig
        return float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0

    @property
    def min_eigenvalue(self) -> float:
        eigenvalues, _ = self.eig
        return float(eigenvalues[-1]) if eigenvalues.size else 0.0

    @property
    def rank(self) -> int:
        eigenvalues, _ = self.eig
        if not eigenvalues.size or eigenvalues[0] <= 0:
            return 0
        return int(np.sum(eigenvalues > self.rank_tol * eigenvalues[0]))

    def is_psd(self, tol: float = 1e-9) -> bool:
        return self.min_eigenvalue >= -tol * max(self.norm, 1.0)

    def block(self, i: int, j: int) -> np.ndarray:
        rows = slice(self.offsets[i], self.offsets[i + 1])
        cols = slice(self.offsets[j], self.offsets[j + 1])
        return self.blocks[rows, cols]

    def point_rows(self, i: int) -> slice:
        return slice(self.offsets[i], self.offsets[i + 1])


def gram_assemble(
    B: SchurFunction, grid: Sequence[DiscPoint], rank_tol: float = DEFAULT_RANK_TOLERANCE
) -> GramMatrix:
    if not grid:
        raise GridError("cannot assemble a Gram matrix on an empty grid")
    if len(set(grid)) != len(grid):
        raise GridError("grid contains repeated points")
    dims = [fiber_dim(B, p) for p in grid]
    offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    size = int(offsets[-1])
    matrix = np.zeros((size, size), dtype=complex)
    # Both triangles are evaluated so the Hermitian check below is a real test
    for i, p in enumerate(grid):
        for j, q in enumerate(grid):
            matrix[offsets[i] : offsets[i + 1], offsets[j] : offsets[j + 1]] = kernel_block(B, p, q)

    asymmetry = float(np.linalg.norm(matrix - matrix.conj().T))
    if asymmetry > HERMITIAN_TOLERANCE * max(1.0, float(np.linalg.norm(matrix))):
        logger.error(f"Gram matrix is not Hermitian (defect {asymmetry:.3e})")
        raise ContractionModelError(f"Gram matrix is not Hermitian (defect {asymmetry:.3e})")
    matrix = 0.5 * (matrix + matrix.conj().T)

    gram = GramMatrix(tuple(grid), matrix, tuple(dims), rank_tol)
    logger.debug(
        f"Assembled {size}x{size} Gram matrix on {len(grid)} points: "
        f"rank {gram.rank}, min eigenvalue {gram.min_eigenvalue:.3e}"
    )
    return gram
