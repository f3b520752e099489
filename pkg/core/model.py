"""
The functional model of a c.n.u. contraction on sampled sections.

Sections are sampled on a grid over both discs (always containing 0-).
The model space is the span of the kernel sections; its orthonormal basis
comes from the Gram eigendecomposition, and the model operator acts by

    plus disc : lam f(lam) - (B(lam) - C)(I - B(0+)* C)^{-1} f(0-)
    minus disc: [f(lam) - (I - B(conj lam)* C)(I - B(0+)* C)^{-1} f(0-)] / lam
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from utils.linalg import as_matrix, is_unitary, spectral_norm

from .conf import get_setting
from .contraction import (
    BoundaryQuadruple,
    ContractionAnalysis,
    canonical_quadruple,
    defect_fiber,
    weyl_realization,
)
from .discs import DiscPoint, make_grid, refine_grid, require_zero_minus, split_by_disc
from .exceptions import (
    ContractionModelError,
    DimensionMismatch,
    GridError,
    ModelError,
    ModelNotFinite,
    NotStrictContraction,
    SingularSystem,
)
from .kernel import GramMatrix, gram_assemble, kernel_slope_at_zero_minus, weyl_value
from .realization import SchurFunction, SchurRealization

logger = logging.getLogger(__name__)

# Least-squares residual allowed per unit of ||matrix|| when projecting the model operator
MODEL_RESIDUAL_FACTOR = 1e-8

# Words up to length 2n number 2^(2n+1) - 2; past this size the check is refused
MAX_TRACE_WORD_DIM = 6


class ZeroMinusMode(Enum):
    DROP = "drop"
    LIMIT = "limit"


@dataclass(frozen=True, eq=False)
class SampledSection:
    """
    Values of one or more sections on a grid: values[i] is fiber_dim x k,
    in H_- coordinates at plus points and H_+ coordinates at minus points.
    """

    grid: tuple[DiscPoint, ...]
    values: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.grid) != len(self.values):
            raise GridError("one value per grid point is required")
        widths = {v.shape[1] for v in self.values}
        if len(widths) > 1:
            raise DimensionMismatch(f"sections disagree on column count: {sorted(widths)}")

    @property
    def columns(self) -> int:
        return int(self.values[0].shape[1]) if self.values else 0

    @property
    def has_zero_minus(self) -> bool:
        return any(p.is_zero_minus for p in self.grid)

    def at(self, point: DiscPoint) -> np.ndarray:
        return self.values[self.grid.index(point)]

    def at_zero_minus(self) -> np.ndarray:
        return self.values[require_zero_minus(self.grid)]

    def stacked(self) -> np.ndarray:
        return np.vstack(self.values)

    def restrict(self, grid: Sequence[DiscPoint]) -> "SampledSection":
        return SampledSection(tuple(grid), tuple(self.at(p) for p in grid))

    def max_distance(self, other: "SampledSection") -> float:
        if self.grid != other.grid:
            raise GridError("sections live on different grids")
        return max(
            (float(np.max(np.abs(a - b), initial=0.0)) for a, b in zip(self.values, other.values, strict=True)),
            default=0.0,
        )

    @classmethod
    def from_stacked(
        cls, grid: Sequence[DiscPoint], dims: Sequence[int], stacked: np.ndarray
    ) -> "SampledSection":
        offsets = np.concatenate([[0], np.cumsum(dims)]).astype(int)
        return cls(
            tuple(grid),
            tuple(stacked[offsets[i] : offsets[i + 1]] for i in range(len(grid))),
        )


@dataclass(frozen=True, eq=False)
class MarkedDisc:
    schur: SchurRealization
    mark: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "mark", as_matrix(self.mark, "mark"))
        if self.mark.shape != (self.schur.n_minus, self.schur.n_plus):
            raise DimensionMismatch(
                f"mark must be {self.schur.n_minus}x{self.schur.n_plus}, got {self.mark.shape}"
            )

    def validate(self) -> float:
        norm = spectral_norm(self.mark)
        if norm >= 1.0:
            raise NotStrictContraction(f"||mark|| = {norm:.6f} >= 1")
        return self.schur.validate()


@dataclass(frozen=True, eq=False)
class ModelSpace:
    """Orthonormal basis of the span of kernel sections on a grid."""

    gram: GramMatrix
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def grid(self) -> tuple[DiscPoint, ...]:
        return self.gram.grid

    @property
    def evaluation(self) -> np.ndarray:
        """Sampled values of the orthonormal basis (one column per basis element)."""
        return self.eigenvectors * np.sqrt(self.eigenvalues)

    @property
    def kernel_coefficients(self) -> np.ndarray:
        """Basis element k = sum over grid of K(., q) times these coefficients."""
        return self.eigenvectors / np.sqrt(self.eigenvalues)

    def basis_sections(self) -> SampledSection:
        return SampledSection.from_stacked(self.grid, self.gram.fiber_dims, self.evaluation)

    def coefficients(self, section: SampledSection) -> np.ndarray:
        if section.grid != self.grid:
            section = section.restrict(self.grid)
        return (self.eigenvectors.conj().T @ section.stacked()) / np.sqrt(self.eigenvalues)[:, None]

    def inner(self, first: SampledSection, second: SampledSection) -> np.ndarray:
        """Entry (i, j) is the model-space inner product of first_j with second_i."""
        return self.coefficients(second).conj().T @ self.coefficients(first)


def model_space(gram: GramMatrix, tol: float | None = None) -> ModelSpace:
    tol = float(get_setting("RANK_TOLERANCE") if tol is None else tol)
    eigenvalues, eigenvectors = gram.eig
    if not eigenvalues.size or eigenvalues[0] <= 0:
        return ModelSpace(gram, np.zeros(0), np.zeros((gram.blocks.shape[0], 0)))
    keep = eigenvalues > tol * eigenvalues[0]
    return ModelSpace(gram, eigenvalues[keep], eigenvectors[:, keep])


@dataclass(frozen=True, eq=False)
class ModelOperator:
    dim: int
    matrix: np.ndarray
    basis_data: ModelSpace = field(repr=False)
    residual: float
    gram_rank: int
    refined_rank: int

    @property
    def norm(self) -> float:
        return spectral_norm(self.matrix)


# Hat transform


def hat_section(
    an: ContractionAnalysis,
    quadruple: BoundaryQuadruple,
    x: object,
    grid: Sequence[DiscPoint],
) -> SampledSection:
    """
    f(lam) = phi_-(conj lam)* x on plus points and phi_+(conj lam)* x on minus
    points, the mirror fibers carrying the boundary normalization.
    """
    require_zero_minus(grid)
    x = as_matrix(x, "x")
    if x.shape[0] != an.n:
        raise DimensionMismatch(f"x must have {an.n} rows, got {x.shape[0]}")
    values = tuple(defect_fiber(an, quadruple, p.mirror()).phi.conj().T @ x for p in grid)
    return SampledSection(tuple(grid), values)


# Model operator


def model_apply(
    B: SchurFunction,
    mark: object,
    f: SampledSection,
    zero_minus: ZeroMinusMode | str | None = None,
    f_slope_zero_minus: np.ndarray | None = None,
) -> SampledSection:
    """
    Apply the model operator with boundary parameter ``mark`` to sampled sections.

    At 0- the minus-disc formula is a removable 0/0: ``drop`` leaves 0- out of
    the output grid, ``limit`` evaluates f'(0-) + h'(0) C (I - h(0) C)^{-1} f(0-)
    with h(lam) = B(conj lam)*, which needs a realization and the slope of f.
    """
    mode = ZeroMinusMode(zero_minus or get_setting("OUTPUT_ZERO_MINUS"))
    C = as_matrix(mark, "mark")
    if C.shape != (B.n_minus, B.n_plus):
        raise DimensionMismatch(f"mark must be {B.n_minus}x{B.n_plus}, got {C.shape}")
    f0 = f.at_zero_minus()
    B0 = B(0.0)
    try:
        center = np.linalg.solve(np.eye(B.n_plus) - B0.conj().T @ C, f0)
    except np.linalg.LinAlgError as e:
        raise SingularSystem("I - B(0+)* C is singular") from e

    grid: list[DiscPoint] = []
    values: list[np.ndarray] = []
    for point, value in zip(f.grid, f.values, strict=True):
        lam = point.coord
        if point.in_plus:
            out = lam * value - (B(lam) - C) @ center
        elif point.is_zero_minus:
            if mode is ZeroMinusMode.DROP:
                continue
            if not isinstance(B, SchurRealization) or f_slope_zero_minus is None:
                raise ContractionModelError("the 0- limit needs a realization and the slope of f at 0-")
            h_slope = B.dual().derivative(0.0)
            out = f_slope_zero_minus + h_slope @ C @ center
        else:
            h = weyl_value(B, point)
            out = (value - (np.eye(B.n_plus) - h @ C) @ center) / lam
        grid.append(point)
        values.append(out)
    return SampledSection(tuple(grid), tuple(values))


@dataclass(frozen=True)
class ModelReport:
    max_residual_t1: float
    max_residual_model: float
    points: int
    samples: int


def verify_model(
    an: ContractionAnalysis,
    quadruple: BoundaryQuadruple,
    mark: object,
    grid: Sequence[DiscPoint],
    samples: int = 8,
    seed: int | None = None,
) -> ModelReport:
    """
    Residuals of the boundary identities for random a in A_T^{perp_s}, and of
    model_apply(hat x) = hat(T x) over the standard basis, on the grid.
    """
    seed = int(get_setting("SEED") if seed is None else seed)
    rng = np.random.default_rng(seed)
    B = weyl_realization(an, quadruple)
    n = an.n

    coords = rng.standard_normal((an.ATperp.rank, samples)) + 1j * rng.standard_normal((an.ATperp.rank, samples))
    a = an.ATperp.frame @ coords
    hat_x = hat_section(an, quadruple, a[:n], grid)
    hat_y = hat_section(an, quadruple, a[n:], grid)
    gamma_plus, gamma_minus = quadruple.boundary_values(a)
    t1 = 0.0
    for point in grid:
        lam = point.coord
        fx, fy = hat_x.at(point), hat_y.at(point)
        if point.in_plus:
            defect = lam * fx - fy - (B(lam) @ gamma_plus - gamma_minus)
        else:
            defect = fx - lam * fy - (gamma_plus - weyl_value(B, point) @ gamma_minus)
        t1 = max(t1, float(np.max(np.abs(defect))))

    basis = np.eye(n)
    applied = model_apply(B, mark, hat_section(an, quadruple, basis, grid), ZeroMinusMode.DROP)
    expected = hat_section(an, quadruple, an.T @ basis, grid).restrict(applied.grid)
    model_residual = applied.max_distance(expected)

    logger.info(f"Model verification: t1 residual {t1:.3e}, model residual {model_residual:.3e}")
    return ModelReport(t1, model_residual, len(grid), samples)


# Graph characterizations


class Membership(Enum):
    IN_HAT_A = "in_hat_A"
    IN_HAT_APERP = "in_hat_Aperp"
    NEITHER = "neither"


@dataclass(frozen=True, eq=False)
class MembershipResult:
    kind: Membership
    residual: float
    x_plus: np.ndarray | None = None
    x_minus: np.ndarray | None = None


def graph_membership(
    B: SchurFunction, f: SampledSection, g: SampledSection, tol: float | None = None
) -> MembershipResult:
    """
    Decide whether (f, g) is the hat of a pair in A_T, in A_T^{perp_s}, or neither.

    A_T: g = lam f on the plus disc and lam g = f on the minus disc. Otherwise
    solve for boundary values (x_+, x_-) with lam f - g = B(lam) x_+ - x_- on the
    plus disc and f - lam g = x_+ - B(conj lam)* x_- on the minus disc.
    """
    tol = float(get_setting("TOLERANCE") if tol is None else tol)
    if f.grid != g.grid:
        raise GridError("f and g must be sampled on the same grid")
    if f.columns != 1 or g.columns != 1:
        raise DimensionMismatch("graph_membership takes single sections")
    require_zero_minus(f.grid)
    plus, minus = split_by_disc(f.grid)
    if len(plus) < 2 or len(minus) < 3:
        raise GridError("need at least two points per disc besides 0-")

    scale = max(1.0, max(float(np.max(np.abs(v))) for v in f.values + g.values))
    a_defect = 0.0
    for point, fv, gv in zip(f.grid, f.values, g.values, strict=True):
        lam = point.coord
        defect = gv - lam * fv if point.in_plus else lam * gv - fv
        a_defect = max(a_defect, float(np.max(np.abs(defect))))
    if a_defect <= tol * scale:
        return MembershipResult(Membership.IN_HAT_A, a_defect)

    n_plus, n_minus = B.n_plus, B.n_minus
    rows: list[np.ndarray] = []
    rhs: list[np.ndarray] = []
    for point, fv, gv in zip(f.grid, f.values, g.values, strict=True):
        lam = point.coord
        if point.in_plus:
            rows.append(np.hstack([B(lam), -np.eye(n_minus)]))
            rhs.append(lam * fv - gv)
        else:
            rows.append(np.hstack([np.eye(n_plus), -weyl_value(B, point)]))
            rhs.append(fv - lam * gv)
    system, target = np.vstack(rows), np.vstack(rhs)
    solution, *_ = scipy.linalg.lstsq(system, target)
    residual = float(np.max(np.abs(system @ solution - target)))
    if residual <= tol * scale:
        return MembershipResult(Membership.IN_HAT_APERP, residual, solution[:n_plus], solution[n_plus:])
    return MembershipResult(Membership.NEITHER, residual)


def standard_pairing(
    space: ModelSpace,
    f1: SampledSection,
    g1: SampledSection,
    f2: SampledSection,
    g2: SampledSection,
) -> complex:
    """[(f1, g1), (f2, g2)] = i <f1, f2> - i <g1, g2> in the model-space inner product."""
    return complex(1j * space.inner(f1, f2)[0, 0] - 1j * space.inner(g1, g2)[0, 0])


def hat_gram(
    an: ContractionAnalysis, quadruple: BoundaryQuadruple, grid: Sequence[DiscPoint]
) -> np.ndarray:
    """Model-space Gram matrix of hat(e_1), ..., hat(e_n); the identity when hat is isometric."""
    space = model_space(gram_assemble(weyl_realization(an, quadruple), grid))
    hats = hat_section(an, quadruple, np.eye(an.n), grid)
    return space.inner(hats, hats)


# Synthesis


def synthesize(
    md: MarkedDisc,
    grid: Sequence[DiscPoint] | None = None,
    tol: float | None = None,
    zero_minus: ZeroMinusMode | str | None = None,
    radii: Sequence[float] | None = None,
    angles: int | None = None,
    seed: int | None = None,
    rmax: float | None = None,
) -> ModelOperator:
    """
    Build the model operator of a marked disc.

    The Gram rank on ``grid`` must agree with the rank on ``grid`` joined with a
    refined grid; otherwise the model space is not finite-dimensional at this
    scale and ModelNotFinite is raised.
    """
    tol = float(get_setting("TOLERANCE") if tol is None else tol)
    rank_tol = float(get_setting("RANK_TOLERANCE"))
    mode = ZeroMinusMode(zero_minus or get_setting("OUTPUT_ZERO_MINUS"))
    radii = list(get_setting("GRID_RADII") if radii is None else radii)
    angles = int(get_setting("GRID_ANGLES") if angles is None else angles)
    seed = int(get_setting("SEED") if seed is None else seed)
    md.validate()

    grid = list(grid) if grid is not None else make_grid(radii, angles, seed, rmax=rmax)
    require_zero_minus(grid)
    B = md.schur
    gram = gram_assemble(B, grid, rank_tol)

    refined_radii, refined_angles = refine_grid(radii, angles, rmax)
    extra = make_grid(refined_radii, refined_angles, seed + 1, rmax=rmax, include_origins=False)
    refined_rank = gram_assemble(B, grid + extra, rank_tol).rank
    if refined_rank != gram.rank:
        raise ModelNotFinite(
            f"Gram rank grows from {gram.rank} to {refined_rank} under refinement; "
            "model space not finite-dimensional at this scale"
        )

    space = model_space(gram, rank_tol)
    basis = space.basis_sections()
    slope = None
    if mode is ZeroMinusMode.LIMIT:
        slopes = np.hstack([kernel_slope_at_zero_minus(B, q) for q in grid])
        slope = slopes @ space.kernel_coefficients

    image = model_apply(B, md.mark, basis, mode, slope)
    out_rows = np.vstack([space.evaluation[gram.point_rows(grid.index(p))] for p in image.grid])
    target = image.stacked()
    matrix, *_ = scipy.linalg.lstsq(out_rows, target)
    residual = float(np.linalg.norm(out_rows @ matrix - target))

    operator = ModelOperator(space.dim, matrix, space, residual, gram.rank, refined_rank)
    if residual > MODEL_RESIDUAL_FACTOR * max(operator.norm, 1.0):
        raise ModelError(
            f"model operator does not preserve the model space: residual {residual:.3e} "
            f"against ||matrix|| = {operator.norm:.6f}"
        )
    if operator.norm > 1.0 + max(tol, 1e-8):
        logger.warning(f"Synthesized operator has norm {operator.norm:.12f} > 1")
    logger.info(
        f"Synthesized {space.dim}x{space.dim} model operator "
        f"(residual {residual:.3e}, norm {operator.norm:.6f})"
    )
    return operator


# Certificates


class Verdict(Enum):
    EQUIVALENT = "equivalent"
    NOT_EQUIVALENT = "not_equivalent"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class EquivalenceReport:
    verdict: Verdict
    singular_value_deviation: float
    spectrum_deviation: float
    eigenvalue_deviation: float
    trace_word_deviation: float
    words_checked: int


def _trace_words(S: np.ndarray, max_length: int) -> list[complex]:
    """Traces of all words in S, S* up to max_length, in a fixed order."""
    letters = (S, S.conj().T)
    traces: list[complex] = []
    stack: list[tuple[np.ndarray, int]] = [(np.eye(S.shape[0], dtype=complex), 0)]
    while stack:
        prefix, length = stack.pop()
        if length == max_length:
            continue
        for letter in reversed(letters):
            word = prefix @ letter
            traces.append(complex(np.trace(word)))
            stack.append((word, length + 1))
    return traces


def equivalence_check(S1: object, S2: object, tol: float | None = None) -> EquivalenceReport:
    """
    Numerical unitary-equivalence test: singular values, characteristic
    polynomial, and traces of all words in (S, S*) up to length 2n.

    Deviations within tol give ``equivalent``; any deviation above 100 tol gives
    ``not_equivalent``; the band in between is ``inconclusive``.
    """
    tol = float(get_setting("TOLERANCE") if tol is None else tol)
    S1, S2 = as_matrix(S1, "S1"), as_matrix(S2, "S2")
    if S1.shape != S2.shape or S1.shape[0] != S1.shape[1]:
        return EquivalenceReport(Verdict.NOT_EQUIVALENT, np.inf, np.inf, np.inf, np.inf, 0)
    n = S1.shape[0]
    if n > MAX_TRACE_WORD_DIM:
        raise DimensionMismatch(
            f"equivalence check handles dimension up to {MAX_TRACE_WORD_DIM}, got {n}: "
            f"trace words would number {2 ** (2 * n + 1) - 2}"
        )

    sv = float(np.max(np.abs(scipy.linalg.svdvals(S1) - scipy.linalg.svdvals(S2))))
    charpoly = float(np.max(np.abs(np.poly(S1) - np.poly(S2))))
    e1, e2 = scipy.linalg.eigvals(S1), scipy.linalg.eigvals(S2)
    rows, cols = linear_sum_assignment(np.abs(e1[:, None] - e2[None, :]))
    eig = float(np.max(np.abs(e1[rows] - e2[cols])))

    traces1 = _trace_words(S1, 2 * n)
    traces2 = _trace_words(S2, 2 * n)
    scale = max(1.0, spectral_norm(S1), spectral_norm(S2)) ** (2 * n)
    words = float(np.max(np.abs(np.array(traces1) - np.array(traces2)))) / scale

    # Eigenvalues of defective matrices move like tol^(1/n); the characteristic
    # polynomial carries the spectral test, eigenvalues are reported only.
    decisive = max(sv, charpoly, words)
    if decisive <= tol:
        verdict = Verdict.EQUIVALENT
    elif decisive > 100 * tol:
        verdict = Verdict.NOT_EQUIVALENT
    else:
        verdict = Verdict.INCONCLUSIVE
    logger.debug(f"Equivalence check: sv {sv:.2e}, charpoly {charpoly:.2e}, words {words:.2e} -> {verdict.value}")
    return EquivalenceReport(verdict, sv, charpoly, eig, words, len(traces1))


@dataclass(frozen=True, eq=False)
class CongruenceResult:
    u_plus: np.ndarray
    u_minus: np.ndarray
    weyl_residual: float
    mark_residual: float
    tol: float

    @property
    def holds(self) -> bool:
        return self.weyl_residual <= self.tol and self.mark_residual <= self.tol


def congruence_data(
    an1: ContractionAnalysis,
    an2: ContractionAnalysis,
    U: object,
    grid: Sequence[DiscPoint] | None = None,
    tol: float | None = None,
) -> CongruenceResult:
    """
    Boundary-space unitaries induced by U with T2 = U T1 U*, and the check
    B2 = u_- B1 u_+^{-1}, C2 = u_- C1 u_+^{-1} for the canonical quadruples.
    """
    tol = float(get_setting("TOLERANCE") if tol is None else tol)
    U = as_matrix(U, "U")
    if U.shape != (an1.n, an2.n) or an1.n != an2.n:
        raise DimensionMismatch("U must be square of the common dimension")
    if not is_unitary(U, max(tol, 1e-10)):
        raise ContractionModelError("U is not unitary")
    intertwining = float(np.linalg.norm(U @ an1.T @ U.conj().T - an2.T))
    if intertwining > max(tol, 1e-10) * max(1, an1.n):
        raise ContractionModelError(f"U does not intertwine T1 and T2 (defect {intertwining:.3e})")
    leak = float(np.linalg.norm(U @ an1.K_frame.frame - an2.K_frame.projector() @ U @ an1.K_frame.frame))
    if leak > 1e-6:
        raise ContractionModelError(f"U does not map K1 onto K2 (defect {leak:.3e})")

    u_plus = an2.V_rest.conj().T @ U @ an1.V_rest
    u_minus = an2.U_rest.conj().T @ U @ an1.U_rest
    grid = list(grid) if grid is not None else make_grid()
    B1 = weyl_realization(an1, canonical_quadruple(an1))
    B2 = weyl_realization(an2, canonical_quadruple(an2))
    u_plus_inv = np.linalg.inv(u_plus) if u_plus.size else u_plus
    weyl_residual = max(
        (float(np.max(np.abs(B2(p.coord) - u_minus @ B1(p.coord) @ u_plus_inv), initial=0.0))
         for p in grid if p.in_plus),
        default=0.0,
    )
    mark_residual = float(np.max(np.abs(an2.t - u_minus @ an1.t @ u_plus_inv), initial=0.0))
    return CongruenceResult(u_plus, u_minus, weyl_residual, mark_residual, tol)


__all__ = [
    "CongruenceResult",
    "EquivalenceReport",
    "MarkedDisc",
    "Membership",
    "MembershipResult",
    "ModelOperator",
    "ModelReport",
    "ModelSpace",
    "SampledSection",
    "Verdict",
    "ZeroMinusMode",
    "congruence_data",
    "equivalence_check",
    "graph_membership",
    "hat_gram",
    "hat_section",
    "model_apply",
    "model_space",
    "standard_pairing",
    "synthesize",
    "verify_model",
]
