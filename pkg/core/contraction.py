"""
Defect and symplectic analysis of a finite-dimensional contraction T.

The doubled space H + H carries the standard form i(x1, y1) - i(x2, y2).
Inside it sit the isotropic graph A_T of the unitary part T|K, its
symplectic complement A_T^{perp_s} = A_T + Q + Q_*, and the defect fibers
N_lam. Boundary maps send A_T^{perp_s} onto K^perp and K_*^perp; the
contractive Weyl function B(lam) and the characteristic function Theta_T
are read off from them.

All matrices of t, Theta and B are relative to the stored orthonormal
frames of K^perp and K_*^perp.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from utils.linalg import (
    DEFAULT_RANK_TOLERANCE,
    as_matrix,
    is_unitary,
    null_frame,
    numerical_rank,
    orthogonal_complement,
    phase_normalize,
    psd_sqrt,
    solve_or_none,
    spectral_norm,
)

from .conf import get_setting
from .discs import Disc, DiscPoint
from .exceptions import (
    DimensionMismatch,
    NotAContraction,
    NotCompletelyNonUnitary,
    NotStrictContraction,
    OutsideDisc,
    SingularSystem,
)
from .realization import SampledSchurFunction, SchurRealization
from .symplectic import (
    QuotientSpace,
    Subspace,
    SymplecticSpace,
    contraction_block_matrix,
    mobius,
    quotient,
    standard_space,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ContractionAnalysis:
    T: np.ndarray
    K_frame: Subspace
    Kstar_frame: Subspace
    # Orthonormal frames of K^perp (columns of V_rest) and K_*^perp (U_rest)
    V_rest: np.ndarray
    U_rest: np.ndarray
    D: np.ndarray
    Dstar: np.ndarray
    Dt: np.ndarray
    t: np.ndarray
    space: SymplecticSpace
    AT: Subspace
    Q: Subspace
    Qstar: Subspace
    ATperp: Subspace
    unitary_part: Subspace
    tol: float = 1e-9

    @property
    def n(self) -> int:
        return int(self.T.shape[0])

    @property
    def indices(self) -> tuple[int, int]:
        return (self.V_rest.shape[1], self.U_rest.shape[1])

    @property
    def n_plus(self) -> int:
        return int(self.V_rest.shape[1])

    @property
    def n_minus(self) -> int:
        return int(self.U_rest.shape[1])

    @property
    def is_cnu(self) -> bool:
        return self.unitary_part.rank == 0

    @property
    def t_norm(self) -> float:
        return spectral_norm(self.t)

    def require_cnu(self) -> None:
        if not self.is_cnu:
            raise NotCompletelyNonUnitary(
                f"T has a unitary part of dimension {self.unitary_part.rank}"
            )

    def kstar_projector(self) -> np.ndarray:
        return self.Kstar_frame.projector()

    def coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """A_T^{perp_s}-frame coordinates of ambient vectors."""
        return self.ATperp.frame.conj().T @ vectors

    def project_to_domain(self, vectors: np.ndarray, warn_tol: float | None = None) -> np.ndarray:
        """Orthogonal projection onto A_T^{perp_s}, warning when the input was off."""
        warn_tol = self.tol if warn_tol is None else warn_tol
        vectors = as_matrix(vectors, "vectors")
        projected = self.ATperp.projector() @ vectors
        distance = float(np.linalg.norm(vectors - projected))
        if distance > warn_tol * max(1.0, float(np.linalg.norm(vectors))):
            logger.warning(f"Vectors were {distance:.2e} away from A_T^perp_s and were projected")
        return projected


@dataclass(frozen=True, eq=False)
class BoundaryQuadruple:
    analysis: ContractionAnalysis
    # Pseudo-unitary (for diag(iI, -iI)) applied to the canonical pair (Gamma_+, Gamma_-)
    transform: np.ndarray
    # The operator C with graph(T) = {a : Gamma_- a = C Gamma_+ a}
    mark: np.ndarray
    name: str = "canonical"
    _ambient: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        an = self.analysis
        n = an.n
        canonical = np.zeros((an.n_plus + an.n_minus, 2 * n), dtype=complex)
        canonical[: an.n_plus, :n] = an.V_rest.conj().T
        canonical[an.n_plus :, n:] = an.U_rest.conj().T
        object.__setattr__(self, "_ambient", self.transform @ canonical)

    @property
    def Hplus_dim(self) -> int:
        return self.analysis.n_plus

    @property
    def Hminus_dim(self) -> int:
        return self.analysis.n_minus

    @property
    def ambient_plus(self) -> np.ndarray:
        """Gamma_+ as a map on the doubled space (meaningful on A_T^{perp_s})."""
        return self._ambient[: self.Hplus_dim]

    @property
    def ambient_minus(self) -> np.ndarray:
        return self._ambient[self.Hplus_dim :]

    @property
    def GammaPlus(self) -> np.ndarray:
        """Gamma_+ on A_T^{perp_s}-frame coordinates."""
        return self.ambient_plus @ self.analysis.ATperp.frame

    @property
    def GammaMinus(self) -> np.ndarray:
        return self.ambient_minus @ self.analysis.ATperp.frame

    def boundary_values(self, vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        projected = self.analysis.project_to_domain(vectors)
        return self.ambient_plus @ projected, self.ambient_minus @ projected

    def transformed(self, blocks: np.ndarray, name: str = "transformed") -> "BoundaryQuadruple":
        """The quadruple (M11 G+ + M12 G-, M21 G+ + M22 G-)."""
        size = self.Hplus_dim + self.Hminus_dim
        if blocks.shape != (size, size):
            raise DimensionMismatch(f"transform must be {size}x{size}, got {blocks.shape}")
        new_mark = mobius(blocks, self.Hplus_dim, self.mark)
        return BoundaryQuadruple(self.analysis, blocks @ self.transform, new_mark, name)

    @property
    def is_canonical(self) -> bool:
        return bool(np.allclose(self.transform, np.eye(self.transform.shape[0])))


@dataclass(frozen=True, eq=False)
class DefectFiber:
    point: DiscPoint
    N_frame: Subspace
    gamma: np.ndarray
    phi: np.ndarray

    @property
    def dim(self) -> int:
        return self.N_frame.rank


# Analysis


def cnu_split(
    T: object, tol: float | None = None, rank_tol: float | None = None
) -> tuple[Subspace, Subspace]:
    """
    Unitary part of T as the joint kernel of I - T*^m T^m and I - T^m T*^m, m = 1..n,
    and its orthocomplement, the completely non-unitary part.
    """
    T = _as_contraction(T, tol)
    rank_tol = float(get_setting("RANK_TOLERANCE") if rank_tol is None else rank_tol)
    n = T.shape[0]
    identity = np.eye(n)
    rows: list[np.ndarray] = []
    power = identity.astype(complex)
    kernel = identity.astype(complex)
    dims: list[int] = []
    for _ in range(n):
        power = power @ T
        rows.append(identity - power.conj().T @ power)
        rows.append(identity - power @ power.conj().T)
        kernel = null_frame(np.vstack(rows), atol=rank_tol)
        dims.append(kernel.shape[1])
    logger.debug(f"Unitary part dimensions by power: {dims}")
    unitary = Subspace(phase_normalize(kernel))
    cnu = Subspace(phase_normalize(orthogonal_complement(unitary.frame, rank_tol)))
    return unitary, cnu


def _as_contraction(T: object, tol: float | None) -> np.ndarray:
    tol = float(get_setting("TOLERANCE") if tol is None else tol)
    T = as_matrix(T, "T")
    if T.shape[0] != T.shape[1]:
        raise DimensionMismatch(f"T must be square, got {T.shape}")
    norm = spectral_norm(T)
    if norm > 1.0 + tol:
        raise NotAContraction(f"||T|| = {norm:.12f} exceeds 1 + {tol:g}")
    return T


def defect_analysis(
    T: object, tol: float | None = None, rank_tol: float | None = None
) -> ContractionAnalysis:
    """Defect spaces, defect operators, t and the A_T frames of a contraction."""
    tol = float(get_setting("TOLERANCE") if tol is None else tol)
    rank_tol = float(get_setting("RANK_TOLERANCE") if rank_tol is None else rank_tol)
    T = _as_contraction(T, tol)
    n = T.shape[0]
    if n == 0:
        raise DimensionMismatch("T must have dimension at least 1")

    U, singular_values, Vh = np.linalg.svd(T)
    V = Vh.conj().T
    unit = singular_values >= 1.0 - rank_tol
    V_K, U_K = V[:, unit], U[:, unit]
    V_rest = phase_normalize(V[:, ~unit])
    U_rest = phase_normalize(U[:, ~unit])

    identity = np.eye(n)
    sqrt_tol = max(tol, 1e-12)
    D = psd_sqrt(identity - T.conj().T @ T, sqrt_tol)
    Dstar = psd_sqrt(identity - T @ T.conj().T, sqrt_tol)
    Dt = V_rest.conj().T @ D @ V_rest
    t = U_rest.conj().T @ T @ V_rest

    if V_K.shape[1] and not is_unitary(U_K.conj().T @ T @ V_K, 1e-6):
        logger.warning("T restricted to K is not unitary onto K_* within tolerance")

    space = standard_space(n, n)
    AT = Subspace(np.vstack([V_K, T @ V_K]) / np.sqrt(2.0))
    Q = Subspace(np.vstack([V_rest, np.zeros((n, V_rest.shape[1]))]))
    Qstar = Subspace(np.vstack([np.zeros((n, U_rest.shape[1])), U_rest]))
    ATperp = Subspace(np.hstack([AT.frame, Q.frame, Qstar.frame]))

    unitary_part, _ = cnu_split(T, tol, rank_tol)
    analysis = ContractionAnalysis(
        T=T,
        K_frame=Subspace(phase_normalize(V_K)),
        Kstar_frame=Subspace(phase_normalize(U_K)),
        V_rest=V_rest,
        U_rest=U_rest,
        D=D,
        Dstar=Dstar,
        Dt=Dt,
        t=t,
        space=space,
        AT=AT,
        Q=Q,
        Qstar=Qstar,
        ATperp=ATperp,
        unitary_part=unitary_part,
        tol=tol,
    )
    logger.info(
        f"Analyzed {n}x{n} contraction: indices {analysis.indices}, "
        f"unitary part {unitary_part.rank}, ||t|| = {analysis.t_norm:.6f}"
    )
    return analysis


# Boundary quadruples


def canonical_quadruple(an: ContractionAnalysis) -> BoundaryQuadruple:
    """Gamma_+ and Gamma_- are the Q and Q_* components in the orthogonal splitting."""
    if not an.is_cnu:
        logger.warning(
            "canonical_quadruple called for a contraction with a unitary part; "
            "graph(T) is not cut out by the boundary condition"
        )
    size = an.n_plus + an.n_minus
    return BoundaryQuadruple(an, np.eye(size, dtype=complex), an.t.copy(), "canonical")


def primed_quadruple(an: ContractionAnalysis) -> BoundaryQuadruple:
    """The quadruple obtained from the polarization defined by t; graph(T) = {Gamma_-' a = 0}."""
    if an.t_norm >= 1.0 - an.tol:
        raise NotStrictContraction(f"||t|| = {an.t_norm:.12f} is too close to 1")
    blocks = contraction_block_matrix(an.t)
    return canonical_quadruple(an).transformed(blocks, "primed")


def green_residual(
    an: ContractionAnalysis, quadruple: BoundaryQuadruple, a: np.ndarray, b: np.ndarray
) -> float:
    """|[a, b] - i(G+a, G+b) + i(G-a, G-b)| for a, b in A_T^{perp_s}."""
    a = an.project_to_domain(a).ravel()
    b = an.project_to_domain(b).ravel()
    plus_a, minus_a = quadruple.ambient_plus @ a, quadruple.ambient_minus @ a
    plus_b, minus_b = quadruple.ambient_plus @ b, quadruple.ambient_minus @ b
    form = an.space.pairing(a, b)
    boundary = 1j * np.vdot(plus_b, plus_a) - 1j * np.vdot(minus_b, minus_a)
    return float(abs(form - boundary))


# Defect fibers and Weyl functions


def _fiber_basis(an: ContractionAnalysis, point: DiscPoint) -> np.ndarray:
    lam = point.coord
    identity = np.eye(an.n)
    if point.in_plus:
        X = np.linalg.solve(identity - lam * an.T.conj().T, an.V_rest)
        return np.vstack([X, lam * X])
    Y = np.linalg.solve(identity - lam * an.T, an.U_rest)
    return np.vstack([lam * Y, Y])


def defect_fiber(
    an: ContractionAnalysis, quadruple: BoundaryQuadruple, point: DiscPoint | complex
) -> DefectFiber:
    """
    N_lam with its boundary-normalized gamma-field.

    On the plus disc Gamma_+ gamma_+(lam) = I; on the minus disc, in the
    1/lam chart, Gamma_- gamma_-(lam) = I.
    """
    point = point if isinstance(point, DiscPoint) else DiscPoint(point, Disc.PLUS)
    basis = _fiber_basis(an, point)
    gamma_map = quadruple.ambient_plus if point.in_plus else quadruple.ambient_minus
    normalization = gamma_map @ basis
    solved = solve_or_none(normalization.T, basis.T)
    if solved is None:
        raise SingularSystem(f"boundary map is not invertible on N at {point}")
    gamma = solved.T
    n = an.n
    phi = gamma[:n] if point.in_plus else gamma[n:]
    return DefectFiber(point, Subspace.span(basis), gamma, phi)


def weyl_function(
    an: ContractionAnalysis, quadruple: BoundaryQuadruple, point: DiscPoint | complex
) -> np.ndarray:
    """
    B(lam) = Gamma_- gamma_+(lam) on the plus disc.

    For a minus-disc point the value is Gamma_+ gamma_-(lam) = B(conj(lam))*.
    """
    fiber = defect_fiber(an, quadruple, point)
    if fiber.point.in_plus:
        return quadruple.ambient_minus @ fiber.gamma
    return quadruple.ambient_plus @ fiber.gamma


def weyl_function_canonical_closed_form(an: ContractionAnalysis, lam: complex) -> np.ndarray:
    """B(lam) = t - (T - lam)(I - lam T*)^{-1} R(lam) for the canonical quadruple."""
    if not abs(lam) < 1.0:
        raise OutsideDisc(f"|{lam}| >= 1")
    identity = np.eye(an.n)
    resolvent_rest = np.linalg.solve(identity - lam * an.T.conj().T, an.V_rest)
    S = np.linalg.solve(an.Dt, an.V_rest.conj().T @ an.D @ resolvent_rest)
    R = solve_or_none(S, np.eye(an.n_plus))
    if R is None:
        raise SingularSystem(f"R({lam}) is not invertible")
    return an.t - an.U_rest.conj().T @ (an.T - lam * identity) @ resolvent_rest @ R


def weyl_evaluator(an: ContractionAnalysis, quadruple: BoundaryQuadruple) -> SampledSchurFunction:
    """B as a point-evaluation-only Schur function (gamma-field route)."""
    return SampledSchurFunction(
        lambda lam: weyl_function(an, quadruple, DiscPoint.plus(lam)),
        an.n_plus,
        an.n_minus,
    )


def weyl_realization(an: ContractionAnalysis, quadruple: BoundaryQuadruple) -> SchurRealization:
    """
    B as a transfer function. For the canonical quadruple
    B(lam) = lam U_rest* (I - lam T* P_{K_*})^{-1} V_rest; other quadruples act
    on it by the Moebius transform of their pseudo-unitary.
    """
    canonical = SchurRealization(
        an.T.conj().T @ an.kstar_projector(),
        an.V_rest,
        an.U_rest.conj().T,
        np.zeros((an.n_minus, an.n_plus), dtype=complex),
    )
    if quadruple.is_canonical:
        return canonical
    return canonical.mobius(quadruple.transform)


def theta(an: ContractionAnalysis, lam: complex) -> np.ndarray:
    """Theta_T(lam) = (-T + lam D_* (I - lam T*)^{-1} D) restricted to K^perp."""
    if not abs(lam) < 1.0:
        raise OutsideDisc(f"|{lam}| >= 1")
    identity = np.eye(an.n)
    inner = np.linalg.solve(identity - lam * an.T.conj().T, an.D)
    value = -an.T + lam * an.Dstar @ inner
    return an.U_rest.conj().T @ value @ an.V_rest


def characteristic_realization(an: ContractionAnalysis) -> SchurRealization:
    return SchurRealization(
        an.T.conj().T,
        an.D @ an.V_rest,
        an.U_rest.conj().T @ an.Dstar,
        -an.t,
    )


# Weyl curve and simplicity


def weyl_curve(an: ContractionAnalysis, point: DiscPoint) -> tuple[QuotientSpace, Subspace]:
    """Image of N_lam in the quotient A_T^{perp_s} / A_T."""
    boundary_space = quotient(an.space, an.AT)
    basis = _fiber_basis(an, point)
    image = Subspace.span(boundary_space.project(basis))
    return boundary_space, image


@dataclass(frozen=True)
class SimplicityReport:
    fiber_rank: int
    expected_fiber_rank: int
    projection_rank: int
    n: int

    @property
    def fibers_span_domain(self) -> bool:
        return self.fiber_rank == self.expected_fiber_rank

    @property
    def is_cnu(self) -> bool:
        return self.projection_rank == self.n


def simplicity_rank(
    an: ContractionAnalysis, points: list[DiscPoint], rank_tol: float = DEFAULT_RANK_TOLERANCE
) -> SimplicityReport:
    """
    Exact rank form of the density of the defect fibers: N_lam over the points
    spans A_T^{perp_s}, and pr_1 N (plus) with pr_2 N (minus) spans C^n iff T is c.n.u.
    """
    n = an.n
    fibers = [_fiber_basis(an, p) for p in points]
    stacked = np.hstack(fibers) if fibers else np.zeros((2 * n, 0))
    projections = [f[:n] if p.in_plus else f[n:] for p, f in zip(points, fibers, strict=True)]
    projected = np.hstack(projections) if projections else np.zeros((n, 0))
    return SimplicityReport(
        fiber_rank=numerical_rank(stacked, rank_tol),
        expected_fiber_rank=an.ATperp.rank,
        projection_rank=numerical_rank(projected, rank_tol),
        n=n,
    )
