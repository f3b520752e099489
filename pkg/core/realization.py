"""
Rational Schur functions in transfer-function form.

A realization (A, B_in, C, D) encodes

    B(lam) = D + lam * C (I - lam A)^{-1} B_in,

an analytic n_minus x n_plus matrix function on the unit disc. Derivatives are
exact, which is what confluent kernel values and the 0- limit of the model
operator need.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np
import scipy.linalg

from utils.linalg import as_matrix, spectral_norm

from .conf import get_setting
from .exceptions import DimensionMismatch, NotAGraph, NotStrictContraction, OutsideDisc

logger = logging.getLogger(__name__)


@runtime_checkable
class SchurFunction(Protocol):
    """Anything that evaluates B(lam) on the unit disc."""

    @property
    def n_plus(self) -> int: ...

    @property
    def n_minus(self) -> int: ...

    def __call__(self, lam: complex) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class SampledSchurFunction:
    """A Schur function known only through point evaluations."""

    evaluate: Callable[[complex], np.ndarray]
    n_plus: int
    n_minus: int

    def __call__(self, lam: complex) -> np.ndarray:
        if not abs(lam) < 1.0:
            raise OutsideDisc(f"|{lam}| >= 1")
        return np.asarray(self.evaluate(complex(lam)), dtype=complex).reshape(
            self.n_minus, self.n_plus
        )


@dataclass(frozen=True, eq=False)
class SchurRealization:
    A: np.ndarray
    B_in: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self) -> None:
        for name in ("A", "B_in", "C", "D"):
            object.__setattr__(self, name, as_matrix(getattr(self, name), name))
        s = self.A.shape[0]
        if self.A.shape != (s, s):
            raise DimensionMismatch(f"A must be square, got {self.A.shape}")
        if self.B_in.shape != (s, self.n_plus):
            raise DimensionMismatch(f"B_in must be {s}x{self.n_plus}, got {self.B_in.shape}")
        if self.C.shape != (self.n_minus, s):
            raise DimensionMismatch(f"C must be {self.n_minus}x{s}, got {self.C.shape}")

    @property
    def n_plus(self) -> int:
        return int(self.D.shape[1])

    @property
    def n_minus(self) -> int:
        return int(self.D.shape[0])

    @property
    def state_dim(self) -> int:
        return int(self.A.shape[0])

    @classmethod
    def constant(cls, D: object) -> "SchurRealization":
        D = as_matrix(D, "D")
        n_minus, n_plus = D.shape
        return cls(
            np.zeros((0, 0)), np.zeros((0, n_plus)), np.zeros((n_minus, 0)), D
        )

    @classmethod
    def monomial(cls, power: int, size: int = 1) -> "SchurRealization":
        """B(lam) = lam**power * I_size, realized by a shift chain."""
        if power < 0:
            raise ValueError(f"power must be non-negative, got {power}")
        if power == 0:
            return cls.constant(np.eye(size))
        identity = np.eye(size)
        s = power * size
        A = np.zeros((s, s))
        for k in range(power - 1):
            A[(k + 1) * size : (k + 2) * size, k * size : (k + 1) * size] = identity
        B_in = np.zeros((s, size))
        B_in[:size] = identity
        C = np.zeros((size, s))
        C[:, (power - 1) * size :] = identity
        return cls(A, B_in, C, np.zeros((size, size)))

    def _resolvent(self, lam: complex) -> np.ndarray:
        if not abs(lam) < 1.0:
            raise OutsideDisc(f"|{lam}| >= 1")
        return np.linalg.inv(np.eye(self.state_dim) - lam * self.A)

    def __call__(self, lam: complex) -> np.ndarray:
        if self.state_dim == 0:
            if not abs(lam) < 1.0:
                raise OutsideDisc(f"|{lam}| >= 1")
            return self.D.copy()
        return self.D + lam * self.C @ self._resolvent(lam) @ self.B_in

    def derivative(self, lam: complex) -> np.ndarray:
        """B'(lam) = C (I - lam A)^{-2} B_in."""
        if self.state_dim == 0:
            return np.zeros_like(self.D)
        R = self._resolvent(lam)
        return self.C @ R @ R @ self.B_in

    def second_derivative(self, lam: complex) -> np.ndarray:
        if self.state_dim == 0:
            return np.zeros_like(self.D)
        R = self._resolvent(lam)
        return 2.0 * self.C @ self.A @ R @ R @ R @ self.B_in

    def dual(self) -> "SchurRealization":
        """The realization of lam -> B(conj(lam))*."""
        return SchurRealization(
            self.A.conj().T, self.C.conj().T, self.B_in.conj().T, self.D.conj().T
        )

    def spectral_radius(self) -> float:
        if self.state_dim == 0:
            return 0.0
        return float(np.max(np.abs(scipy.linalg.eigvals(self.A))))

    def boundary_norm(self, radius: float | None = None, points: int | None = None) -> float:
        """Largest ||B(lam)|| on the sampled circle |lam| = radius."""
        radius = float(get_setting("VALIDATION_RADIUS") if radius is None else radius)
        points = int(get_setting("VALIDATION_POINTS") if points is None else points)
        angles = 2.0 * np.pi * np.arange(points) / points
        return max(spectral_norm(self(radius * np.exp(1j * theta))) for theta in angles)

    def validate(self, radius: float | None = None, points: int | None = None) -> float:
        """
        Sampled check of the pure-contraction condition ||B(lam)|| < 1.

        The condition is pointwise on the whole disc; it is certified only on
        the validation circle and at the origin. Returns the largest sampled norm.
        """
        radius = float(get_setting("VALIDATION_RADIUS") if radius is None else radius)
        rho = self.spectral_radius()
        if rho * radius >= 1.0:
            raise NotStrictContraction(
                f"realization has a pole inside the validation disc (spectral radius {rho:.6f})"
            )
        largest = max(spectral_norm(self.D), self.boundary_norm(radius, points))
        if largest >= 1.0:
            raise NotStrictContraction(f"sampled ||B(lam)|| reaches {largest:.6f}")
        logger.debug(f"Realization validated: max sampled norm {largest:.6f}, spectral radius {rho:.6f}")
        return largest

    def mobius(self, blocks: np.ndarray) -> "SchurRealization":
        """
        Realization of (M21 + M22 B)(M11 + M12 B)^{-1} for M given in graph
        coordinates, without growing the state dimension.
        """
        n_plus = self.n_plus
        M11 = blocks[:n_plus, :n_plus]
        M12 = blocks[:n_plus, n_plus:]
        M21 = blocks[n_plus:, :n_plus]
        M22 = blocks[n_plus:, n_plus:]
        Dn = M11 + M12 @ self.D
        Dd = M21 + M22 @ self.D
        try:
            Dn_inv = np.linalg.inv(Dn)
        except np.linalg.LinAlgError as e:
            raise NotAGraph("M11 + M12 B(0) is singular") from e
        return SchurRealization(
            self.A - self.B_in @ Dn_inv @ M12 @ self.C,
            self.B_in @ Dn_inv,
            (M22 - Dd @ Dn_inv @ M12) @ self.C,
            Dd @ Dn_inv,
        )
