"""
Dense linear-algebra helpers shared by the symplectic, contraction and model code.

Subspaces are carried as Euclidean-orthonormal column frames. Rank decisions
use singular values relative to the largest one.
"""

import logging

import numpy as np
import scipy.linalg

logger = logging.getLogger(__name__)

DEFAULT_RANK_TOLERANCE = 1e-8


def as_matrix(values: object, name: str = "matrix") -> np.ndarray:
    """Coerce ``values`` to a 2-d complex array."""
    matrix = np.asarray(values, dtype=complex)
    if matrix.ndim == 0:
        matrix = matrix.reshape(1, 1)
    elif matrix.ndim == 1:
        matrix = matrix.reshape(-1, 1)
    if matrix.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {matrix.shape}")
    return matrix


def spectral_norm(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(np.linalg.norm(matrix, 2))


def numerical_rank(matrix: np.ndarray, rank_tol: float = DEFAULT_RANK_TOLERANCE) -> int:
    if matrix.size == 0:
        return 0
    singular_values = scipy.linalg.svdvals(matrix)
    if singular_values[0] == 0.0:
        return 0
    return int(np.sum(singular_values > rank_tol * singular_values[0]))


def orthonormal_frame(
    matrix: np.ndarray, rank_tol: float = DEFAULT_RANK_TOLERANCE
) -> np.ndarray:
    """Orthonormal basis of the column span; an n x 0 array for the zero span."""
    rows = matrix.shape[0]
    if matrix.size == 0 or not np.any(matrix):
        return np.zeros((rows, 0), dtype=complex)
    return scipy.linalg.orth(matrix, rcond=rank_tol).astype(complex)


def null_frame(
    matrix: np.ndarray,
    rank_tol: float = DEFAULT_RANK_TOLERANCE,
    atol: float | None = None,
) -> np.ndarray:
    """
    Orthonormal basis of the kernel of ``matrix``.

    By default singular values below ``rank_tol * max`` count as zero. With
    ``atol`` the cutoff is absolute instead, for operands that may vanish up
    to roundoff (where a relative cutoff would see full rank).
    """
    cols = matrix.shape[1]
    if matrix.shape[0] == 0 or not np.any(matrix):
        return np.eye(cols, dtype=complex)
    if cols == 0:
        return np.zeros((0, 0), dtype=complex)
    if atol is None:
        return scipy.linalg.null_space(matrix, rcond=rank_tol).astype(complex)
    _, singular_values, vh = scipy.linalg.svd(matrix, full_matrices=True)
    rank = int(np.sum(singular_values > atol))
    return vh[rank:].conj().T.astype(complex)


def orthogonal_complement(
    frame: np.ndarray, rank_tol: float = DEFAULT_RANK_TOLERANCE
) -> np.ndarray:
    """Frame of the Euclidean orthocomplement of span(frame)."""
    if frame.shape[1] == 0:
        return np.eye(frame.shape[0], dtype=complex)
    return null_frame(frame.conj().T, rank_tol)


def phase_normalize(frame: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-modulus entry is real and positive."""
    normalized = frame.copy()
    for j in range(frame.shape[1]):
        column = frame[:, j]
        pivot = column[int(np.argmax(np.abs(column)))]
        if pivot != 0:
            normalized[:, j] = column * (abs(pivot) / pivot)
    return normalized


def hermitian_part(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


def psd_sqrt(matrix: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """
    Square root of a Hermitian positive semidefinite matrix.

    Eigenvalues in [-tol * scale, 0) are clamped to zero; anything more
    negative means the operand was not PSD and raises ValueError.
    """
    if matrix.size == 0:
        return matrix.copy()
    eigenvalues, eigenvectors = scipy.linalg.eigh(hermitian_part(matrix))
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    if eigenvalues[0] < -tol * scale * 1e3:
        raise ValueError(
            f"matrix is not positive semidefinite (min eigenvalue {eigenvalues[0]:.3e})"
        )
    roots = np.sqrt(np.clip(eigenvalues, 0.0, None))
    return (eigenvectors * roots) @ eigenvectors.conj().T


def inv_psd_sqrt(matrix: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Inverse square root of a Hermitian positive definite matrix."""
    if matrix.size == 0:
        return matrix.copy()
    eigenvalues, eigenvectors = scipy.linalg.eigh(hermitian_part(matrix))
    if eigenvalues[0] <= tol * max(1.0, float(eigenvalues[-1])):
        raise ValueError(
            f"matrix is not positive definite (min eigenvalue {eigenvalues[0]:.3e})"
        )
    return (eigenvectors / np.sqrt(eigenvalues)) @ eigenvectors.conj().T


def principal_angles(frame_a: np.ndarray, frame_b: np.ndarray) -> np.ndarray:
    """Principal angles between two column spans, largest first."""
    if frame_a.shape[1] == 0 or frame_b.shape[1] == 0:
        return np.zeros(0)
    return scipy.linalg.subspace_angles(frame_a, frame_b)


def same_span(frame_a: np.ndarray, frame_b: np.ndarray, tol: float = 1e-9) -> bool:
    if frame_a.shape[1] != frame_b.shape[1]:
        return False
    angles = principal_angles(frame_a, frame_b)
    return bool(angles.size == 0 or float(np.max(angles)) < tol)


def is_unitary(matrix: np.ndarray, tol: float = 1e-9) -> bool:
    rows, cols = matrix.shape
    if rows != cols:
        return False
    return bool(np.linalg.norm(matrix.conj().T @ matrix - np.eye(rows)) <= tol * max(1, rows))


def solve_or_none(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
    """Solve a square system, returning None when it is numerically singular."""
    try:
        solution = scipy.linalg.solve(matrix, rhs, check_finite=True)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        logger.debug(f"Linear solve failed: {e}")
        return None
    if not np.all(np.isfinite(solution)):
        return None
    if matrix.size and np.linalg.cond(matrix) > 1e14:
        return None
    return solution
