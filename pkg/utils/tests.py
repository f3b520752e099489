"""
Tests for the shared linear-algebra helpers
"""

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from .linalg import (
    as_matrix,
    inv_psd_sqrt,
    is_unitary,
    null_frame,
    numerical_rank,
    orthogonal_complement,
    orthonormal_frame,
    phase_normalize,
    principal_angles,
    psd_sqrt,
    same_span,
    solve_or_none,
    spectral_norm,
)


class AsMatrixTest(SimpleTestCase):
    """Test coercion of scalars and vectors to 2-d complex arrays"""

    def test_scalar_becomes_1x1(self) -> None:
        """A scalar is promoted to a complex 1x1 matrix"""
        matrix = as_matrix(0.5)
        self.assertEqual(matrix.shape, (1, 1))
        self.assertEqual(matrix.dtype, np.complex128)

    def test_vector_becomes_column(self) -> None:
        """A flat sequence becomes a column"""
        self.assertEqual(as_matrix([1, 2, 3]).shape, (3, 1))

    def test_rejects_three_dimensional_input(self) -> None:
        """Arrays with more than two axes are refused"""
        with self.assertRaises(ValueError):
            as_matrix(np.zeros((2, 2, 2)))


class RankAndFrameTest(SimpleTestCase):
    """Test rank decisions and orthonormal frames"""

    def test_numerical_rank_ignores_roundoff(self) -> None:
        """Singular values below the relative cutoff do not count"""
        matrix = np.array([[1.0, 0.0], [0.0, 1e-14]])
        self.assertEqual(numerical_rank(matrix), 1)
        self.assertEqual(numerical_rank(np.zeros((3, 3))), 0)

    def test_orthonormal_frame_of_zero_span(self) -> None:
        """The zero matrix spans an n x 0 frame"""
        self.assertEqual(orthonormal_frame(np.zeros((3, 2))).shape, (3, 0))

    def test_null_frame_absolute_cutoff(self) -> None:
        """An absolute cutoff treats a roundoff-sized matrix as zero"""
        # Every singular value is tiny: relative cutoff sees full rank, absolute sees none
        matrix = 1e-13 * np.eye(2)
        self.assertEqual(null_frame(matrix).shape[1], 0)
        self.assertEqual(null_frame(matrix, atol=1e-10).shape[1], 2)

    def test_orthogonal_complement(self) -> None:
        """The complement of a coordinate axis is the other two axes"""
        frame = np.array([[1.0], [0.0], [0.0]], dtype=complex)
        complement = orthogonal_complement(frame)
        self.assertEqual(complement.shape, (3, 2))
        assert_allclose(frame.conj().T @ complement, np.zeros((1, 2)), atol=1e-14)

    def test_phase_normalize_makes_pivot_positive(self) -> None:
        """The largest entry of each column becomes real and positive"""
        frame = np.array([[0.1], [-1j]])
        normalized = phase_normalize(frame)
        assert_allclose(normalized[1, 0], 1.0)
        assert_allclose(np.abs(normalized), np.abs(frame))


class PsdSqrtTest(SimpleTestCase):
    """Test square roots of positive semidefinite matrices"""

    def test_square_root_squares_back(self) -> None:
        """psd_sqrt(M) squared is M"""
        matrix = np.array([[2.0, 1.0], [1.0, 2.0]])
        root = psd_sqrt(matrix)
        assert_allclose(root @ root, matrix, atol=1e-12)

    def test_clamps_roundoff_negativity(self) -> None:
        """Eigenvalues that are negative by roundoff are clamped to zero"""
        root = psd_sqrt(np.diag([1.0, -1e-16]))
        assert_allclose(root, np.diag([1.0, 0.0]), atol=1e-12)

    def test_rejects_indefinite_matrix(self) -> None:
        """A genuinely negative eigenvalue raises"""
        with self.assertRaises(ValueError):
            psd_sqrt(np.diag([1.0, -0.5]))

    def test_inverse_square_root(self) -> None:
        """inv_psd_sqrt inverts the square root and refuses singular input"""
        matrix = np.diag([4.0, 0.25])
        assert_allclose(inv_psd_sqrt(matrix), np.diag([0.5, 2.0]), atol=1e-12)
        with self.assertRaises(ValueError):
            inv_psd_sqrt(np.diag([1.0, 0.0]))


class SubspaceComparisonTest(SimpleTestCase):
    """Test principal-angle comparisons"""

    def test_same_span_is_frame_independent(self) -> None:
        """Two frames of one plane have the same span"""
        first = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        second = first @ np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
        self.assertTrue(same_span(first, second))
        self.assertFalse(same_span(first[:, :1], second[:, :1]))

    def test_principal_angles_of_orthogonal_lines(self) -> None:
        """Orthogonal lines meet at pi/2"""
        angles = principal_angles(np.array([[1.0], [0.0]]), np.array([[0.0], [1.0]]))
        assert_allclose(angles, [np.pi / 2])


class SolveAndNormTest(SimpleTestCase):
    """Test guarded solves, norms and unitarity checks"""

    def test_solve_or_none_returns_none_for_singular(self) -> None:
        """Singular systems give None, regular ones a solution"""
        self.assertIsNone(solve_or_none(np.zeros((2, 2)), np.ones((2, 1))))
        assert_allclose(solve_or_none(2 * np.eye(2), np.ones((2, 1))), 0.5 * np.ones((2, 1)))

    def test_spectral_norm_of_empty_matrix(self) -> None:
        """An empty matrix has norm zero"""
        self.assertEqual(spectral_norm(np.zeros((0, 3))), 0.0)

    def test_is_unitary(self) -> None:
        """Unitaries pass; contractions and non-square matrices fail"""
        rotation = np.array([[0.0, 1j], [1j, 0.0]])
        self.assertTrue(is_unitary(rotation))
        self.assertFalse(is_unitary(0.5 * rotation))
        self.assertFalse(is_unitary(np.ones((2, 3))))
