"""
Tests for transfer-function realizations of Schur functions
"""

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from .exceptions import DimensionMismatch, NotStrictContraction, OutsideDisc
from .factories import SchurRealizationFactory
from .realization import SampledSchurFunction, SchurFunction, SchurRealization
from .symplectic import contraction_block_matrix, mobius


class SchurRealizationTest(SimpleTestCase):
    """Test evaluation, derivatives and duals"""

    def test_monomial_values(self) -> None:
        """The monomial realization evaluates to lam^k"""
        B = SchurRealization.monomial(2)
        lam = 0.4 - 0.3j
        assert_allclose(B(lam), [[lam**2]], atol=1e-14)
        assert_allclose(B.derivative(lam), [[2 * lam]], atol=1e-14)
        assert_allclose(B.second_derivative(lam), [[2.0]], atol=1e-13)

    def test_block_monomial(self) -> None:
        """A block monomial is lam times the identity"""
        B = SchurRealization.monomial(1, size=2)
        assert_allclose(B(0.5j), 0.5j * np.eye(2), atol=1e-14)
        self.assertEqual(B.state_dim, 2)

    def test_constant_and_zero_power(self) -> None:
        """lam^0 is one and constants keep their shape with zero derivative"""
        assert_allclose(SchurRealization.monomial(0)(0.3), [[1.0]])
        C = SchurRealization.constant([[0.2, 0.1]])
        self.assertEqual((C.n_minus, C.n_plus), (1, 2))
        assert_allclose(C.derivative(0.5), np.zeros((1, 2)))
        with self.assertRaises(ValueError):
            SchurRealization.monomial(-1)

    def test_dual_conjugates(self) -> None:
        """The dual realization evaluates to B(conj lam)*"""
        B = SchurRealizationFactory(dim=3, seed=21)
        lam = 0.3 + 0.4j
        assert_allclose(B.dual()(lam), B(np.conj(lam)).conj().T, atol=1e-12)

    def test_derivative_matches_difference_quotient(self) -> None:
        """The analytic derivative matches a central difference"""
        B = SchurRealizationFactory(dim=3, seed=22)
        lam, h = 0.2 - 0.1j, 1e-6
        quotient = (B(lam + h) - B(lam - h)) / (2 * h)
        assert_allclose(B.derivative(lam), quotient, atol=1e-8)

    def test_shape_checks(self) -> None:
        """Inconsistent block shapes raise DimensionMismatch"""
        with self.assertRaises(DimensionMismatch):
            SchurRealization(np.zeros((2, 2)), np.zeros((3, 1)), np.zeros((1, 2)), np.zeros((1, 1)))
        with self.assertRaises(DimensionMismatch):
            SchurRealization(np.zeros((2, 3)), np.zeros((2, 1)), np.zeros((1, 2)), np.zeros((1, 1)))

    def test_outside_disc(self) -> None:
        """Evaluation outside the disc raises"""
        with self.assertRaises(OutsideDisc):
            SchurRealization.monomial(1)(1.0)
        with self.assertRaises(OutsideDisc):
            SchurRealization.constant([[0.0]])(2.0)

    def test_protocol(self) -> None:
        """Realizations and sampled functions satisfy SchurFunction"""
        self.assertIsInstance(SchurRealization.monomial(1), SchurFunction)
        sampled = SampledSchurFunction(lambda lam: lam, 1, 1)
        self.assertIsInstance(sampled, SchurFunction)
        assert_allclose(sampled(0.5), [[0.5]])
        with self.assertRaises(OutsideDisc):
            sampled(1.5)


class ValidationTest(SimpleTestCase):
    """Test the sampled pure-contraction check"""

    def test_weyl_realizations_validate(self) -> None:
        """Weyl realizations are strict contractions on the validation circle"""
        for seed in range(5):
            B = SchurRealizationFactory(dim=4, seed=100 + seed)
            self.assertLess(B.validate(), 1.0)

    def test_rejects_constant_isometry(self) -> None:
        """A constant of norm one is not strict"""
        with self.assertRaises(NotStrictContraction):
            SchurRealization.constant([[1.0]]).validate()

    def test_rejects_large_values(self) -> None:
        """Values above one on the circle are refused"""
        B = SchurRealization(np.zeros((1, 1)), [[1.0]], [[2.0]], [[0.0]])
        with self.assertRaises(NotStrictContraction):
            B.validate()

    def test_rejects_poles_inside_disc(self) -> None:
        """A state matrix with a pole in the disc is refused"""
        B = SchurRealization([[1.5]], [[0.01]], [[0.01]], [[0.0]])
        with self.assertRaises(NotStrictContraction):
            B.validate()


class MobiusRealizationTest(SimpleTestCase):
    """Test the Moebius transform of a realization"""

    def test_matches_pointwise_mobius(self) -> None:
        """The realized Moebius image matches the pointwise one"""
        B = SchurRealizationFactory(dim=3, seed=31)
        rng = np.random.default_rng(0)
        C = rng.standard_normal((B.n_minus, B.n_plus)) + 1j * rng.standard_normal((B.n_minus, B.n_plus))
        C = 0.5 * C / np.linalg.norm(C, 2)
        blocks = contraction_block_matrix(C)
        transformed = B.mobius(blocks)
        self.assertEqual(transformed.state_dim, B.state_dim)
        for lam in (0.0, 0.3j, -0.5 + 0.2j):
            assert_allclose(transformed(lam), mobius(blocks, B.n_plus, B(lam)), atol=1e-10)

    def test_scalar_mobius(self) -> None:
        """lam under M(1/2) becomes (1/2 - lam)/(1 - lam/2)"""
        # B = lam, M = M(1/2): (1/2 - lam)/(1 - lam/2)
        transformed = SchurRealization.monomial(1).mobius(contraction_block_matrix(np.array([[0.5]])))
        lam = 0.3
        assert_allclose(transformed(lam), [[(0.5 - lam) / (1 - 0.5 * lam)]], atol=1e-12)
