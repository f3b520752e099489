"""
Tests for defect analysis, boundary quadruples, Weyl and characteristic functions
"""

import numpy as np
import pytest
import scipy.linalg
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from .contraction import (
    ContractionAnalysis,
    canonical_quadruple,
    characteristic_realization,
    cnu_split,
    defect_analysis,
    defect_fiber,
    green_residual,
    primed_quadruple,
    simplicity_rank,
    theta,
    weyl_curve,
    weyl_evaluator,
    weyl_function,
    weyl_function_canonical_closed_form,
    weyl_realization,
)
from .discs import ZERO_MINUS, DiscPoint, make_grid
from .exceptions import DimensionMismatch, NotAContraction, NotCompletelyNonUnitary
from .factories import CnuContractionFactory
from .symplectic import (
    Polarization,
    PseudoUnitary,
    Subspace,
    SubspaceKind,
    classify_subspace,
    contraction_block_matrix,
    mobius_apply,
    standard_space,
    subspace_angles,
    symp_complement,
)

JORDAN = np.array([[0.0, 1.0], [0.0, 0.0]])


def _random_unitary(rng: np.random.Generator, size: int) -> np.ndarray:
    Z = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return np.linalg.qr(Z)[0]


def _random_domain_vectors(an: ContractionAnalysis, rng: np.random.Generator, count: int) -> np.ndarray:
    rank = an.ATperp.rank
    coords = rng.standard_normal((rank, count)) + 1j * rng.standard_normal((rank, count))
    return an.ATperp.frame @ coords


class DefectAnalysisTest(SimpleTestCase):
    """Test defect spaces and indices"""

    def test_jordan_block(self) -> None:
        """The Jordan block has indices (1, 1), K = span e2 and t = 0"""
        an = defect_analysis(JORDAN)
        self.assertEqual(an.indices, (1, 1))
        self.assertTrue(an.K_frame.same_as(Subspace.span([0.0, 1.0])))
        self.assertTrue(an.Kstar_frame.same_as(Subspace.span([1.0, 0.0])))
        assert_allclose(an.t, [[0.0]], atol=1e-14)
        self.assertTrue(an.is_cnu)

    def test_identity(self) -> None:
        """The identity has no defect and is not c.n.u."""
        an = defect_analysis(np.eye(2))
        self.assertEqual(an.indices, (0, 0))
        self.assertEqual(an.K_frame.rank, 2)
        self.assertFalse(an.is_cnu)
        with self.assertRaises(NotCompletelyNonUnitary):
            an.require_cnu()

    def test_zero_operator(self) -> None:
        """T = 0 has full defect with D = D_* = I"""
        an = defect_analysis(np.zeros((2, 2)))
        self.assertEqual(an.indices, (2, 2))
        assert_allclose(an.D, np.eye(2), atol=1e-14)
        assert_allclose(an.Dstar, np.eye(2), atol=1e-14)

    def test_rejects_non_contraction(self) -> None:
        """Norms above one and non-square inputs raise"""
        with self.assertRaises(NotAContraction):
            defect_analysis(2.0 * np.eye(2))
        with self.assertRaises(DimensionMismatch):
            defect_analysis(np.zeros((2, 3)))

    def test_domain_splits_orthogonally(self) -> None:
        """A_T, Q and Q_* are mutually orthogonal"""
        an = CnuContractionFactory(dim=4, unit_singular_values=2)
        frames = [an.AT.frame, an.Q.frame, an.Qstar.frame]
        for i, first in enumerate(frames):
            for second in frames[i + 1 :]:
                assert_allclose(first.conj().T @ second, 0.0, atol=1e-12)
        self.assertEqual(an.ATperp.rank, 2 * an.n - an.AT.rank)
        self.assertIs(classify_subspace(an.space, an.AT), SubspaceKind.ISOTROPIC)


class CnuSplitTest(SimpleTestCase):
    """Test the unitary / completely non-unitary decomposition"""

    def test_diagonal_with_unitary_entry(self) -> None:
        """A unimodular diagonal entry is split off as the unitary part"""
        unitary, cnu = cnu_split(np.diag([np.exp(0.3j), 0.5]))
        self.assertTrue(unitary.same_as(Subspace.span([1.0, 0.0])))
        self.assertTrue(cnu.same_as(Subspace.span([0.0, 1.0])))

    def test_jordan_block_is_cnu(self) -> None:
        """The Jordan block has no unitary part"""
        unitary, _ = cnu_split(JORDAN)
        self.assertEqual(unitary.rank, 0)

    def test_unitary(self) -> None:
        """A unitary is all unitary part"""
        U = np.array([[0.0, 1.0], [1.0, 0.0]])
        unitary, cnu = cnu_split(U)
        self.assertEqual(unitary.rank, 2)
        self.assertEqual(cnu.rank, 0)

    def test_shift_with_unit_singular_values_is_cnu(self) -> None:
        """Isometric directions alone do not make a unitary part"""
        # Three-step shift: ||T e_k|| = 1 for two basis vectors, still no unitary part
        shift = np.diag([1.0, 1.0], k=-1)
        unitary, _ = cnu_split(shift)
        self.assertEqual(unitary.rank, 0)


class BoundaryQuadrupleTest(SimpleTestCase):
    """Test canonical and primed boundary quadruples"""

    def test_jordan_fiber_values(self) -> None:
        """Boundary values of a Jordan fiber vector are (1, lam^2)"""
        an = defect_analysis(JORDAN)
        quadruple = canonical_quadruple(an)
        lam = 0.4 + 0.1j
        a = np.array([1.0, lam, lam, lam**2])
        plus, minus = quadruple.boundary_values(a)
        assert_allclose(plus, [[1.0]], atol=1e-12)
        assert_allclose(minus, [[lam**2]], atol=1e-12)

    def test_scalar_graph_element(self) -> None:
        """For T = c the graph satisfies Gamma_- = c Gamma_+"""
        c = 0.5
        an = defect_analysis([[c]])
        quadruple = canonical_quadruple(an)
        plus, minus = quadruple.boundary_values(np.array([2.0, 2.0 * c]))
        assert_allclose(plus, [[2.0]])
        assert_allclose(minus, an.t @ plus)

    def test_graph_of_unitary_part_is_invisible(self) -> None:
        """A_T has zero boundary values"""
        an = CnuContractionFactory(dim=3, unit_singular_values=1)
        quadruple = canonical_quadruple(an)
        plus, minus = quadruple.boundary_values(an.AT.frame)
        assert_allclose(plus, 0.0, atol=1e-12)
        assert_allclose(minus, 0.0, atol=1e-12)

    def test_primed_at_zero_mark(self) -> None:
        """For t = 0 the primed transform is diag(1, -1)"""
        an = defect_analysis(JORDAN)
        primed = primed_quadruple(an)
        assert_allclose(primed.transform, np.diag([1.0, -1.0]), atol=1e-12)
        assert_allclose(primed.mark, [[0.0]], atol=1e-12)

    def test_primed_scalar_transform(self) -> None:
        """For T = 1/2 the primed transform is M(1/2)"""
        an = defect_analysis([[0.5]])
        primed = primed_quadruple(an)
        expected = (2.0 / np.sqrt(3.0)) * np.array([[1.0, -0.5], [0.5, -1.0]])
        assert_allclose(primed.transform, expected, atol=1e-12)

    def test_primed_kills_graph(self) -> None:
        """The primed Gamma_- vanishes on the graph of T, so the mark is zero"""
        for seed in range(6):
            an = CnuContractionFactory(dim=1 + seed, seed=200 + seed)
            primed = primed_quadruple(an)
            graph = np.vstack([np.eye(an.n), an.T])
            _, minus = primed.boundary_values(graph)
            assert_allclose(minus, 0.0, atol=1e-10)
            assert_allclose(primed.mark, 0.0, atol=1e-12)

    def test_transformed_mark_is_mobius_image(self) -> None:
        """The graph of T satisfies the transformed mark"""
        an = CnuContractionFactory(dim=3, seed=7)
        canonical = canonical_quadruple(an)
        rng = np.random.default_rng(1)
        C = rng.standard_normal((an.n_minus, an.n_plus))
        blocks = contraction_block_matrix(0.4 * C / np.linalg.norm(C, 2))
        transformed = canonical.transformed(blocks)
        graph = np.vstack([np.eye(an.n), an.T])
        plus, minus = transformed.boundary_values(graph)
        assert_allclose(minus, transformed.mark @ plus, atol=1e-10)
        self.assertFalse(transformed.is_canonical)

    @pytest.mark.slow
    def test_weyl_function_covariance(self) -> None:
        """Transforming the quadruple by a pseudo-unitary M moves B(lam) by the Moebius action of M"""
        rng = np.random.default_rng(21)
        grid = [p for p in make_grid([0.3, 0.6], 4) if p.in_plus]
        for trial in range(20):
            an = CnuContractionFactory(dim=2 + trial % 4, seed=2100 + trial, unit_singular_values=trial % 2)
            n_plus, n_minus = an.indices
            size = n_plus + n_minus
            space = standard_space(n_plus, n_minus)
            coordinates = np.eye(size, dtype=complex)
            pol = Polarization(space, Subspace(coordinates[:, :n_plus]), Subspace(coordinates[:, n_plus:]), coordinates)
            rotation = scipy.linalg.block_diag(_random_unitary(rng, n_plus), _random_unitary(rng, n_minus))
            C = rng.standard_normal((n_minus, n_plus)) + 1j * rng.standard_normal((n_minus, n_plus))
            blocks = rotation @ contraction_block_matrix(0.7 * C / np.linalg.norm(C, 2))
            M = PseudoUnitary(space, blocks)
            M.validate()

            canonical = canonical_quadruple(an)
            transformed = canonical.transformed(blocks)
            for p in grid:
                expected = mobius_apply(M, pol, weyl_function(an, canonical, p))
                assert_allclose(weyl_function(an, transformed, p), expected, atol=1e-9, err_msg=str((trial, p)))

    def test_green_identity(self) -> None:
        """Green's identity holds for the canonical and primed quadruples"""
        rng = np.random.default_rng(2)
        for seed in range(8):
            an = CnuContractionFactory(dim=1 + seed, seed=300 + seed, unit_singular_values=seed % 3)
            vectors = _random_domain_vectors(an, rng, 2)
            for quadruple in (canonical_quadruple(an), primed_quadruple(an)):
                self.assertLess(green_residual(an, quadruple, vectors[:, 0], vectors[:, 1]), 1e-10)

    def test_green_on_graph_of_unitary_part(self) -> None:
        """Green's identity holds trivially on A_T"""
        an = CnuContractionFactory(dim=3, unit_singular_values=1)
        a = an.AT.frame[:, 0]
        self.assertLess(green_residual(an, canonical_quadruple(an), a, a), 1e-12)


class DefectFiberTest(SimpleTestCase):
    """Test the boundary-normalized gamma fields"""

    def test_jordan_plus_fiber(self) -> None:
        """The Jordan plus fiber is (1, lam, lam, lam^2)"""
        an = defect_analysis(JORDAN)
        lam = 0.3 - 0.2j
        fiber = defect_fiber(an, canonical_quadruple(an), DiscPoint.plus(lam))
        assert_allclose(fiber.gamma[:, 0], [1.0, lam, lam, lam**2], atol=1e-12)
        assert_allclose(fiber.phi[:, 0], [1.0, lam], atol=1e-12)

    def test_scalar_minus_fiber(self) -> None:
        """The scalar minus fiber is (lam, 1)"""
        an = defect_analysis([[0.5]])
        lam = 0.2 + 0.3j
        fiber = defect_fiber(an, canonical_quadruple(an), DiscPoint.minus(lam))
        assert_allclose(fiber.gamma[:, 0], [lam, 1.0], atol=1e-12)
        assert_allclose(fiber.phi, [[1.0]], atol=1e-12)

    def test_zero_minus_fiber_is_qstar(self) -> None:
        """The fiber at 0- is Q_*"""
        an = CnuContractionFactory(dim=3, seed=8)
        fiber = defect_fiber(an, canonical_quadruple(an), ZERO_MINUS)
        self.assertTrue(fiber.N_frame.same_as(an.Qstar))


class WeylFunctionTest(SimpleTestCase):
    """Test closed forms of Theta and B"""

    def test_theta_closed_forms(self) -> None:
        """Theta is lam for 0, a Blaschke factor for c and lam^2 for the Jordan block"""
        lam = 0.35 - 0.25j
        assert_allclose(theta(defect_analysis([[0.0]]), lam), [[lam]], atol=1e-14)
        c = 0.3 + 0.4j
        assert_allclose(theta(defect_analysis([[c]]), lam), [[(lam - c) / (1 - np.conj(c) * lam)]], atol=1e-12)
        assert_allclose(theta(defect_analysis(JORDAN), lam), [[lam**2]], atol=1e-12)

    def test_canonical_weyl_closed_forms(self) -> None:
        """The canonical Weyl function of a scalar is lam"""
        lam = 0.5 + 0.1j
        for c in (0.0, 0.5, -0.3j):
            an = defect_analysis([[c]])
            assert_allclose(weyl_function(an, canonical_quadruple(an), lam), [[lam]], atol=1e-12)
        an = defect_analysis(JORDAN)
        assert_allclose(weyl_function(an, canonical_quadruple(an), lam), [[lam**2]], atol=1e-12)
        an = defect_analysis(np.zeros((2, 2)))
        assert_allclose(weyl_function(an, canonical_quadruple(an), lam), lam * np.eye(2), atol=1e-12)

    def test_minus_disc_value_is_adjoint(self) -> None:
        """The minus-disc value is B(conj lam)*"""
        an = CnuContractionFactory(dim=3, seed=9)
        quadruple = canonical_quadruple(an)
        lam = 0.2 + 0.45j
        minus_value = weyl_function(an, quadruple, DiscPoint.minus(lam))
        plus_value = weyl_function(an, quadruple, DiscPoint.plus(np.conj(lam)))
        assert_allclose(minus_value, plus_value.conj().T, atol=1e-10)

    def test_routes_agree(self) -> None:
        """Gamma-field, closed-form and realization routes agree"""
        grid = [p for p in make_grid([0.3, 0.6], 4) if p.in_plus]
        for seed in range(6):
            an = CnuContractionFactory(dim=2 + seed, seed=400 + seed, unit_singular_values=seed % 2)
            canonical = canonical_quadruple(an)
            realization = weyl_realization(an, canonical)
            evaluator = weyl_evaluator(an, canonical)
            assert_allclose(realization(0.0), 0.0, atol=1e-12)
            for p in grid:
                value = weyl_function(an, canonical, p)
                assert_allclose(value, weyl_function_canonical_closed_form(an, p.coord), atol=1e-9)
                assert_allclose(value, realization(p.coord), atol=1e-9)
                assert_allclose(value, evaluator(p.coord), atol=1e-12)

    def test_primed_realization_matches_gamma_route(self) -> None:
        """The primed realization matches the gamma-field route"""
        an = CnuContractionFactory(dim=3, seed=10, unit_singular_values=1)
        primed = primed_quadruple(an)
        realization = weyl_realization(an, primed)
        for lam in (0.0, 0.3, -0.2 + 0.5j):
            assert_allclose(realization(lam), weyl_function(an, primed, lam), atol=1e-9)

    def test_characteristic_realization(self) -> None:
        """The characteristic realization evaluates to Theta"""
        an = CnuContractionFactory(dim=4, seed=11)
        realization = characteristic_realization(an)
        for lam in (0.0, 0.4j, 0.6 - 0.2j):
            assert_allclose(realization(lam), theta(an, lam), atol=1e-10)

    @pytest.mark.slow
    def test_primed_weyl_is_minus_theta(self) -> None:
        """The primed Weyl function is -Theta"""
        rng = np.random.default_rng(12)
        grid = [p for p in make_grid([0.3, 0.6], 8) if p.in_plus][:16]
        for trial in range(50):
            dim = int(rng.integers(1, 9))
            an = CnuContractionFactory(dim=dim, seed=1000 + trial, unit_singular_values=trial % 3)
            primed = primed_quadruple(an)
            for p in grid:
                residual = np.linalg.norm(weyl_function(an, primed, p) + theta(an, p.coord), 2)
                self.assertLess(residual, 1e-9, (trial, dim, str(p)))

    @pytest.mark.slow
    def test_canonical_weyl_vanishes_at_origin(self) -> None:
        """The canonical Weyl function vanishes at 0"""
        for trial in range(50):
            an = CnuContractionFactory(dim=1 + trial % 8, seed=2000 + trial, unit_singular_values=trial % 2)
            value = weyl_function(an, canonical_quadruple(an), 0.0)
            assert_allclose(value, 0.0, atol=1e-10)


class WeylCurveTest(SimpleTestCase):
    """Test positivity of fibers in the boundary space and simplicity"""

    def test_fiber_images_are_definite(self) -> None:
        """Plus fibers are maximal positive and minus fibers maximal negative in the quotient"""
        an = CnuContractionFactory(dim=3, seed=13, unit_singular_values=1)
        rng = np.random.default_rng(13)
        for _ in range(20):
            lam = 0.8 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            space, image = weyl_curve(an, DiscPoint.plus(lam))
            self.assertIs(classify_subspace(space.space, image), SubspaceKind.MAX_POS_DEFINITE)
            space, image = weyl_curve(an, DiscPoint.minus(lam))
            self.assertIs(classify_subspace(space.space, image), SubspaceKind.MAX_NEG_DEFINITE)

    def test_mirror_image_is_symplectic_complement(self) -> None:
        """The fiber image at the mirrored point is the symplectic complement of the image at lam"""
        an = CnuContractionFactory(dim=3, seed=15, unit_singular_values=1)
        for lam in (0.4, 0.3 + 0.5j, -0.6j):
            space, image = weyl_curve(an, DiscPoint.plus(lam))
            _, mirrored = weyl_curve(an, DiscPoint.plus(lam).mirror())
            complement = symp_complement(space.space, image)
            self.assertEqual(complement.rank, mirrored.rank)
            self.assertLess(float(np.max(subspace_angles(complement, mirrored))), 1e-9)

    @pytest.mark.slow
    def test_mirror_duality_population(self) -> None:
        """Duality of fiber images holds for random c.n.u. contractions on both discs"""
        rng = np.random.default_rng(16)
        for trial in range(30):
            an = CnuContractionFactory(dim=1 + trial % 6, seed=2600 + trial, unit_singular_values=trial % 3)
            if an.n_plus == 0:
                continue
            lam = 0.8 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
            point = DiscPoint.plus(lam) if trial % 2 else DiscPoint.minus(lam)
            space, image = weyl_curve(an, point)
            _, mirrored = weyl_curve(an, point.mirror())
            complement = symp_complement(space.space, image)
            self.assertLess(float(np.max(subspace_angles(complement, mirrored))), 1e-9, trial)

    def test_simplicity_rank(self) -> None:
        """A c.n.u. contraction passes both rank tests"""
        grid = make_grid([0.3, 0.6], 4)
        an = CnuContractionFactory(dim=4, seed=14, unit_singular_values=1)
        report = simplicity_rank(an, grid)
        self.assertTrue(report.fibers_span_domain)
        self.assertTrue(report.is_cnu)

    def test_simplicity_detects_unitary_part(self) -> None:
        """A unimodular eigenvalue lowers the projection rank"""
        an = defect_analysis(np.diag([np.exp(0.7j), 0.5]))
        report = simplicity_rank(an, make_grid([0.3, 0.6], 4))
        self.assertFalse(report.is_cnu)
        self.assertEqual(report.projection_rank, 1)
