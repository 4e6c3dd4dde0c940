"""Tests for tdep.coefficients"""
import pickle
import unittest

import numpy as np

from tdep.coefficients import (KINDS, CoefficientRequest, dcor, dcov2, pearson, rho_alpha,
                               rho_contracting, rho_inf, rho_star, spearman)
from tdep.errors import DegenerateMeasureError
from tdep.geometries import Zigzag
from tdep.measures import DiscreteMeasure, JointDiscreteMeasure, product


class CoefficientTestCase(unittest.TestCase):
    def setUp(self):
        self.diagonal = JointDiscreteMeasure([1., 2., 3.], [1., 2., 3.])
        rng = np.random.default_rng(21)
        self.product = product(DiscreteMeasure(rng.random(4)), DiscreteMeasure(rng.random(4)))
        self.constant_y = JointDiscreteMeasure([0., 1., 2.], [1., 1., 1.])


class TestRhoAlpha(CoefficientTestCase):
    """Test rho_alpha"""
    def test_product(self):
        """explicit products give zero"""
        self.assertAlmostEqual(rho_alpha(self.product, 1.), 0., delta=1e-6)

    def test_lipschitz_graph(self):
        """graphs of alpha-Lipschitz maps give one"""
        gamma = Zigzag(3).sample(20, seed=5)
        self.assertAlmostEqual(rho_alpha(gamma, 3., solver='exact'), 1., delta=1e-7)
        self.assertLess(rho_alpha(gamma, 1., solver='exact'), 1.)

    def test_monotone(self):
        """rho_alpha increases with alpha and is bounded by rho_inf"""
        rng = np.random.default_rng(2)
        gamma = JointDiscreteMeasure(rng.integers(3, size=8).astype(float), rng.random(8))
        values = [rho_alpha(gamma, alpha, solver='exact') for alpha in (.5, 1., 2., 8.)]
        self.assertTrue(all(a <= b + 1e-7 for a, b in zip(values, values[1:])))
        self.assertLessEqual(values[-1], rho_inf(gamma) + 1e-7)

    def test_large_alpha(self):
        """rho_alpha approaches rho_inf for large alpha"""
        rng = np.random.default_rng(4)
        gamma = JointDiscreteMeasure(np.arange(10.), rng.random(10))
        self.assertAlmostEqual(rho_alpha(gamma, 1e3), rho_inf(gamma), delta=.02)

    def test_power(self):
        """p = 2 on a 1-Lipschitz graph"""
        self.assertAlmostEqual(rho_alpha(self.diagonal, 1., p=2.), 1., delta=1e-7)

    def test_invalid(self):
        """non-positive or infinite alpha and degenerate nu raise"""
        with self.assertRaises(ValueError):
            rho_alpha(self.diagonal, 0.)
        with self.assertRaises(ValueError):
            rho_alpha(self.diagonal, float('inf'))
        with self.assertRaises(DegenerateMeasureError):
            rho_alpha(self.constant_y, 1.)


class TestRhoInf(CoefficientTestCase):
    """Test rho_inf"""
    def test_distinct_x(self):
        """deterministic relations give one"""
        rng = np.random.default_rng(3)
        self.assertAlmostEqual(rho_inf(JointDiscreteMeasure(rng.random(6), rng.random(6))), 1.)

    def test_product(self):
        """explicit products give zero"""
        self.assertAlmostEqual(rho_inf(self.product), 0., delta=1e-9)

    def test_two_groups(self):
        """conditionals Unif{0, 1} and the point mass at 1"""
        gamma = JointDiscreteMeasure([0., 0., 1.], [0., 1., 1.])
        self.assertAlmostEqual(rho_inf(gamma), .5)

    def test_degenerate(self):
        """constant y raises DegenerateMeasureError"""
        with self.assertRaises(DegenerateMeasureError):
            rho_inf(self.constant_y)


class TestRhoStar(CoefficientTestCase):
    """Test rho_star"""
    def test_dilatation(self):
        """graphs of dilatations give one"""
        self.assertAlmostEqual(rho_star(self.diagonal), 1., delta=1e-7)
        scaled = JointDiscreteMeasure([1., 2., 3.], [-5., -10., -15.])
        self.assertAlmostEqual(rho_star(scaled), 1., delta=1e-7)

    def test_product(self):
        """explicit products give zero"""
        self.assertAlmostEqual(rho_star(self.product), 0., delta=1e-6)

    def test_swap(self):
        """rho_star is symmetric in X and Y"""
        rng = np.random.default_rng(9)
        for _ in range(5):
            gamma = JointDiscreteMeasure(rng.random(6), rng.random((6, 2)))
            self.assertAlmostEqual(rho_star(gamma), rho_star(gamma.swap()), places=9)

    def test_scale_invariance(self):
        """scaling y leaves rho_star unchanged"""
        rng = np.random.default_rng(10)
        x, y = rng.random(7), rng.random(7)
        self.assertAlmostEqual(rho_star(JointDiscreteMeasure(x, y)),
                               rho_star(JointDiscreteMeasure(x, 2.5*y)), places=9)

    def test_degenerate(self):
        """constant x raises DegenerateMeasureError"""
        with self.assertRaises(DegenerateMeasureError):
            rho_star(self.constant_y.swap())


class TestRhoContracting(CoefficientTestCase):
    """Test rho_contracting"""
    def test_one_lipschitz(self):
        """1-Lipschitz graphs give one"""
        gamma = JointDiscreteMeasure([0., 1., 2., 3.], [0., .5, 1., .5])
        self.assertAlmostEqual(rho_contracting(gamma), 1., delta=1e-7)

    def test_equal_diameters(self):
        """with equal diameters it coincides with rho_star"""
        rng = np.random.default_rng(6)
        x = rng.random(7)
        gamma = JointDiscreteMeasure(x, rng.permutation(x))
        self.assertAlmostEqual(rho_contracting(gamma), rho_star(gamma), places=7)

    def test_product(self):
        """explicit products give zero"""
        self.assertAlmostEqual(rho_contracting(self.product), 0., delta=1e-6)


class TestClassical(CoefficientTestCase):
    """Test pearson, spearman, dcov2 and dcor"""
    def test_pearson(self):
        """perfectly linear samples"""
        self.assertAlmostEqual(pearson(self.diagonal), 1.)
        self.assertAlmostEqual(pearson(JointDiscreteMeasure([1., 2., 3.], [3., 2., 1.])), -1.)
        with self.assertRaises(DegenerateMeasureError):
            pearson(self.constant_y)

    def test_spearman(self):
        """monotone samples and ties"""
        self.assertAlmostEqual(spearman(JointDiscreteMeasure([1., 2., 3.], [3., 2., 1.])), -1.)
        self.assertAlmostEqual(spearman(JointDiscreteMeasure([1., 2., 3.], [1., 8., 27.])), 1.)
        tied = JointDiscreteMeasure([1., 2., 3., 4.], [1., 1., 2., 2.])
        self.assertGreater(spearman(tied), 0.)

    def test_scalar_only(self):
        """pearson requires scalar x and y"""
        with self.assertRaises(ValueError):
            pearson(JointDiscreteMeasure([[0., 1.], [1., 0.]], [0., 1.]))
        with self.assertRaises(ValueError):
            spearman(JointDiscreteMeasure([0.], [0.]))

    def test_dcov2_product(self):
        """the V-statistic vanishes on explicit products"""
        self.assertAlmostEqual(dcov2(self.product), 0., delta=1e-12)

    def test_dcor(self):
        """linear relations give one, products zero"""
        self.assertAlmostEqual(dcor(JointDiscreteMeasure([1., 2., 4.], [2., 4., 8.])), 1.)
        self.assertAlmostEqual(dcor(self.product), 0., delta=1e-5)
        with self.assertRaises(DegenerateMeasureError):
            dcor(self.constant_y)


class TestCoefficientRequest(CoefficientTestCase):
    """Test CoefficientRequest"""
    def test_kinds(self):
        """requests evaluate every kind"""
        gamma = JointDiscreteMeasure([0., 1., 2., 3.], [0., 2., 1., 3.])
        for kind in KINDS:
            request = CoefficientRequest(kind, alpha=2. if kind == 'rho_alpha' else None)
            result = request.evaluate(gamma)
            self.assertEqual(result.kind, kind)
            self.assertEqual(result.n, 4)
            self.assertEqual(request(gamma), result.value)
            self.assertLessEqual(abs(result.value), 1.)

    def test_matches_functions(self):
        """requests agree with the module functions"""
        rng = np.random.default_rng(13)
        gamma = JointDiscreteMeasure(rng.random(6), rng.random(6))
        self.assertEqual(CoefficientRequest('rho_alpha', alpha=3.)(gamma), rho_alpha(gamma, 3.))
        self.assertEqual(CoefficientRequest('rho_star', p=2.)(gamma), rho_star(gamma, p=2.))
        result = CoefficientRequest('rho_alpha', alpha=3.).evaluate(gamma)
        self.assertEqual(result.alpha, 3.)
        self.assertEqual(result.solver, 'exact')
        self.assertIn('diam_y', result.as_dict())

    def test_invalid(self):
        """unknown kinds and missing alpha raise ValueError"""
        with self.assertRaises(ValueError):
            CoefficientRequest('mic')
        with self.assertRaises(ValueError):
            CoefficientRequest('rho_alpha')
        with self.assertRaises(ValueError):
            CoefficientRequest('rho_star', p=0.)

    def test_pickle(self):
        """requests survive pickling with equality"""
        request = CoefficientRequest('rho_alpha', alpha=3., p=2.)
        self.assertEqual(pickle.loads(pickle.dumps(request)), request)
        self.assertNotEqual(request, CoefficientRequest('rho_alpha', alpha=2., p=2.))
        self.assertEqual(len(set([request, CoefficientRequest('rho_alpha', alpha=3., p=2.)])), 1)


if __name__ == '__main__':
    unittest.main()
