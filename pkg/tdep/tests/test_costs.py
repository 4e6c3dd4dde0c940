"""Tests for tdep.costs"""
import unittest
from math import sqrt

import numpy as np

from tdep.tests.abstract_test import AbstractTestCase
from tdep.costs import (AdditiveCost, ArrayCost, CostSpec, IsometricCost, MarginalCost,
                        MinMarginalCost, PairwiseCost, RawPowerCost, as_evaluator, cost_matrix,
                        eval_cost, isometric_alpha, uniform_deviation)
from tdep.errors import CapacityError, DegenerateMeasureError
from tdep.measures import DiscreteMeasure, JointDiscreteMeasure


class TestMarginalCost(unittest.TestCase):
    """Test MarginalCost"""
    def test_values(self):
        """scale * d**power for all metrics"""
        a, b = [0., 0.], [3., 4.]
        self.assertAlmostEqual(MarginalCost('euclidean')(a, b), 5.)
        self.assertAlmostEqual(MarginalCost('l1')(a, b), 7.)
        self.assertAlmostEqual(MarginalCost('linf')(a, b), 4.)
        self.assertAlmostEqual(MarginalCost('euclidean', 2., .5)(a, b), 12.5)

    def test_zero_distance(self):
        """fractional powers vanish at zero distance"""
        self.assertEqual(MarginalCost(power=.5)([1.], [1.]), 0.)

    def test_invalid(self):
        """invalid parameters raise ValueError"""
        with self.assertRaises(ValueError):
            MarginalCost('cosine')
        with self.assertRaises(ValueError):
            MarginalCost(power=0.)
        with self.assertRaises(ValueError):
            MarginalCost(scale=float('inf'))

    def test_equality(self):
        """equal parameters give equal costs"""
        self.assertEqual(MarginalCost('l1', 2.), MarginalCost('l1', 2., 1.))
        self.assertNotEqual(MarginalCost('l1', 2.), MarginalCost('l1', 1.))
        self.assertEqual(len(set([MarginalCost(), MarginalCost()])), 1)


class TestCostSpec(AbstractTestCase('Cost', CostSpec)):
    """Test CostSpec interface

    Concrete cost test cases set the class attribute Cost and
    implement make_cost.
    """
    def make_cost(self):
        return self.Cost()

    def setUp(self):
        rng = np.random.default_rng(11)
        self.x = rng.random((6, 2))
        self.y = rng.random((6, 1))
        self.cost = self.make_cost()

    def test_diagonal_vanishes(self):
        """c(z, z) = 0"""
        values = self.cost.paired(self.x, self.y, self.x, self.y)
        self.assertTrue(np.allclose(values, 0.))

    def test_symmetric(self):
        """the cost matrix between equal atom sets is symmetric"""
        matrix = self.cost.pairwise(self.x, self.y, self.x, self.y)
        self.assertTrue(np.allclose(matrix, matrix.T))
        self.assertTrue(np.all(matrix >= 0))

    def test_pairwise_matches_paired(self):
        """pairwise entries agree with paired evaluation"""
        matrix = self.cost.pairwise(self.x, self.y, self.x[::-1], self.y[::-1])
        diagonal = self.cost.paired(self.x, self.y, self.x[::-1], self.y[::-1])
        self.assertTrue(np.allclose(np.diag(matrix), diagonal))

    def test_marginals_bound_fibers(self):
        """c(x1, y, x2, y) <= c_X(x1, x2) and c(x, y1, x, y2) <= c_Y(y1, y2)"""
        same_y = np.zeros_like(self.y)
        same_x = np.zeros_like(self.x)
        along_x = self.cost.pairwise(self.x, same_y, self.x, same_y)
        along_y = self.cost.pairwise(same_x, self.y, same_x, self.y)
        self.assertTrue(np.all(along_x <= self.cost.marginal_x.pairwise(self.x, self.x) + 1e-12))
        self.assertTrue(np.all(along_y <= self.cost.marginal_y.pairwise(self.y, self.y) + 1e-12))

    def test_call(self):
        """calling a cost evaluates it on two points"""
        z1, z2 = (self.x[0], self.y[0]), (self.x[1], self.y[1])
        expected = self.cost.pairwise(self.x[:1], self.y[:1], self.x[1:2], self.y[1:2])[0, 0]
        self.assertAlmostEqual(self.cost(z1, z2), expected)
        self.assertAlmostEqual(eval_cost(self.cost, z1, z2), expected)


class TestAdditiveCost(TestCostSpec):
    """Test AdditiveCost"""
    Cost = AdditiveCost

    def make_cost(self):
        return AdditiveCost(alpha=2., p=2., beta_x=.5)

    def test_value(self):
        """(alpha d_X^beta + d_Y)^p"""
        cost = AdditiveCost(alpha=2., p=2., beta_x=.5)
        self.assertAlmostEqual(cost(([0., 0.], [0.]), ([3., 4.], [1.])), (2.*sqrt(5.)+1.)**2)

    def test_marginals(self):
        """marginal costs are alpha^p d_X^(beta p) and d_Y^p"""
        cost = AdditiveCost(alpha=2., p=2., beta_x=.5, metric_y='l1')
        self.assertEqual(cost.marginal_x, MarginalCost('euclidean', 1., 4.))
        self.assertEqual(cost.marginal_y, MarginalCost('l1', 2.))

    def test_infinite(self):
        """alpha = inf marks the marginal limit and has no finite values"""
        cost = AdditiveCost(alpha=float('inf'))
        self.assertTrue(cost.is_infinite)
        self.assertIsNone(cost.marginal_x)
        with self.assertRaises(ValueError):
            cost.pairwise([[0.]], [[0.]], [[1.]], [[1.]])

    def test_invalid(self):
        """non-positive parameters raise ValueError"""
        for params in [dict(alpha=0.), dict(p=0.), dict(p=float('inf')), dict(beta_x=-1.)]:
            with self.assertRaises(ValueError):
                AdditiveCost(**params)


class TestRawPowerCost(TestCostSpec):
    """Test RawPowerCost"""
    Cost = RawPowerCost

    def test_values(self):
        """metric of the concatenated space to the power p"""
        z1, z2 = ([0.], [0.]), ([3.], [4.])
        self.assertAlmostEqual(RawPowerCost(1.)(z1, z2), 5.)
        self.assertAlmostEqual(RawPowerCost(2.)(z1, z2), 25.)
        self.assertAlmostEqual(RawPowerCost(1., 'l1')(z1, z2), 7.)
        self.assertAlmostEqual(RawPowerCost(1., 'linf')(z1, z2), 4.)


class TestMinMarginalCost(TestCostSpec):
    """Test MinMarginalCost"""
    Cost = MinMarginalCost

    def test_value(self):
        """minimum of the marginal costs"""
        cost = MinMarginalCost(MarginalCost('l1'), MarginalCost('l1'))
        self.assertAlmostEqual(cost(([0.], [0.]), ([3.], [1.])), 1.)


class TestIsometricCost(TestCostSpec):
    """Test IsometricCost"""
    Cost = IsometricCost

    def make_cost(self):
        rng = np.random.default_rng(3)
        return IsometricCost(DiscreteMeasure(rng.random((5, 2))), DiscreteMeasure(rng.random(5)))

    def test_normalized_marginals(self):
        """marginal costs have unit diameters"""
        from tdep.measures import diameter
        mu, nu = DiscreteMeasure([0., 1., 3.]), DiscreteMeasure([0., 10.])
        cost = IsometricCost(mu, nu, p=2.)
        self.assertAlmostEqual(diameter(mu, cost.marginal_x), 1.)
        self.assertAlmostEqual(diameter(nu, cost.marginal_y), 1.)
        self.assertAlmostEqual(cost.alpha, isometric_alpha(mu, nu, p=2.))

    def test_degenerate(self):
        """marginals of zero diameter raise DegenerateMeasureError"""
        with self.assertRaises(DegenerateMeasureError):
            IsometricCost(DiscreteMeasure([1., 1.]), DiscreteMeasure([0., 1.]))
        with self.assertRaises(DegenerateMeasureError):
            IsometricCost(DiscreteMeasure([0., 1.]), DiscreteMeasure([1.]))


class TestIsometricAlpha(unittest.TestCase):
    """Test isometric_alpha"""
    def test_value(self):
        """ratio of the diameters to the power 1/p"""
        mu, nu = DiscreteMeasure([0., 1.]), DiscreteMeasure([0., 4.])
        self.assertAlmostEqual(isometric_alpha(mu, nu), 4.)
        self.assertAlmostEqual(isometric_alpha(mu, nu, p=2.), 4.)

    def test_degenerate(self):
        """zero X-diameter raises, zero Y-diameter gives 0"""
        with self.assertRaises(DegenerateMeasureError):
            isometric_alpha(DiscreteMeasure([1.]), DiscreteMeasure([0., 1.]))
        self.assertEqual(isometric_alpha(DiscreteMeasure([0., 1.]), DiscreteMeasure([1.])), 0.)


class TestEvaluators(unittest.TestCase):
    """Test ArrayCost and PairwiseCost"""
    def setUp(self):
        rng = np.random.default_rng(5)
        self.src = JointDiscreteMeasure(rng.random(7), rng.random(7))
        self.dst = JointDiscreteMeasure(rng.random(9), rng.random(9))
        self.spec = AdditiveCost(alpha=1.5)

    def test_blocks_cover_dense(self):
        """row blocks assemble to the dense matrix"""
        lazy = PairwiseCost(self.spec, self.src, self.dst)
        lazy_blocks = list(PairwiseCost(self.spec, self.src, self.dst).blocks())
        dense = lazy.dense()
        self.assertEqual(dense.shape, (7, 9))
        self.assertTrue(np.allclose(np.vstack([block for _, _, block in lazy_blocks]), dense))

    def test_entries_and_restrict(self):
        """entries and restrictions agree with the dense matrix"""
        lazy = PairwiseCost(self.spec, self.src, self.dst)
        dense = cost_matrix(self.spec, self.src, self.dst)
        rows, cols = np.array([0, 3, 6]), np.array([8, 1, 2])
        self.assertTrue(np.allclose(lazy.entries(rows, cols), dense[rows, cols]))
        self.assertTrue(np.allclose(lazy.restrict(rows, cols).dense(), dense[np.ix_(rows, cols)]))
        self.assertAlmostEqual(lazy.max(), dense.max())

    def test_budget(self):
        """dense matrices beyond the budget raise CapacityError"""
        with self.assertRaises(CapacityError):
            PairwiseCost(self.spec, self.src, self.dst, max_entries=62).dense()

    def test_array_cost(self):
        """ArrayCost wraps matrices and rejects non-finite entries"""
        cost = as_evaluator([[0., 1.], [2., 3.]])
        self.assertIsInstance(cost, ArrayCost)
        self.assertEqual(cost.shape, (2, 2))
        self.assertEqual(cost.max(), 3.)
        self.assertIs(as_evaluator(cost), cost)
        with self.assertRaises(ValueError):
            ArrayCost([[0., float('inf')]])


class TestUniformDeviation(unittest.TestCase):
    """Test uniform_deviation"""
    def setUp(self):
        self.gamma = JointDiscreteMeasure([0., 1., 2.], [0., 2., 1.])

    def test_identical(self):
        """equal costs deviate by zero"""
        cost = AdditiveCost()
        self.assertEqual(uniform_deviation(cost, cost, self.gamma, self.gamma), 0.)

    def test_scaled(self):
        """c and 2c deviate by one"""
        self.assertAlmostEqual(uniform_deviation(AdditiveCost(p=1.), RawPowerCost(1., 'l1'),
                                                 self.gamma, self.gamma), 0.)
        scaled = MinMarginalCost(MarginalCost(scale=2.), MarginalCost(scale=2.))
        plain = MinMarginalCost()
        self.assertAlmostEqual(uniform_deviation(scaled, plain, self.gamma, self.gamma), 1.)


if __name__ == '__main__':
    unittest.main()
