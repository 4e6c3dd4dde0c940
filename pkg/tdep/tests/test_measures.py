"""Tests for tdep.measures"""
import io
import unittest

import numpy as np

from tdep.errors import CapacityError
from tdep.costs import MarginalCost
from tdep.measures import (AffineMap, DiscreteMeasure, JointDiscreteMeasure, convolve, diameter,
                           from_samples, marginals, mixture, product, push_forward, read_csv,
                           write_csv)


class TestDiscreteMeasure(unittest.TestCase):
    """Test DiscreteMeasure"""
    def test_init_uniform_weights(self):
        """omitted weights are uniform"""
        mu = DiscreteMeasure([0., 1., 2., 3.])
        self.assertEqual(mu.size, 4)
        self.assertEqual(mu.dim, 1)
        self.assertTrue(np.allclose(mu.weights, .25))

    def test_init_renormalizes_within_tolerance(self):
        """weights off by roundoff are renormalized"""
        mu = DiscreteMeasure([0., 1.], [.5, .5+1e-12])
        self.assertAlmostEqual(mu.weights.sum(), 1., places=15)

    def test_init_rejects_invalid(self):
        """invalid points and weights raise ValueError"""
        with self.assertRaises(ValueError):
            DiscreteMeasure([])
        with self.assertRaises(ValueError):
            DiscreteMeasure([0., float('nan')])
        with self.assertRaises(ValueError):
            DiscreteMeasure([0., 1.], [.5, .6])
        with self.assertRaises(ValueError):
            DiscreteMeasure([0., 1.], [1.5, -.5])
        with self.assertRaises(ValueError):
            DiscreteMeasure([0., 1.], [1.])

    def test_immutable(self):
        """coordinates and weights are read-only"""
        mu = DiscreteMeasure([0., 1.])
        with self.assertRaises(ValueError):
            mu.points[0, 0] = 5.
        with self.assertRaises(ValueError):
            mu.weights[0] = 1.

    def test_negative_zero(self):
        """-0 and 0 denote the same atom"""
        self.assertEqual(DiscreteMeasure([-0.]), DiscreteMeasure([0.]))

    def test_point_mass(self):
        """point_mass has a single atom of weight one"""
        mu = DiscreteMeasure.point_mass([1., 2.])
        self.assertEqual(mu.size, 1)
        self.assertEqual(mu.dim, 2)
        self.assertEqual(mu.weights[0], 1.)

    def test_coalesce(self):
        """coalesce merges duplicates and keeps total weight"""
        mu = DiscreteMeasure([2., 1., 2., 2.]).coalesce()
        self.assertEqual(mu, DiscreteMeasure([1., 2.], [.25, .75]))


class TestJointDiscreteMeasure(unittest.TestCase):
    """Test JointDiscreteMeasure"""
    def setUp(self):
        self.gamma = JointDiscreteMeasure([[0.], [1.], [1.]], [[0., 1.], [2., 3.], [4., 5.]])

    def test_dimensions(self):
        """x_dim, y_dim and size are reported"""
        self.assertEqual(self.gamma.x_dim, 1)
        self.assertEqual(self.gamma.y_dim, 2)
        self.assertEqual(len(self.gamma), 3)
        self.assertEqual(self.gamma.points.shape, (3, 3))

    def test_unequal_lengths(self):
        """x and y must have one entry per atom"""
        with self.assertRaises(ValueError):
            JointDiscreteMeasure([0., 1.], [0.])

    def test_marginals_keep_atoms(self):
        """marginals project without merging"""
        mu, nu = marginals(self.gamma)
        self.assertEqual(mu.size, 3)
        self.assertEqual(nu.dim, 2)
        self.assertTrue(np.array_equal(mu.weights, self.gamma.weights))

    def test_swap(self):
        """swap exchanges the components"""
        swapped = self.gamma.swap()
        self.assertEqual(swapped.x_dim, 2)
        self.assertEqual(swapped.swap(), self.gamma)

    def test_permute_y(self):
        """permute_y re-pairs the y column"""
        permuted = self.gamma.permute_y([2, 0, 1])
        self.assertTrue(np.array_equal(permuted.y_points[0], [4., 5.]))
        self.assertTrue(np.array_equal(permuted.x_points, self.gamma.x_points))
        self.assertEqual(self.gamma.permute_y([0, 1, 2]), self.gamma)
        with self.assertRaises(ValueError):
            self.gamma.permute_y([0, 0, 1])

    def test_coalesce(self):
        """coalesce merges identical pairs only"""
        gamma = JointDiscreteMeasure([0., 0., 1.], [1., 1., 1.]).coalesce()
        self.assertEqual(len(gamma), 2)
        self.assertTrue(np.allclose(sorted(gamma.weights), [1./3, 2./3]))

    def test_from_samples(self):
        """from_samples keeps order and duplicates"""
        gamma = from_samples([(1, 2), (1, 2), (3, [4])])
        self.assertEqual(len(gamma), 3)
        self.assertTrue(np.allclose(gamma.weights, 1./3))
        with self.assertRaises(ValueError):
            from_samples([])
        with self.assertRaises(ValueError):
            from_samples([(1, 2), ([1, 2], 2)])


class TestConstructions(unittest.TestCase):
    """Test product, mixture, convolve and push_forward"""
    def test_product_order(self):
        """atom i*m+j of the product is (x_i, y_j)"""
        mu = DiscreteMeasure([0., 1.], [.25, .75])
        nu = DiscreteMeasure([5., 6., 7.])
        prod = product(mu, nu)
        self.assertEqual(len(prod), 6)
        self.assertEqual(prod.x_points[4, 0], 1.)
        self.assertEqual(prod.y_points[4, 0], 6.)
        self.assertAlmostEqual(prod.weights[4], .25)

    def test_product_budget(self):
        """products beyond the budget raise CapacityError"""
        mu = DiscreteMeasure(np.arange(10.))
        with self.assertRaises(CapacityError):
            product(mu, mu, max_atoms=99)
        self.assertEqual(len(product(mu, mu, max_atoms=100)), 100)

    def test_product_coalesce(self):
        """coalesce merges duplicate marginal atoms first"""
        mu = DiscreteMeasure([0., 0., 1.])
        self.assertEqual(len(product(mu, mu)), 9)
        self.assertEqual(len(product(mu, mu, coalesce=True)), 4)

    def test_mixture(self):
        """mixture concatenates atoms with scaled weights"""
        g0 = JointDiscreteMeasure([0.], [0.])
        g1 = JointDiscreteMeasure([1., 2.], [1., 2.])
        mixed = mixture(g0, g1, .5)
        self.assertEqual(len(mixed), 3)
        self.assertTrue(np.allclose(mixed.weights, [.5, .25, .25]))
        self.assertIs(mixture(g0, g1, 0.), g0)
        self.assertIs(mixture(g0, g1, 1.), g1)
        with self.assertRaises(ValueError):
            mixture(g0, g1, 1.5)

    def test_convolve(self):
        """convolution adds kernel displacements lexicographically"""
        gamma = JointDiscreteMeasure([0., 10.], [0., 10.])
        kernel = DiscreteMeasure([-1., 1.])
        conv = convolve(gamma, kernel, kernel)
        self.assertEqual(len(conv), 8)
        self.assertEqual(tuple(conv.points[1]), (-1., 1.))
        self.assertEqual(tuple(conv.points[7]), (11., 11.))
        self.assertTrue(np.allclose(conv.weights, 1./8))
        with self.assertRaises(CapacityError):
            convolve(gamma, kernel, kernel, max_atoms=7)

    def test_push_forward(self):
        """push_forward applies maps componentwise"""
        gamma = JointDiscreteMeasure([1., 2.], [3., 4.])
        image = push_forward(gamma, AffineMap([[2.]], [1.]), None)
        self.assertTrue(np.array_equal(image.x_points[:, 0], [3., 5.]))
        self.assertTrue(np.array_equal(image.y_points, gamma.y_points))

    def test_affine_map(self):
        """AffineMap validates its dimensions"""
        self.assertTrue(np.array_equal(AffineMap(dim=2)([[1., 2.]]), [[1., 2.]]))
        with self.assertRaises(ValueError):
            AffineMap()
        with self.assertRaises(ValueError):
            AffineMap([[1., 0.]])
        with self.assertRaises(ValueError):
            AffineMap(dim=2)([[1.]])


class TestDiameter(unittest.TestCase):
    """Test diameter"""
    def test_three_points(self):
        """expected distance of two draws from {1, 2, 3} is 8/9"""
        self.assertAlmostEqual(diameter(DiscreteMeasure([1., 2., 3.]), MarginalCost()), 8./9)

    def test_point_mass(self):
        """point masses have zero diameter"""
        self.assertEqual(diameter(DiscreteMeasure.point_mass([1.]), MarginalCost()), 0.)

    def test_joint(self):
        """joint measures are measured on the concatenated space"""
        gamma = JointDiscreteMeasure([0., 3.], [0., 4.])
        self.assertAlmostEqual(diameter(gamma, MarginalCost()), 2.5)


class TestCSV(unittest.TestCase):
    """Test read_csv and write_csv"""
    def test_read(self):
        """header row is skipped, columns are split by dimension"""
        source = io.StringIO(u"x1,y1,y2\n1,2,3\n4,5,6\n")
        gamma = read_csv(source, 1, 2)
        self.assertEqual(gamma.y_dim, 2)
        self.assertEqual(gamma.y_points[1, 1], 6.)

    def test_read_errors(self):
        """malformed content raises ValueError"""
        with self.assertRaises(ValueError):
            read_csv(io.StringIO(u"x1,y1\n1,2,3\n"))
        with self.assertRaises(ValueError):
            read_csv(io.StringIO(u"x1,y1\n1,abc\n"))

    def test_write_read(self):
        """written samples are read back exactly"""
        gamma = JointDiscreteMeasure([0.1, 1./3], [2./7, -5.5])
        target = io.StringIO()
        write_csv(gamma, target)
        self.assertTrue(target.getvalue().startswith('x1,y1\n'))
        target.seek(0)
        self.assertEqual(read_csv(target), gamma)


if __name__ == '__main__':
    unittest.main()
