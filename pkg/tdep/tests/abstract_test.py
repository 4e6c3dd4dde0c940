"""Shared helpers for the tdep test suites

To test implementations of abstract classes, define a TestCase that
inherits from the abstract test case and overload the abstract class
by the implementation class to be tested. For example,

class TestTransportSolver(AbstractTestCase('Solver', tdep.algorithms.TransportSolver)):
    def test_interface(self):
        "only called when self.Solver is a concrete class."
        pass

class TestNetworkSimplex(TestTransportSolver):
    Solver = NetworkSimplex

would test the TransportSolver interface for the NetworkSimplex class.

random_measure draws small random joint measures for property tests.
"""
import unittest
import inspect

import numpy as np

from tdep.measures import JointDiscreteMeasure


def AbstractTestCase(name, cls):
    """Support tests for abstract base classes.

    To be used as base class when defining test cases for abstract
    class implementations. cls will be bound to the attribute `name`
    in the returned base class. This allows tests in the subclass to
    access the abstract base class or its concretization.
    """
    class BaseTestCase(unittest.TestCase):
        """TestCase that is skipped if the tested class is abstract."""
        def run(self, *args, **opts):
            """Run the test case only for non-abstract test classes."""
            if inspect.isabstract(getattr(self, name)):
                return
            else:
                return super(BaseTestCase, self).run(*args, **opts)
    setattr(BaseTestCase, name, cls)
    return BaseTestCase


def random_measure(rng, n=5, x_dim=1, y_dim=1, grid=None, uniform=True):
    """Random joint measure with n atoms

    With grid, coordinates are integers in range(grid), otherwise
    uniform in [0, 1). Weights are uniform or Dirichlet distributed.
    """
    if grid:
        x = rng.integers(grid, size=(n, x_dim)).astype(float)
        y = rng.integers(grid, size=(n, y_dim)).astype(float)
    else:
        x, y = rng.random((n, x_dim)), rng.random((n, y_dim))
    weights = None if uniform else rng.dirichlet(np.ones(n))
    return JointDiscreteMeasure(x, y, weights)
