"""Test for tdep.examples

Most tests simply check that the example can be run without error.
"""
import shutil
import tempfile
import unittest

import numpy as np


class TestSharpness(unittest.TestCase):
    """Test examples.sharpness"""
    def test_example(self):
        """transport dependency lies strictly below the common bound"""
        from tdep.examples.sharpness import result, expected, bound
        self.assertAlmostEqual(result.value, expected, places=9)
        for value in result.bounds:
            self.assertAlmostEqual(value, bound, places=9)
        self.assertLess(expected, bound)


class TestBounds(unittest.TestCase):
    """Test examples.bounds"""
    def test_example(self):
        """bounds and plan costs are strictly ordered"""
        from tdep.examples.bounds import result, plans
        self.assertLess(result.value, result.bound_pi2)
        self.assertLess(result.bound_pi2, result.bound_pi3)
        self.assertLess(result.bound_pi3, result.bound_pi1)
        for name, plan in plans.items():
            self.assertAlmostEqual(plan.primal_cost, getattr(result, name.replace('plan', 'bound')))


class TestGaussian(unittest.TestCase):
    """Test examples.gaussian"""
    def test_table(self):
        """closed forms increase with rho"""
        from tdep.examples.gaussian import table
        for column in range(1, 5):
            values = [row[column] for row in table]
            self.assertTrue(all(a < b for a, b in zip(values, values[1:])))

    def test_estimates(self):
        """estimates are reproducible"""
        from tdep.examples.gaussian import estimates
        first = estimates(.5, 10, replicates=2, seed=1)
        self.assertEqual(len(first), 2)
        self.assertEqual(first, estimates(.5, 10, replicates=2, seed=1))


class TestValidation(unittest.TestCase):
    """Test examples.validation"""
    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_data_store(self):
        """results are aggregated online"""
        from tdep.examples.validation import DataStore, IndependenceBias
        store = DataStore(self.directory)
        config = IndependenceBias(10, 1, 1)
        self.assertEqual(store.get_runs(config), 0)
        for value in (1., 2., 3., 6.):
            store.feed_result({'dcor': value}, config)
        stats = store.get_stats(config)
        self.assertEqual(stats.runs, 4)
        self.assertAlmostEqual(stats.mean['dcor'], 3.)
        self.assertAlmostEqual(stats.stdev['dcor'], np.std([1., 2., 3., 6.], ddof=1))
        self.assertAlmostEqual(stats.median('dcor'), 2.5)
        self.assertEqual([fname for fname, _ in store], [store.get_path_for_config(config)])

    def test_experiments(self):
        """experiments have unique names and run from seeds"""
        from tdep.examples.validation import (GaussianConsistency, TestRejection, experiments,
                                              run_experiment, seed_for)
        configs = experiments()
        self.assertEqual(len(set(config.name for config in configs)), len(configs))
        config = GaussianConsistency(10, .5, 'exact')
        result = run_experiment(config, seed_for(0, config, 0))
        self.assertEqual(result, run_experiment(config, seed_for(0, config, 0)))
        self.assertAlmostEqual(result['error'], abs(result['tdep'] - config.reference['tdep']))
        rejection = [config for config in configs if isinstance(config, TestRejection)][0]
        self.assertAlmostEqual(rejection.reference['reject'], .1)


if __name__ == '__main__':
    unittest.main()
