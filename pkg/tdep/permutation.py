# Copyright 2024 The tdep authors
#
# Permission is hereby granted, free of charge, to any person obtaining
# a copy of this software and associated documentation files
# (the "Software"), to deal in the Software without restriction,
# including without limitation the rights to use, copy, modify, merge,
# publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so,
# subject to the following conditions:
#
# The above copyright notice and this permission notice shall be
# included in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND,
# EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF
# MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT.
# IN NO EVENT SHALL THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY
# CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT,
# TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE
# SOFTWARE OR THE USE OR OTHER DEALINGS IN THE SOFTWARE.

"""Permutation tests of independence and their power

A permutation test compares a dependency coefficient rho on the
observed pairing z = ((x_1, y_1), ..., (x_n, y_n)) with its values on
m re-pairings z_sigma = ((x_1, y_sigma(1)), ..., (x_n, y_sigma(n))) for
uniformly random permutations sigma. With

    exceed = #{i : rho(z_sigma_i) > rho(z)},

independence is rejected iff exceed <= k, which is a test of level
(k+1)/(m+1). Ties count as non-exceeding.

Random numbers are drawn from numpy generators seeded with
numpy.random.SeedSequence. power_estimate spawns one child sequence per
run and splits it into a data stream and a permutation stream, so
results do not depend on the number of worker processes.
"""

import logging
import os
from collections import namedtuple

import numpy as np

from .geometries import convex_contaminate, gaussian_noise

NOISE_MODELS = ('convex', 'gaussian')


class TestReport(namedtuple('_TestReport', ('statistic', 'perm_statistics', 'exceed_count',
                                            'k', 'm', 'reject', 'nominal_level', 'seed'))):
    """Outcome of a permutation test"""
    __slots__ = ()
    __test__ = False

    def as_dict(self):
        result = self._asdict()
        result['perm_statistics'] = list(self.perm_statistics)
        return result


def spawn_streams(seed=None, count=2):
    """Independent generators spawned from a common seed

    The first generator is the data stream, the second the
    permutation stream.
    """
    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.default_rng(child) for child in sequence.spawn(count)]


def _seed_value(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed.entropy
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    return None


def _permutations(n, m, rng, exclude_identity):
    identity = np.arange(n)
    for _ in range(m):
        permutation = rng.permutation(n)
        while exclude_identity and np.array_equal(permutation, identity):
            permutation = rng.permutation(n)
        yield permutation


def permutation_test(gamma, coefficient, m=29, k=2, seed=None, exclude_identity=False,
                     level=None):
    """Permutation test of independence of the components of gamma

    coefficient is a callable returning the statistic of a joint
    measure, typically a tdep.coefficients.CoefficientRequest. The m
    permutations are drawn with possible repeats from a generator
    seeded by seed. With exclude_identity, the identity permutation is
    redrawn. If level is given, (k+1)/(m+1) must not exceed it.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if not 0 <= k <= m:
        raise ValueError("k must lie in [0, m]")
    nominal_level = (k+1.)/(m+1.)
    if level is not None and nominal_level > level + 1e-12:
        raise ValueError("nominal level %g exceeds level %g" % (nominal_level, level))
    if exclude_identity and len(gamma) < 2:
        raise ValueError("exclude_identity requires at least two atoms")

    rng = np.random.default_rng(seed)
    statistic = coefficient(gamma)
    perm_statistics = tuple(coefficient(gamma.permute_y(permutation))
                            for permutation in _permutations(len(gamma), m, rng,
                                                             exclude_identity))
    exceed_count = sum(1 for value in perm_statistics if value > statistic)
    return TestReport(statistic, perm_statistics, exceed_count, k, m,
                      exceed_count <= k, nominal_level, _seed_value(seed))


def _noisy_sample(geometry, noise_level, noise, n, seed):
    if noise == 'convex':
        return convex_contaminate(geometry, noise_level, n, seed)
    return gaussian_noise(geometry, noise_level, n, seed)


def _run_once(job):
    geometry, noise_level, noise, coefficient, n, m, k, sequence, exclude_identity = job
    data_seed, perm_seed = sequence.spawn(2)
    gamma = _noisy_sample(geometry, noise_level, noise, n, data_seed)
    report = permutation_test(gamma, coefficient, m, k, perm_seed, exclude_identity)
    return report.reject


def worker_count(workers=None, jobs=None):
    """Number of worker processes, capped by the TDEP_THREADS variable"""
    if workers is None:
        from multiprocessing import cpu_count
        workers = cpu_count()
    limit = os.environ.get('TDEP_THREADS')
    if limit:
        workers = min(workers, int(limit))
    if jobs is not None:
        workers = min(workers, jobs)
    return max(1, workers)


def _map(function, jobs, workers):
    if workers <= 1:
        return [function(job) for job in jobs]
    from multiprocessing import Pool
    pool = Pool(workers)
    try:
        return pool.map(function, jobs)
    finally:
        pool.close()
        pool.join()


def power_estimate(geometry, noise_level, coefficient, runs, n, m=29, k=2, seed=None,
                   noise='convex', workers=None, exclude_identity=False):
    """Fraction of rejections over independent noisy samples

    Every run draws n atoms from geometry, polluted by noise_level with
    the noise model 'convex' (contamination probability epsilon) or
    'gaussian' (standard deviation sigma), and performs a permutation
    test. Runs are distributed over worker processes; geometry and
    coefficient must therefore be picklable.
    """
    if runs < 1:
        raise ValueError("runs must be positive")
    if noise not in NOISE_MODELS:
        raise ValueError("noise must be one of %s" % ', '.join(NOISE_MODELS))
    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    jobs = [(geometry, noise_level, noise, coefficient, n, m, k, child, exclude_identity)
            for child in sequence.spawn(runs)]
    workers = worker_count(workers, runs)
    logging.debug("power of %r at %s noise %g: %d runs on %d workers",
                  coefficient, noise, noise_level, runs, workers)
    rejections = _map(_run_once, jobs, workers)
    return sum(rejections)/float(runs)


def power_curve(geometry, noise_levels, coefficient, runs, n, m=29, k=2, seed=None,
                noise='convex', workers=None, exclude_identity=False):
    """List of (noise_level, power) pairs in the order of noise_levels"""
    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    curve = []
    for level, child in zip(noise_levels, sequence.spawn(len(noise_levels))):
        power = power_estimate(geometry, level, coefficient, runs, n, m, k, child,
                               noise, workers, exclude_identity)
        logging.info("noise %g: power %g", level, power)
        curve.append((level, power))
    return curve
