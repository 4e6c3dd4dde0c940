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

"""Normalized dependency coefficients

Transport correlations normalize the transport dependency into [0, 1]:

    rho_alpha        (tau_{(alpha d_X + d_Y)^p} / diam_{d_Y^p} nu)^(1/p)
    rho_inf          (tau^Y / diam_{d_Y^p} nu)^(1/p), the limit alpha -> oo
    rho_star         tau^(1/p) under the diameter-normalized cost c_*
    rho_contracting  (tau_{(d_X + d_Y)^p} / min(diam mu, diam nu))^(1/p)

rho_alpha equals one exactly on graphs of alpha-Lipschitz functions,
rho_star exactly on graphs of dilatations. Pearson and Spearman
correlation and the (Euclidean) distance correlation are provided for
comparison.

CoefficientRequest bundles the choice of a coefficient with its
parameters, so that it can be passed to the permutation test and the
power harness (and pickled to worker processes).
"""

from collections import namedtuple

import numpy as np

from ._utils import clamp
from .costs import AdditiveCost, IsometricCost, MarginalCost, distances
from .dependency import marginal_transport_dependency, transport_dependency
from .errors import DegenerateMeasureError
from .measures import JointDiscreteMeasure, diameter

#: tolerated excess of normalized ratios over one, per solver
DRIFT = {'exact': 1e-7, 'sinkhorn': 1e-2}

KINDS = ('rho_alpha', 'rho_inf', 'rho_star', 'rho_contracting', 'pearson', 'spearman', 'dcor')


class CoefficientResult(namedtuple('_CoefficientResult', ('kind', 'value', 'n', 'p', 'alpha',
                                                          'solver', 'tau', 'diam_y', 'diam_x'))):
    """Value of a coefficient with the quantities it was computed from"""
    __slots__ = ()

    def as_dict(self):
        return self._asdict()


def _normalize(tau, normalizer, p, solver):
    ratio = clamp(tau/normalizer, 0., 1., below=1e-9, above=DRIFT.get(solver, 1e-7),
                  name='normalized transport dependency')
    return ratio**(1./p)


def _diameters(gamma, p, metric_x, metric_y):
    mu, nu = gamma.marginals()
    return (diameter(mu, MarginalCost(metric_x, p)),
            diameter(nu, MarginalCost(metric_y, p)))


def _rho_alpha(gamma, alpha, p=1., metric_x='euclidean', metric_y='euclidean', solver='auto'):
    if not 0 < alpha < float('inf'):
        raise ValueError("alpha must be positive and finite")
    diam_x, diam_y = _diameters(gamma, p, metric_x, metric_y)
    if diam_y <= 0:
        raise DegenerateMeasureError("Y-marginal has zero diameter")
    result = transport_dependency(gamma, AdditiveCost(alpha, p, 1., metric_x, metric_y),
                                  solver, bounds=False)
    value = _normalize(result.value, diam_y, p, result.solver)
    return CoefficientResult('rho_alpha', value, len(gamma), p, alpha, result.solver,
                             result.value, diam_y, diam_x)


def _rho_inf(gamma, p=1., metric_y='euclidean', tolerance=None):
    cost_y = MarginalCost(metric_y, p)
    diam_y = diameter(gamma.marginals()[1], cost_y)
    if diam_y <= 0:
        raise DegenerateMeasureError("Y-marginal has zero diameter")
    tau = marginal_transport_dependency(gamma, cost_y, tolerance)
    value = _normalize(tau, diam_y, p, 'exact')
    return CoefficientResult('rho_inf', value, len(gamma), p, float('inf'), 'exact',
                             tau, diam_y, None)


def _rho_star(gamma, p=1., metric_x='euclidean', metric_y='euclidean', solver='auto'):
    mu, nu = gamma.marginals()
    cost = IsometricCost(mu, nu, p, metric_x, metric_y)
    result = transport_dependency(gamma, cost, solver, bounds=False)
    value = _normalize(result.value, 1., p, result.solver)
    return CoefficientResult('rho_star', value, len(gamma), p, cost.alpha, result.solver,
                             result.value, cost.diam_y, cost.diam_x)


def _rho_contracting(gamma, p=1., metric_x='euclidean', metric_y='euclidean', solver='auto'):
    diam_x, diam_y = _diameters(gamma, p, metric_x, metric_y)
    if min(diam_x, diam_y) <= 0:
        raise DegenerateMeasureError("marginals must have positive diameters")
    result = transport_dependency(gamma, AdditiveCost(1., p, 1., metric_x, metric_y),
                                  solver, bounds=False)
    value = _normalize(result.value, min(diam_x, diam_y), p, result.solver)
    return CoefficientResult('rho_contracting', value, len(gamma), p, 1., result.solver,
                             result.value, diam_y, diam_x)


def rho_alpha(gamma, alpha, p=1., metric_x='euclidean', metric_y='euclidean', solver='auto'):
    """alpha-transport correlation"""
    return _rho_alpha(gamma, alpha, p, metric_x, metric_y, solver).value


def rho_inf(gamma, p=1., metric_y='euclidean', tolerance=None):
    """Marginal transport correlation, computed from the exact tau^Y"""
    return _rho_inf(gamma, p, metric_y, tolerance).value


def rho_star(gamma, p=1., metric_x='euclidean', metric_y='euclidean', solver='auto'):
    """Isometric transport correlation"""
    return _rho_star(gamma, p, metric_x, metric_y, solver).value


def rho_contracting(gamma, p=1., metric_x='euclidean', metric_y='euclidean', solver='auto'):
    """Contracting transport correlation"""
    return _rho_contracting(gamma, p, metric_x, metric_y, solver).value


def _check_scalar(gamma):
    if gamma.x_dim != 1 or gamma.y_dim != 1:
        raise ValueError("correlation requires one-dimensional x and y")
    if len(gamma) < 2:
        raise ValueError("correlation requires at least two samples")


def pearson(gamma):
    """Pearson correlation of a measure on R x R"""
    _check_scalar(gamma)
    w = gamma.weights
    x, y = gamma.x_points[:, 0], gamma.y_points[:, 0]
    x, y = x - w.dot(x), y - w.dot(y)
    var_x, var_y = w.dot(x*x), w.dot(y*y)
    if var_x <= 0 or var_y <= 0:
        raise DegenerateMeasureError("correlation of a constant marginal is undefined")
    return float(np.clip(w.dot(x*y)/np.sqrt(var_x*var_y), -1., 1.))


def spearman(gamma):
    """Spearman rank correlation (average ranks for ties)"""
    from scipy.stats import rankdata
    _check_scalar(gamma)
    ranks = JointDiscreteMeasure(rankdata(gamma.x_points[:, 0], method='average'),
                                 rankdata(gamma.y_points[:, 0], method='average'),
                                 gamma.weights)
    return pearson(ranks)


def _dcov2(dist_x, dist_y, weights):
    """V-statistic of the squared distance covariance from distance matrices"""
    row_x, row_y = dist_x.dot(weights), dist_y.dot(weights)
    value = (weights.dot(dist_x*dist_y).dot(weights)
             + weights.dot(row_x)*weights.dot(row_y)
             - 2.*weights.dot(row_x*row_y))
    return clamp(float(value), 0., below=1e-12, name='squared distance covariance')


def dcov2(gamma):
    """Squared Euclidean distance covariance of gamma"""
    return _dcov2(distances(gamma.x_points, gamma.x_points),
                  distances(gamma.y_points, gamma.y_points), gamma.weights)


def dcor(gamma):
    """Euclidean distance correlation of gamma"""
    if len(gamma) < 2:
        raise ValueError("distance correlation requires at least two samples")
    dist_x = distances(gamma.x_points, gamma.x_points)
    dist_y = distances(gamma.y_points, gamma.y_points)
    weights = gamma.weights
    var_x, var_y = _dcov2(dist_x, dist_x, weights), _dcov2(dist_y, dist_y, weights)
    if var_x <= 0 or var_y <= 0:
        raise DegenerateMeasureError("distance variance of a marginal vanishes")
    value = _dcov2(dist_x, dist_y, weights)/np.sqrt(var_x*var_y)
    return float(min(np.sqrt(value), 1.))


class CoefficientRequest(object):
    """Choice of a dependency coefficient and its parameters

    kind is one of KINDS. alpha is required for rho_alpha, p applies
    to the transport correlations, metric_x and metric_y to all
    transport correlations, solver to all but rho_inf, tolerance
    to the x-grouping of rho_inf. Calling a request on a joint measure
    returns the value of the coefficient, evaluate() returns a
    CoefficientResult.
    """
    def __init__(self, kind, alpha=None, p=1., metric_x='euclidean', metric_y='euclidean',
                 solver='auto', tolerance=None):
        if kind not in KINDS:
            raise ValueError("kind must be one of %s" % ', '.join(KINDS))
        if kind == 'rho_alpha' and (alpha is None or not 0 < alpha < float('inf')):
            raise ValueError("rho_alpha requires a positive finite alpha")
        if not p > 0:
            raise ValueError("p must be positive")
        self.kind = kind
        self.alpha = alpha
        self.p = p
        self.metric_x = metric_x
        self.metric_y = metric_y
        self.solver = solver
        self.tolerance = tolerance

    def evaluate(self, gamma):
        """CoefficientResult of the requested coefficient on gamma"""
        kind = self.kind
        if kind == 'rho_alpha':
            return _rho_alpha(gamma, self.alpha, self.p, self.metric_x, self.metric_y,
                              self.solver)
        elif kind == 'rho_inf':
            return _rho_inf(gamma, self.p, self.metric_y, self.tolerance)
        elif kind == 'rho_star':
            return _rho_star(gamma, self.p, self.metric_x, self.metric_y, self.solver)
        elif kind == 'rho_contracting':
            return _rho_contracting(gamma, self.p, self.metric_x, self.metric_y, self.solver)
        value = {'pearson': pearson, 'spearman': spearman, 'dcor': dcor}[kind](gamma)
        return CoefficientResult(kind, value, len(gamma), None, None, None, None, None, None)

    def __call__(self, gamma):
        return self.evaluate(gamma).value

    def __eq__(self, other):
        return isinstance(other, CoefficientRequest) and vars(self) == vars(other)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.kind, self.alpha, self.p))

    def __repr__(self):
        if self.kind == 'rho_alpha':
            return '%s(%r, alpha=%g, p=%g)' % (type(self).__name__, self.kind, self.alpha, self.p)
        return '%s(%r, p=%g)' % (type(self).__name__, self.kind, self.p)
