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

"""Transport dependency and its upper bounds

The transport dependency of a joint measure gamma with marginals mu
and nu is the optimal transport cost between gamma and mu x nu,

    tau(gamma) = T_c(gamma, mu x nu).

It vanishes exactly when gamma is a product measure. For discrete
gamma with n atoms, the product has n^2 atoms, and the transport
problem is solved by one of the solvers of tdep.algorithms.

Three upper bounds come with explicit couplings:

    bound_pi1  moves mass only along Y: the c_Y-diameter of nu
    bound_pi2  moves each pair along the cheaper of X and Y:
               the min(c_X, c_Y)-diameter of gamma
    bound_pi3  transports each conditional gamma(x, .) optimally to nu:
               the marginal transport dependency tau^Y(gamma)

The bounds are evaluated from their defining sums. plan_pi1, plan_pi2
and plan_pi3 construct the corresponding transport plans explicitly.
"""

import logging
from collections import namedtuple

import numpy as np

from .algorithms import NetworkSimplex, TransportPlan, select_solver
from .costs import AdditiveCost, MarginalCost, PairwiseCost, distances
from .measures import DiscreteMeasure, diameter, product

#: cost families whose marginal costs bound the cost along the fibers
BOUNDED_FAMILIES = ('additive', 'raw_power', 'normalized_isometric')


class TdepResult(namedtuple('_TdepResult', ('value', 'plan', 'bound_pi1', 'bound_pi2',
                                            'bound_pi3', 'diam_x', 'diam_y', 'solver'))):
    """Transport dependency together with its bounds

    value is tau(gamma), plan the transport plan realizing it (None
    when tau^Y was computed for alpha = inf), bound_pi1, bound_pi2 and
    bound_pi3 the upper bounds (None if not available for the cost
    family; bound_pi2 is None for alpha = inf, where the X-marginal
    cost is undefined), diam_x and diam_y the diameters of the marginals with
    respect to the marginal costs, and solver the name of the solver.
    """
    __slots__ = ()

    @property
    def bounds(self):
        """Tuple of the available upper bounds"""
        return tuple(bound for bound in (self.bound_pi1, self.bound_pi2, self.bound_pi3)
                     if bound is not None)

    def as_dict(self):
        """Serializable representation without the transport plan"""
        result = self._asdict()
        plan = result.pop('plan')
        result['plan_entries'] = len(plan) if plan is not None else None
        return result


class PowerSchedule(object):
    """Scale schedule n -> n**exponent"""
    def __init__(self, exponent):
        if exponent <= 0:
            raise ValueError("exponent must be positive")
        self.exponent = exponent

    def __call__(self, n):
        return float(n)**self.exponent

    def __repr__(self):
        return '%s(%g)' % (type(self).__name__, self.exponent)


def default_alpha_schedule(p=1.):
    """Schedule alpha_n = n^(1/(2p)) of tdep_alpha_schedule"""
    return PowerSchedule(.5/p)


def _marginal(cost, axis):
    if isinstance(cost, MarginalCost):
        return cost
    marginal = cost.marginal_x if axis == 'x' else cost.marginal_y
    if marginal is None:
        raise ValueError("cost has no finite %s-marginal" % axis.upper())
    return marginal


def _x_groups(gamma, tolerance=None):
    """Index arrays of atoms that share their x-coordinate

    Without tolerance, coordinates must be equal. With tolerance,
    coordinates are compared after rounding to a grid of that width.
    """
    keys = gamma.x_points
    if tolerance:
        keys = np.round(keys/tolerance)
    _, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    order = np.argsort(inverse, kind='stable')
    bounds = np.flatnonzero(np.diff(inverse[order])) + 1
    return np.split(order, bounds)


def bound_pi1(gamma, cost_y):
    """Cost of moving mass along Y only: the c_Y-diameter of nu"""
    nu = DiscreteMeasure(gamma.y_points, gamma.weights)
    return diameter(nu, _marginal(cost_y, 'y'))


def bound_pi2(gamma, cost_x, cost_y=None):
    """The min(c_X, c_Y)-diameter of gamma

    cost_x may also be a CostSpec, whose marginal costs are used then.
    """
    if cost_y is None:
        cost_x, cost_y = _marginal(cost_x, 'x'), _marginal(cost_x, 'y')
    matrix = np.minimum(cost_x.pairwise(gamma.x_points, gamma.x_points),
                        cost_y.pairwise(gamma.y_points, gamma.y_points))
    return max(float(gamma.weights.dot(matrix).dot(gamma.weights)), 0.)


def _conditional_plan(gamma, group, cost_y):
    """Optimal plan from the conditional of a group to nu (group-local rows)"""
    weights = gamma.weights[group]/gamma.weights[group].sum()
    matrix = cost_y.pairwise(gamma.y_points[group], gamma.y_points)
    plan, _ = NetworkSimplex().solve(weights, gamma.weights, matrix)
    return plan


def marginal_transport_dependency(gamma, cost_y, tolerance=None):
    """Marginal transport dependency tau^Y(gamma)

    The mu-average of the optimal c_Y-transport costs between the
    conditionals gamma(x, .) and nu. Atoms are grouped by their x
    coordinate (see tolerance in _x_groups). Single-atom groups have
    point mass conditionals whose transport cost is explicit; larger
    groups are solved exactly.
    """
    cost_y = _marginal(cost_y, 'y')
    singles, total = [], 0.
    for group in _x_groups(gamma, tolerance):
        if len(group) == 1:
            singles.append(group[0])
            continue
        mass = gamma.weights[group].sum()
        if mass > 0:
            total += mass*_conditional_plan(gamma, group, cost_y).primal_cost
    if singles:
        singles = np.sort(singles)
        matrix = cost_y.pairwise(gamma.y_points[singles], gamma.y_points)
        total += float(gamma.weights[singles].dot(matrix).dot(gamma.weights))
    return max(total, 0.)


bound_pi3 = marginal_transport_dependency


def transport_dependency(gamma, cost, solver='auto', bounds=True, max_atoms=None,
                         coalesce=False, tolerance=None):
    """Transport dependency tau(gamma) for a given cost specification

    solver is 'auto', 'exact', 'sinkhorn' or a TransportSolver. If
    bounds is True and the cost family admits them, the three upper
    bounds are evaluated too. An AdditiveCost with alpha = inf yields
    the marginal transport dependency. max_atoms and coalesce are
    passed to tdep.measures.product, tolerance to the x-grouping of
    bound_pi3.
    """
    mu, nu = gamma.marginals()
    if getattr(cost, 'is_infinite', False):
        cost_y = cost.marginal_y
        value = marginal_transport_dependency(gamma, cost_y, tolerance)
        diam_y = diameter(nu, cost_y)
        return TdepResult(value, None, diam_y, None, value, float('inf'), diam_y, 'exact')

    target = product(mu, nu, max_atoms=max_atoms, coalesce=coalesce)
    solver = select_solver(solver, len(gamma), len(target))
    plan, _ = solver.solve(gamma, target, PairwiseCost(cost, gamma, target))
    value = max(plan.primal_cost, 0.)

    cost_x, cost_y = cost.marginal_x, cost.marginal_y
    diam_x, diam_y = diameter(mu, cost_x), diameter(nu, cost_y)
    pi1 = pi2 = pi3 = None
    if bounds and cost.family in BOUNDED_FAMILIES:
        pi1 = bound_pi1(gamma, cost_y)
        pi2 = bound_pi2(gamma, cost_x, cost_y)
        pi3 = marginal_transport_dependency(gamma, cost_y, tolerance)
        if solver.name == 'exact' and value > min(pi1, pi2, pi3) + 1e-7:
            logging.warning("transport dependency %r exceeds its upper bounds %r",
                            value, (pi1, pi2, pi3))
    return TdepResult(value, plan, pi1, pi2, pi3, diam_x, diam_y, solver.name)


def tdep_alpha_schedule(gamma, p=1., metric_x='euclidean', metric_y='euclidean',
                        alpha_of_n=None, solver='auto'):
    """Transport dependency at the sample size dependent scale alpha_of_n(n)

    For alpha_n growing slowly enough, this is a consistent estimator
    of the marginal transport dependency tau^Y with c_Y = d_Y^p. The
    default schedule is default_alpha_schedule(p).
    """
    if alpha_of_n is None:
        alpha_of_n = default_alpha_schedule(p)
    alpha = alpha_of_n(len(gamma))
    if not alpha > 0:
        raise ValueError("alpha_of_n must return positive values")
    cost = AdditiveCost(alpha, p, 1., metric_x, metric_y)
    return transport_dependency(gamma, cost, solver, bounds=False).value


def _product_plan(gamma, cost, rows, cols, masses, max_atoms):
    mu, nu = gamma.marginals()
    target = product(mu, nu, max_atoms=max_atoms)
    positive = masses > 0
    return TransportPlan(rows[positive], cols[positive], masses[positive],
                         len(gamma), len(target), cost=PairwiseCost(cost, gamma, target))


def plan_pi1(gamma, cost, max_atoms=None):
    """Plan moving atom pairs (z_k, z_l) to (x_k, y_l) from z_k"""
    n = len(gamma)
    rows = np.repeat(np.arange(n), n)
    cols = np.arange(n*n)
    masses = np.outer(gamma.weights, gamma.weights).ravel()
    return _product_plan(gamma, cost, rows, cols, masses, max_atoms)


def plan_pi2(gamma, cost, max_atoms=None):
    """Plan moving atom pairs (z_k, z_l) to (x_k, y_l) along the cheaper factor

    Pairs with c_X(x_k, x_l) >= c_Y(y_k, y_l) start from z_k and move
    along Y, all others start from z_l and move along X.
    """
    n = len(gamma)
    vertical = (cost.marginal_x.pairwise(gamma.x_points, gamma.x_points)
                >= cost.marginal_y.pairwise(gamma.y_points, gamma.y_points))
    first, second = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    rows = np.where(vertical, first, second).ravel()
    cols = np.arange(n*n)
    masses = np.outer(gamma.weights, gamma.weights).ravel()
    return _product_plan(gamma, cost, rows, cols, masses, max_atoms)


def plan_pi3(gamma, cost, tolerance=None, max_atoms=None):
    """Plan transporting every conditional gamma(x, .) optimally to nu

    Mass that the conditional plan of the group of x sends to y_j is
    distributed over the product atoms (x_i, y_j) of the group members
    i in proportion to their weights.
    """
    n = len(gamma)
    cost_y = cost.marginal_y
    rows, cols, masses = [], [], []
    for group in _x_groups(gamma, tolerance):
        if gamma.weights[group].sum() <= 0:
            continue
        plan = _conditional_plan(gamma, group, cost_y)
        size = len(plan)
        rows.append(np.repeat(group[plan.rows], len(group)))
        cols.append((np.tile(group, size)*n + np.repeat(plan.cols, len(group))))
        masses.append(np.repeat(plan.masses, len(group))*np.tile(gamma.weights[group], size))
    return _product_plan(gamma, cost, np.concatenate(rows), np.concatenate(cols),
                         np.concatenate(masses), max_atoms)


def is_contracting(gamma, alpha=1., beta=1., metric_x='euclidean', metric_y='euclidean',
                   tol=1e-12):
    """True if d_Y(y_k, y_l) <= alpha d_X(x_k, x_l)^beta on all atom pairs

    For such contracting couplings, the transport dependency under the
    additive cost with the same alpha and beta equals the Y-diameter.
    """
    dist_x = MarginalCost(metric_x, beta, alpha).from_distances(
        distances(gamma.x_points, gamma.x_points, metric_x))
    dist_y = distances(gamma.y_points, gamma.y_points, metric_y)
    return bool(np.all(dist_y <= dist_x + tol))
