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

"""Cost functions on X x Y

A cost specification describes a symmetric cost c(x1, y1, x2, y2) on
R^r x R^q that vanishes on the diagonal. All specifications are built
from the distances d_X(x1, x2) and d_Y(y1, y2) of the chosen metrics
(euclidean, l1 or linf), so they are translation invariant. The
following families are implemented as subclasses of CostSpec:

    AdditiveCost    (alpha d_X^beta + d_Y)^p
    RawPowerCost    d((x1, y1), (x2, y2))^p on the concatenated space
    MinMarginalCost min(c_X, c_Y)
    IsometricCost   additive cost normalized by the marginal diameters

Each specification exposes marginal costs c_X and c_Y as MarginalCost
instances that bound c from above along the fibers (with equality for
the additive and raw families).

Cost evaluators bind a specification to a pair of discrete measures.
ArrayCost wraps an explicit matrix, PairwiseCost computes entries on
demand in blocks of rows. Transport solvers accept both.
"""

import abc

import numpy as np
from scipy.spatial.distance import cdist

from ._utils import with_metaclass
from .errors import CapacityError, DegenerateMeasureError
from .measures import diameter

#: metric names and their scipy.spatial.distance equivalents
METRICS = {'euclidean': 'euclidean', 'l1': 'cityblock', 'linf': 'chebyshev'}

#: default budget of densely materialized cost matrices
MAX_ENTRIES = 4*10**7

#: entries per block of lazily evaluated cost matrices
BLOCK_ENTRIES = 2**22


def _check_metric(metric):
    if metric not in METRICS:
        raise ValueError("metric must be one of %s" % ', '.join(sorted(METRICS)))
    return metric


def _power(values, exponent):
    """values**exponent for non-negative values, evaluated as exp(p log d) away from zero"""
    values = np.asarray(values, dtype=float)
    if exponent == 1:
        return values
    result = np.zeros_like(values)
    positive = values > 0
    result[positive] = np.exp(exponent*np.log(values[positive]))
    return result


def distances(a, b, metric='euclidean'):
    """Matrix of distances between the rows of a and b"""
    return cdist(np.atleast_2d(a), np.atleast_2d(b), METRICS[_check_metric(metric)])


def paired_distances(a, b, metric='euclidean'):
    """Distances between corresponding rows of a and b"""
    diff = np.abs(np.atleast_2d(a) - np.atleast_2d(b))
    metric = _check_metric(metric)
    if metric == 'euclidean':
        return np.sqrt((diff*diff).sum(axis=1))
    elif metric == 'l1':
        return diff.sum(axis=1)
    return diff.max(axis=1)


class MarginalCost(object):
    """Cost scale * d(z1, z2)**power on a single factor space"""
    def __init__(self, metric='euclidean', power=1., scale=1.):
        if power <= 0:
            raise ValueError("power must be positive")
        if not 0 <= scale < float('inf'):
            raise ValueError("scale must be finite and non-negative")
        self.metric = _check_metric(metric)
        self.power = float(power)
        self.scale = float(scale)

    def from_distances(self, dist):
        """Apply the cost to an array of distances"""
        return self.scale*_power(dist, self.power)

    def pairwise(self, a, b):
        """Matrix of costs between the rows of a and b"""
        return self.from_distances(distances(a, b, self.metric))

    def paired(self, a, b):
        """Costs between corresponding rows of a and b"""
        return self.from_distances(paired_distances(a, b, self.metric))

    def __call__(self, z1, z2):
        return float(self.paired(z1, z2)[0])

    def __eq__(self, other):
        return (isinstance(other, MarginalCost)
                and (self.metric, self.power, self.scale)
                == (other.metric, other.power, other.scale))

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.metric, self.power, self.scale))

    def __repr__(self):
        return '%s(%r, power=%g, scale=%g)' % (
            type(self).__name__, self.metric, self.power, self.scale)


class CostSpec(with_metaclass(abc.ABCMeta, object)):
    """Abstract base class of costs on X x Y

    Implementations define combine(), which maps arrays of marginal
    distances d_X and d_Y to costs, and the marginal costs c_X and c_Y.
    """
    family = None
    metric_x = 'euclidean'
    metric_y = 'euclidean'

    @abc.abstractmethod
    def combine(self, dist_x, dist_y):
        """Cost for arrays of X- and Y-distances of equal shape"""
        raise NotImplementedError

    @abc.abstractproperty
    def marginal_x(self):
        """MarginalCost c_X with c(x1, y, x2, y) <= c_X(x1, x2)"""
        raise NotImplementedError

    @abc.abstractproperty
    def marginal_y(self):
        """MarginalCost c_Y with c(x, y1, x, y2) <= c_Y(y1, y2)"""
        raise NotImplementedError

    def pairwise(self, xa, ya, xb, yb):
        """Matrix of costs between atoms (xa[i], ya[i]) and (xb[j], yb[j])"""
        return self.combine(distances(xa, xb, self.metric_x),
                            distances(ya, yb, self.metric_y))

    def paired(self, x1, y1, x2, y2):
        """Costs between corresponding atoms (x1[i], y1[i]) and (x2[i], y2[i])"""
        return self.combine(paired_distances(x1, x2, self.metric_x),
                            paired_distances(y1, y2, self.metric_y))

    def __call__(self, z1, z2):
        return eval_cost(self, z1, z2)


class AdditiveCost(CostSpec):
    """Additive cost (alpha d_X^beta_x + d_Y)^p

    alpha may be float('inf'). Such a specification only marks the
    limit alpha -> oo, for which mass cannot move along X. It has no
    finite values, and tdep.dependency routes it to the marginal
    transport dependency.
    """
    family = 'additive'

    def __init__(self, alpha=1., p=1., beta_x=1.,
                 metric_x='euclidean', metric_y='euclidean'):
        if not alpha > 0:
            raise ValueError("alpha must be positive")
        if not 0 < p < float('inf'):
            raise ValueError("p must be positive and finite")
        if not 0 < beta_x < float('inf'):
            raise ValueError("beta_x must be positive and finite")
        self.alpha = float(alpha)
        self.p = float(p)
        self.beta_x = float(beta_x)
        self.metric_x = _check_metric(metric_x)
        self.metric_y = _check_metric(metric_y)

    @property
    def is_infinite(self):
        """True if alpha is the infinite marker"""
        return self.alpha == float('inf')

    def combine(self, dist_x, dist_y):
        if self.is_infinite:
            raise ValueError("alpha=inf has no finite cost values, "
                             "use the marginal transport dependency instead")
        return _power(self.alpha*_power(dist_x, self.beta_x) + dist_y, self.p)

    @property
    def marginal_x(self):
        if self.is_infinite:
            return None
        return MarginalCost(self.metric_x, self.beta_x*self.p, self.alpha**self.p)

    @property
    def marginal_y(self):
        return MarginalCost(self.metric_y, self.p)

    def __repr__(self):
        return '%s(alpha=%g, p=%g, beta_x=%g, metric_x=%r, metric_y=%r)' % (
            type(self).__name__, self.alpha, self.p, self.beta_x,
            self.metric_x, self.metric_y)


class RawPowerCost(CostSpec):
    """Power p of a metric on the concatenated space R^(r+q)"""
    family = 'raw_power'

    def __init__(self, p=1., metric='euclidean'):
        if not 0 < p < float('inf'):
            raise ValueError("p must be positive and finite")
        self.p = float(p)
        self.metric = self.metric_x = self.metric_y = _check_metric(metric)

    def combine(self, dist_x, dist_y):
        dist_x = np.asarray(dist_x, dtype=float)
        dist_y = np.asarray(dist_y, dtype=float)
        if self.metric == 'euclidean':
            dist = np.sqrt(dist_x*dist_x + dist_y*dist_y)
        elif self.metric == 'l1':
            dist = dist_x + dist_y
        else:
            dist = np.maximum(dist_x, dist_y)
        return _power(dist, self.p)

    @property
    def marginal_x(self):
        return MarginalCost(self.metric, self.p)

    @property
    def marginal_y(self):
        return MarginalCost(self.metric, self.p)

    def __repr__(self):
        return '%s(p=%g, metric=%r)' % (type(self).__name__, self.p, self.metric)


class MinMarginalCost(CostSpec):
    """Cost min(c_X(x1, x2), c_Y(y1, y2)) of two marginal costs"""
    family = 'min_marginal'

    def __init__(self, cost_x=None, cost_y=None):
        self.cost_x = cost_x or MarginalCost()
        self.cost_y = cost_y or MarginalCost()
        self.metric_x = self.cost_x.metric
        self.metric_y = self.cost_y.metric

    def combine(self, dist_x, dist_y):
        return np.minimum(self.cost_x.from_distances(dist_x),
                          self.cost_y.from_distances(dist_y))

    @property
    def marginal_x(self):
        return self.cost_x

    @property
    def marginal_y(self):
        return self.cost_y

    def __repr__(self):
        return '%s(%r, %r)' % (type(self).__name__, self.cost_x, self.cost_y)


class IsometricCost(AdditiveCost):
    """Additive cost normalized by the diameters of given marginals

    The cost is (d_X/D_X^(1/p) + d_Y/D_Y^(1/p))^p, where D_X and D_Y
    are the diameters of mu and nu with respect to d_X^p and d_Y^p.
    Equivalently, it is the additive cost at alpha = isometric_alpha()
    divided by D_Y. Both diameters are computed once on construction.
    """
    family = 'normalized_isometric'

    def __init__(self, mu, nu, p=1., metric_x='euclidean', metric_y='euclidean'):
        self.diam_x = diameter(mu, MarginalCost(metric_x, p))
        self.diam_y = diameter(nu, MarginalCost(metric_y, p))
        if self.diam_x <= 0:
            raise DegenerateMeasureError("X-marginal has zero diameter")
        if self.diam_y <= 0:
            raise DegenerateMeasureError("Y-marginal has zero diameter")
        alpha = (self.diam_y/self.diam_x)**(1./p)
        super(IsometricCost, self).__init__(alpha, p, 1., metric_x, metric_y)

    def combine(self, dist_x, dist_y):
        return super(IsometricCost, self).combine(dist_x, dist_y)/self.diam_y

    @property
    def marginal_x(self):
        return MarginalCost(self.metric_x, self.p, 1./self.diam_x)

    @property
    def marginal_y(self):
        return MarginalCost(self.metric_y, self.p, 1./self.diam_y)


def eval_cost(spec, z1, z2):
    """Cost between the points z1 = (x1, y1) and z2 = (x2, y2)"""
    (x1, y1), (x2, y2) = z1, z2
    return float(spec.paired(np.atleast_1d(x1)[None, :], np.atleast_1d(y1)[None, :],
                             np.atleast_1d(x2)[None, :], np.atleast_1d(y2)[None, :])[0])


def isometric_alpha(mu, nu, p=1., metric_x='euclidean', metric_y='euclidean'):
    """Scale alpha_* = (diam_{d_Y^p} nu / diam_{d_X^p} mu)^(1/p)

    Returns 0 if nu has zero diameter; callers must reject this case.
    """
    diam_x = diameter(mu, MarginalCost(metric_x, p))
    if diam_x <= 0:
        raise DegenerateMeasureError("X-marginal has zero diameter")
    diam_y = diameter(nu, MarginalCost(metric_y, p))
    return (diam_y/diam_x)**(1./p)


class ArrayCost(object):
    """Cost evaluator for an explicitly given cost matrix"""
    def __init__(self, matrix):
        matrix = np.array(matrix, dtype=float, ndmin=2)
        if matrix.ndim != 2:
            raise ValueError("cost matrix must be two-dimensional")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("cost matrix must be finite")
        self.matrix = matrix

    @property
    def shape(self):
        return self.matrix.shape

    def dense(self):
        """The full cost matrix"""
        return self.matrix

    def blocks(self):
        """Iterate over (start, stop, block) for row blocks of the matrix"""
        yield 0, self.shape[0], self.matrix

    def entries(self, rows, cols):
        """Costs at the index pairs (rows[k], cols[k])"""
        return self.matrix[rows, cols]

    def restrict(self, rows, cols):
        """Evaluator for the submatrix of the given rows and columns"""
        return ArrayCost(self.matrix[np.ix_(rows, cols)])

    def max(self):
        return float(self.matrix.max())


class PairwiseCost(object):
    """Lazy cost evaluator between the atoms of two joint measures

    src and dst are JointDiscreteMeasure's or (x_points, y_points)
    pairs. Rows of the cost matrix are evaluated in blocks of at most
    BLOCK_ENTRIES entries. dense() materializes the full matrix once
    and keeps it for subsequent calls, as long as the matrix fits into
    max_entries.
    """
    def __init__(self, spec, src, dst, max_entries=None):
        self.spec = spec
        self.src = self._arrays(src)
        self.dst = self._arrays(dst)
        self.max_entries = MAX_ENTRIES if max_entries is None else max_entries
        self._dense = None

    @staticmethod
    def _arrays(measure):
        if hasattr(measure, 'x_points'):
            return measure.x_points, measure.y_points
        x_points, y_points = measure
        return np.atleast_2d(x_points), np.atleast_2d(y_points)

    @property
    def shape(self):
        return len(self.src[0]), len(self.dst[0])

    def dense(self):
        """The full cost matrix, subject to the entry budget"""
        if self._dense is None:
            rows, cols = self.shape
            if rows*cols > self.max_entries:
                raise CapacityError("cost matrix of %dx%d entries exceeds the budget of %d"
                                    % (rows, cols, self.max_entries))
            self._dense = self.spec.pairwise(self.src[0], self.src[1],
                                             self.dst[0], self.dst[1])
        return self._dense

    def blocks(self):
        """Iterate over (start, stop, block) for row blocks of the matrix"""
        if self._dense is not None:
            yield 0, self.shape[0], self._dense
            return
        rows, cols = self.shape
        step = max(1, BLOCK_ENTRIES // max(cols, 1))
        for start in range(0, rows, step):
            stop = min(start+step, rows)
            yield start, stop, self.spec.pairwise(
                self.src[0][start:stop], self.src[1][start:stop],
                self.dst[0], self.dst[1])

    def entries(self, rows, cols):
        """Costs at the index pairs (rows[k], cols[k])"""
        if self._dense is not None:
            return self._dense[rows, cols]
        return self.spec.paired(self.src[0][rows], self.src[1][rows],
                                self.dst[0][cols], self.dst[1][cols])

    def restrict(self, rows, cols):
        """Evaluator for the given subsets of source and destination atoms"""
        return PairwiseCost(self.spec,
                            (self.src[0][rows], self.src[1][rows]),
                            (self.dst[0][cols], self.dst[1][cols]),
                            self.max_entries)

    def max(self):
        return max(float(block.max()) for _, _, block in self.blocks())


def as_evaluator(cost):
    """Wrap plain matrices into ArrayCost, pass evaluators through"""
    if hasattr(cost, 'blocks'):
        return cost
    return ArrayCost(cost)


def cost_matrix(spec, src, dst, max_entries=None):
    """Dense matrix of spec-costs between the atoms of src and dst"""
    return PairwiseCost(spec, src, dst, max_entries).dense()


def uniform_deviation(cost1, cost2, src, dst):
    """Uniform relative deviation of two costs on the atom pairs of src x dst

    Returns max(|c1/c2 - 1|, |c2/c1 - 1|) over all pairs, where 0/0
    counts as 1. A pair on which only one cost vanishes yields inf.
    """
    matrix1 = cost_matrix(cost1, src, dst)
    matrix2 = cost_matrix(cost2, src, dst)
    both = (matrix1 == 0) & (matrix2 == 0)
    one = (matrix1 == 0) ^ (matrix2 == 0)
    if np.any(one):
        return float('inf')
    regular = ~both
    if not np.any(regular):
        return 0.
    ratio = matrix1[regular]/matrix2[regular]
    return float(max(np.abs(ratio-1.).max(), np.abs(1./ratio-1.).max()))
