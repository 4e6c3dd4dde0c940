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

"""Discrete probability measures

This module provides the measure-theoretic substrate of tdep.
DiscreteMeasure holds weighted atoms in R^d and JointDiscreteMeasure
holds weighted pairs (x, y) in R^r x R^q, e.g. the empirical measure
of a sample. Both are immutable: their coordinate and weight arrays
are read-only, and all operations return new measures.

Atoms are never merged implicitly. Duplicates simply split their
weight, which keeps empirical-measure semantics and atom order intact.
Use coalesce() where merged atoms are required.

The module level functions construct products, mixtures, convolutions
and push-forwards of measures, and compute c-diameters. Products and
convolutions are checked against the atom budget MAX_ATOMS and raise
CapacityError when the budget is exceeded.
"""

import numpy as np

from .errors import CapacityError

#: default atom budget of product() and convolve()
MAX_ATOMS = 10**6

#: weights summing to one within this tolerance are renormalized
WEIGHT_TOLERANCE = 1e-9


def _as_points(points, name='points'):
    arr = np.array(points, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError("%s must be a sequence of vectors" % name)
    if not len(arr):
        raise ValueError("%s must not be empty" % name)
    if not arr.shape[1]:
        raise ValueError("%s must have dimension at least one" % name)
    if not np.all(np.isfinite(arr)):
        raise ValueError("%s must have finite coordinates" % name)
    # canonicalize negative zero
    arr += 0.
    arr.flags.writeable = False
    return arr


def _as_weights(weights, size):
    if weights is None:
        weights = np.full(size, 1./size)
    else:
        weights = np.array(weights, dtype=float).ravel()
    if len(weights) != size:
        raise ValueError("weights must have one entry per atom")
    if not np.all(np.isfinite(weights)) or np.any(weights < 0):
        raise ValueError("weights must be finite and non-negative")
    total = weights.sum()
    if abs(total-1.) > WEIGHT_TOLERANCE:
        raise ValueError("weights must sum to one (got %r)" % total)
    weights = weights/total
    weights.flags.writeable = False
    return weights


def _check_budget(size, max_atoms, what):
    budget = MAX_ATOMS if max_atoms is None else max_atoms
    if size > budget:
        raise CapacityError("%s of %d atoms exceeds the budget of %d atoms"
                            % (what, size, budget))


class DiscreteMeasure(object):
    """Probability measure with finitely many weighted atoms in R^d

    points is a sequence of n coordinate vectors of common dimension d
    (a flat sequence of numbers is read as n atoms in R^1), weights a
    sequence of n non-negative reals that sum to one. If weights are
    omitted, atoms are weighted uniformly.
    """
    def __init__(self, points, weights=None):
        self.points = _as_points(points)
        self.weights = _as_weights(weights, len(self.points))

    @classmethod
    def point_mass(cls, point):
        """Dirac measure at the given point"""
        return cls(np.atleast_1d(np.asarray(point, dtype=float))[None, :])

    @property
    def dim(self):
        """Dimension of the ground space"""
        return self.points.shape[1]

    @property
    def size(self):
        """Number of atoms"""
        return len(self.points)

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return (isinstance(other, DiscreteMeasure)
                and self.points.shape == other.points.shape
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.weights, other.weights))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return '<%s with %d atoms in R^%d>' % (type(self).__name__, self.size, self.dim)

    def coalesce(self):
        """Merge atoms at identical coordinates

        Returns a new measure whose atoms are the distinct points of
        self in lexicographic order, each carrying the total weight of
        its duplicates.
        """
        unique, inverse = np.unique(self.points, axis=0, return_inverse=True)
        weights = np.bincount(inverse.reshape(-1), weights=self.weights,
                              minlength=len(unique))
        return DiscreteMeasure(unique, weights)


class JointDiscreteMeasure(object):
    """Probability measure with finitely many weighted atoms in R^r x R^q

    Atom i is the pair (x_points[i], y_points[i]) with weight weights[i].
    Uniform weights are used if weights are omitted.
    """
    def __init__(self, x_points, y_points, weights=None):
        self.x_points = _as_points(x_points, 'x_points')
        self.y_points = _as_points(y_points, 'y_points')
        if len(self.x_points) != len(self.y_points):
            raise ValueError("x_points and y_points must have equal length")
        self.weights = _as_weights(weights, len(self.x_points))

    @property
    def x_dim(self):
        """Dimension r of the X component"""
        return self.x_points.shape[1]

    @property
    def y_dim(self):
        """Dimension q of the Y component"""
        return self.y_points.shape[1]

    @property
    def size(self):
        """Number of atoms"""
        return len(self.x_points)

    def __len__(self):
        return len(self.x_points)

    @property
    def points(self):
        """Atoms as concatenated vectors in R^(r+q)"""
        return np.hstack((self.x_points, self.y_points))

    def as_measure(self):
        """View self as a DiscreteMeasure on R^(r+q)"""
        return DiscreteMeasure(self.points, self.weights)

    def marginals(self):
        """Return the pair (mu, nu) of marginal measures

        Atoms are projected but not merged, so both marginals have as
        many atoms as self, with identical weights.
        """
        return (DiscreteMeasure(self.x_points, self.weights),
                DiscreteMeasure(self.y_points, self.weights))

    def swap(self):
        """Exchange the roles of X and Y"""
        return JointDiscreteMeasure(self.y_points, self.x_points, self.weights)

    def permute_y(self, permutation):
        """Re-pair atoms as (x_i, y_permutation[i]) with weights unchanged"""
        permutation = np.asarray(permutation)
        if sorted(permutation.tolist()) != list(range(self.size)):
            raise ValueError("permutation must be a permutation of range(%d)" % self.size)
        return JointDiscreteMeasure(self.x_points, self.y_points[permutation], self.weights)

    def coalesce(self):
        """Merge atoms whose (x, y) coordinates coincide"""
        merged = self.as_measure().coalesce()
        return JointDiscreteMeasure(merged.points[:, :self.x_dim],
                                    merged.points[:, self.x_dim:],
                                    merged.weights)

    def __eq__(self, other):
        return (isinstance(other, JointDiscreteMeasure)
                and self.x_points.shape == other.x_points.shape
                and self.y_points.shape == other.y_points.shape
                and np.array_equal(self.x_points, other.x_points)
                and np.array_equal(self.y_points, other.y_points)
                and np.array_equal(self.weights, other.weights))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return '<%s with %d atoms in R^%d x R^%d>' % (
            type(self).__name__, self.size, self.x_dim, self.y_dim)


class AffineMap(object):
    """Affine map z -> A z + b on R^d

    Either matrix or shift may be omitted (identity matrix or zero
    shift respectively). If both are omitted, dim must be given.
    """
    def __init__(self, matrix=None, shift=None, dim=None):
        if matrix is not None:
            matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
            if matrix.shape[0] != matrix.shape[1]:
                raise ValueError("matrix must be square")
            dim = matrix.shape[0]
        if shift is not None:
            shift = np.atleast_1d(np.asarray(shift, dtype=float))
            if dim is not None and len(shift) != dim:
                raise ValueError("shift must have dimension %d" % dim)
            dim = len(shift)
        if dim is None:
            raise ValueError("dim must be given for the identity map")
        self.dim = dim
        self.matrix = np.eye(dim) if matrix is None else matrix
        self.shift = np.zeros(dim) if shift is None else shift

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.dim:
            raise ValueError("points must have dimension %d" % self.dim)
        return points.dot(self.matrix.T) + self.shift


def from_samples(rows):
    """Empirical measure of a sequence of (x, y) samples

    x and y may be scalars or vectors. Atoms keep the input order and
    carry uniform weights; duplicate rows are not merged.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("samples must not be empty")
    xs = [np.atleast_1d(np.asarray(x, dtype=float)) for x, _ in rows]
    ys = [np.atleast_1d(np.asarray(y, dtype=float)) for _, y in rows]
    if any(x.shape != xs[0].shape or x.ndim != 1 for x in xs):
        raise ValueError("x components of all samples must have equal dimension")
    if any(y.shape != ys[0].shape or y.ndim != 1 for y in ys):
        raise ValueError("y components of all samples must have equal dimension")
    return JointDiscreteMeasure(np.vstack(xs), np.vstack(ys))


def marginals(gamma):
    """Return the marginal measures (mu, nu) of gamma"""
    return gamma.marginals()


def product(mu, nu, max_atoms=None, coalesce=False):
    """Product measure mu x nu

    Atom i*len(nu)+j of the result is (mu.points[i], nu.points[j])
    with weight mu.weights[i]*nu.weights[j]. If coalesce is True,
    duplicate atoms of mu and nu are merged first.
    """
    if coalesce:
        mu, nu = mu.coalesce(), nu.coalesce()
    _check_budget(len(mu)*len(nu), max_atoms, "product")
    return JointDiscreteMeasure(np.repeat(mu.points, len(nu), axis=0),
                                np.tile(nu.points, (len(mu), 1)),
                                np.outer(mu.weights, nu.weights).ravel())


def mixture(gamma0, gamma1, t):
    """Convex combination (1-t) gamma0 + t gamma1"""
    if not 0. <= t <= 1.:
        raise ValueError("t must lie in [0, 1]")
    if gamma0.x_dim != gamma1.x_dim or gamma0.y_dim != gamma1.y_dim:
        raise ValueError("mixed measures must have equal dimensions")
    if t == 0:
        return gamma0
    if t == 1:
        return gamma1
    return JointDiscreteMeasure(
        np.vstack((gamma0.x_points, gamma1.x_points)),
        np.vstack((gamma0.y_points, gamma1.y_points)),
        np.concatenate(((1.-t)*gamma0.weights, t*gamma1.weights)))


def convolve(gamma, kernel_x, kernel_y, max_atoms=None):
    """Convolution of gamma with the product kernel kernel_x x kernel_y

    Atoms (x_i + a_j, y_i + b_k) are enumerated lexicographically in
    (i, j, k) with weights w_i u_j v_k.
    """
    if kernel_x.dim != gamma.x_dim:
        raise ValueError("kernel_x must have dimension %d" % gamma.x_dim)
    if kernel_y.dim != gamma.y_dim:
        raise ValueError("kernel_y must have dimension %d" % gamma.y_dim)
    n, nx, ny = len(gamma), len(kernel_x), len(kernel_y)
    _check_budget(n*nx*ny, max_atoms, "convolution")
    shape = (n, nx, ny)
    x = gamma.x_points[:, None, None, :] + kernel_x.points[None, :, None, :]
    y = gamma.y_points[:, None, None, :] + kernel_y.points[None, None, :, :]
    x = np.broadcast_to(x, shape+(gamma.x_dim,)).reshape(-1, gamma.x_dim)
    y = np.broadcast_to(y, shape+(gamma.y_dim,)).reshape(-1, gamma.y_dim)
    weights = (gamma.weights[:, None, None]
               * kernel_x.weights[None, :, None]
               * kernel_y.weights[None, None, :])
    return JointDiscreteMeasure(x, y, weights.ravel())


def push_forward(gamma, f_x=None, f_y=None):
    """Image of gamma under (x, y) -> (f_x(x), f_y(y))

    f_x and f_y are AffineMap's or vectorized callables acting on
    arrays of row vectors. None stands for the identity.
    """
    x = gamma.x_points if f_x is None else f_x(gamma.x_points)
    y = gamma.y_points if f_y is None else f_y(gamma.y_points)
    if len(np.atleast_2d(x)) != len(gamma) or len(np.atleast_2d(y)) != len(gamma):
        raise ValueError("maps must act row-wise on the atoms")
    return JointDiscreteMeasure(x, y, gamma.weights)


def diameter(mu, cost):
    """c-diameter of mu, i.e. the expected cost between two independent draws

    cost must provide pairwise(a, b) returning the matrix of costs
    between the rows of a and b (see tdep.costs.MarginalCost).
    """
    if hasattr(mu, 'as_measure'):
        mu = mu.as_measure()
    matrix = cost.pairwise(mu.points, mu.points)
    return max(float(mu.weights.dot(matrix).dot(mu.weights)), 0.)


def read_csv(source, x_dim=1, y_dim=1):
    """Read an empirical measure from a CSV sample file

    The file has a single header row (x1,...,xr,y1,...,yq) followed by
    one sample per row. Raises ValueError on malformed content.
    """
    if x_dim < 1 or y_dim < 1:
        raise ValueError("x_dim and y_dim must be positive")
    data = np.loadtxt(source, delimiter=',', skiprows=1, ndmin=2)
    if not data.size:
        raise ValueError("sample file contains no samples")
    if data.shape[1] != x_dim+y_dim:
        raise ValueError("expected %d columns, found %d" % (x_dim+y_dim, data.shape[1]))
    return JointDiscreteMeasure(data[:, :x_dim], data[:, x_dim:])


def write_csv(gamma, target):
    """Write the atoms of gamma in CSV sample format (weights are not written)"""
    header = ','.join(['x%d' % (i+1) for i in range(gamma.x_dim)]
                      + ['y%d' % (i+1) for i in range(gamma.y_dim)])
    np.savetxt(target, gamma.points, delimiter=',', header=header,
               comments='', fmt='%.17g')
