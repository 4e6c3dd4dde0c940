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

"""Synthetic geometries and noise models

A Geometry is a joint law on R^r x R^q from which samples are drawn
with a numpy random generator. Functional geometries carry the
relation y = f(x) they are concentrated on. The one-dimensional
geometries live in the unit square:

    identity        y = x, x ~ Unif[0, 1]
    zigzag(n)       piecewise linear with n segments of slope +-n
    polynomial      y = 4x^3 - 6x^2 + 3x (maximal slope 3)
    sine(slope)     y = (1 + sin(2 slope x))/2 (maximal slope slope)
    circle          circle of radius 1/2 around (1/2, 1/2), uniform angle
    cross           both diagonals of the unit square with equal mass
    spiral          Archimedean spiral with two turns, uniform arc length
    pretzel         figure-eight x = (1 + sin t)/2, y = (1 + sin 2t)/2,
                    t ~ Unif[0, 2 pi)

and the higher-dimensional ones are

    sphere(r, q)          uniform on the unit sphere in R^(r+q)
    uniform_noise(r, q)   independent Unif[0, 1]^r and Unif[0, 1]^q
    linear_highdim(r, q)  x ~ Unif[0, 1]^r, y the first q coordinates of x

convex_contaminate replaces each atom with probability epsilon by an
independent draw from the product of the marginals, gaussian_noise
perturbs every coordinate by N(0, sigma^2). All samplers draw the base
sample first, so equal seeds give equal base samples.
"""

import abc
from math import pi

import numpy as np

from ._utils import with_metaclass
from .measures import JointDiscreteMeasure


class Geometry(with_metaclass(abc.ABCMeta, object)):
    """Joint law of (x, y) that can be sampled

    Implementations provide draw(n, rng), which returns arrays of
    shape (n, x_dim) and (n, y_dim). Functional geometries also
    override relation.
    """
    name = abc.abstractproperty()
    x_dim = 1
    y_dim = 1
    functional = False

    @abc.abstractmethod
    def draw(self, n, rng):
        """Arrays of n independent x and y coordinates"""

    def relation(self, x):
        """y-coordinates f(x) of a functional geometry"""
        raise ValueError("%s is not a functional geometry" % self.name)

    def sample(self, n, seed=None):
        """JointDiscreteMeasure of n independent draws"""
        if n < 1:
            raise ValueError("n must be positive")
        return JointDiscreteMeasure(*self.draw(n, np.random.default_rng(seed)))

    def draw_marginals(self, n, rng):
        """Arrays of n independent draws of the product of the marginals"""
        x, _ = self.draw(n, rng)
        _, y = self.draw(n, rng)
        return x, y

    def sample_marginals(self, n, seed=None):
        """JointDiscreteMeasure of n draws from the product of the marginals"""
        if n < 1:
            raise ValueError("n must be positive")
        return JointDiscreteMeasure(*self.draw_marginals(n, np.random.default_rng(seed)))

    def __eq__(self, other):
        return type(self) == type(other) and vars(self) == vars(other)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.name, tuple(sorted(vars(self).items()))))

    def __repr__(self):
        params = ', '.join('%s=%r' % item for item in sorted(vars(self).items()))
        return '%s(%s)' % (type(self).__name__, params)


class _Functional(Geometry):
    functional = True

    def draw(self, n, rng):
        x = rng.random((n, 1))
        return x, self.relation(x)


class Identity(_Functional):
    name = 'identity'

    def relation(self, x):
        return np.array(x, dtype=float)


class Zigzag(_Functional):
    """Zigzag function with the given number of segments

    Segment i covers [i/n, (i+1)/n] and runs upward for even i,
    downward for odd i. The image of Unif[0, 1] is Unif[0, 1].
    """
    name = 'zigzag'

    def __init__(self, segments=3):
        if int(segments) != segments or segments < 1:
            raise ValueError("segments must be a positive integer")
        self.segments = int(segments)

    def relation(self, x):
        scaled = self.segments*np.asarray(x, dtype=float)
        index = np.clip(np.floor(scaled), 0, self.segments-1)
        local = scaled - index
        return np.where(index % 2 == 0, local, 1.-local)


class Polynomial(_Functional):
    """Polynomial with coefficients in increasing order"""
    name = 'polynomial'

    def __init__(self, coefficients=(0., 3., -6., 4.)):
        self.coefficients = tuple(float(c) for c in coefficients)
        if not self.coefficients:
            raise ValueError("coefficients must not be empty")

    def relation(self, x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), self.coefficients)


class Sine(_Functional):
    name = 'sine'

    def __init__(self, slope=1.):
        if not slope > 0:
            raise ValueError("slope must be positive")
        self.slope = float(slope)

    def relation(self, x):
        return .5*(1.+np.sin(2.*self.slope*np.asarray(x, dtype=float)))


class Circle(Geometry):
    name = 'circle'

    def draw(self, n, rng):
        angle = 2*pi*rng.random(n)
        return .5*(1.+np.cos(angle))[:, None], .5*(1.+np.sin(angle))[:, None]


class Cross(Geometry):
    name = 'cross'

    def draw(self, n, rng):
        x = rng.random((n, 1))
        flip = rng.random((n, 1)) < .5
        return x, np.where(flip, 1.-x, x)


class Spiral(Geometry):
    """Archimedean spiral r = theta/(2 pi turns) sampled by arc length"""
    name = 'spiral'
    resolution = 4096

    def __init__(self, turns=2.):
        if not turns > 0:
            raise ValueError("turns must be positive")
        self.turns = float(turns)

    def _curve(self, theta):
        radius = theta/(2*pi*self.turns)
        return .5*(1.+radius*np.cos(theta)), .5*(1.+radius*np.sin(theta))

    def draw(self, n, rng):
        grid = np.linspace(0., 2*pi*self.turns, self.resolution)
        gx, gy = self._curve(grid)
        length = np.concatenate(([0.], np.cumsum(np.hypot(np.diff(gx), np.diff(gy)))))
        theta = np.interp(length[-1]*rng.random(n), length, grid)
        x, y = self._curve(theta)
        return x[:, None], y[:, None]


class Pretzel(Geometry):
    name = 'pretzel'

    def draw(self, n, rng):
        t = 2*pi*rng.random(n)
        return .5*(1.+np.sin(t))[:, None], .5*(1.+np.sin(2.*t))[:, None]


class _Dimensional(Geometry):
    def __init__(self, r=1, q=1):
        if int(r) != r or int(q) != q or r < 1 or q < 1:
            raise ValueError("r and q must be positive integers")
        self.r, self.q = int(r), int(q)

    @property
    def x_dim(self):
        return self.r

    @property
    def y_dim(self):
        return self.q


class Sphere(_Dimensional):
    name = 'sphere'

    def draw(self, n, rng):
        points = rng.standard_normal((n, self.r+self.q))
        points /= np.linalg.norm(points, axis=1)[:, None]
        return points[:, :self.r], points[:, self.r:]


class UniformNoise(_Dimensional):
    name = 'uniform_noise'

    def draw(self, n, rng):
        return rng.random((n, self.r)), rng.random((n, self.q))


class LinearHighDim(_Dimensional):
    """Uniform x on the unit cube with y its first q coordinates"""
    name = 'linear_highdim'
    functional = True

    def __init__(self, r=1, q=1):
        super(LinearHighDim, self).__init__(r, q)
        if self.q > self.r:
            raise ValueError("q must not exceed r")

    def relation(self, x):
        return np.array(np.asarray(x, dtype=float)[:, :self.q])

    def draw(self, n, rng):
        x = rng.random((n, self.r))
        return x, self.relation(x)


GEOMETRIES = dict((cls.name, cls) for cls in (
    Identity, Zigzag, Polynomial, Sine, Circle, Cross, Spiral, Pretzel,
    Sphere, UniformNoise, LinearHighDim))


def geometry(name, **params):
    """Geometry of the given kind, e.g. geometry('zigzag', segments=5)"""
    try:
        cls = GEOMETRIES[name]
    except KeyError:
        raise ValueError("geometry must be one of %s" % ', '.join(sorted(GEOMETRIES)))
    return cls(**params)


def _as_geometry(spec):
    return geometry(spec) if isinstance(spec, str) else spec


def sample_geometry(spec, n, seed=None):
    """n independent draws of a Geometry (or geometry name)"""
    return _as_geometry(spec).sample(n, seed)


def convex_contaminate(spec, epsilon, n, seed=None):
    """Sample of (1-epsilon) gamma + epsilon (mu x nu)

    Each atom is independently replaced with probability epsilon by a
    draw from the product of the marginals of gamma.
    """
    if not 0 <= epsilon <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    if n < 1:
        raise ValueError("n must be positive")
    spec = _as_geometry(spec)
    rng = np.random.default_rng(seed)
    x, y = spec.draw(n, rng)
    if epsilon > 0:
        noisy = rng.random(n) < epsilon
        noise_x, noise_y = spec.draw_marginals(n, rng)
        x = np.where(noisy[:, None], noise_x, x)
        y = np.where(noisy[:, None], noise_y, y)
    return JointDiscreteMeasure(x, y)


def gaussian_noise(spec, sigma, n, seed=None):
    """Sample of gamma convolved with N(0, sigma^2 Id)"""
    if not sigma >= 0:
        raise ValueError("sigma must be non-negative")
    if n < 1:
        raise ValueError("n must be positive")
    spec = _as_geometry(spec)
    rng = np.random.default_rng(seed)
    x, y = spec.draw(n, rng)
    if sigma > 0:
        x = x + rng.normal(scale=sigma, size=x.shape)
        y = y + rng.normal(scale=sigma, size=y.shape)
    return JointDiscreteMeasure(x, y)
