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

"""Closed-form dependency values of Gaussian couplings

For a Gaussian gamma = N(m, Sigma) on R^r x R^q and the squared
Euclidean cost, the transport dependency is the squared 2-Wasserstein
distance between gamma and the Gaussian with block-diagonal covariance
diag(Sigma11, Sigma22),

    tau = 2 tr Sigma11 + 2 tr Sigma22 - 2 tr sqrt(M),
    M = [[Sigma11 Sigma11, Sigma11 Sigma12], [Sigma22 Sigma21, Sigma22 Sigma22]].

M is similar to a positive semi-definite matrix but not symmetric in
general. matrix_sqrt computes its square root with a scaled
Denman-Beavers iteration and falls back to the Schur method of scipy.

The bivariate specializations, the limit alpha -> oo of the weighted
cost alpha |dx|^2 + |dy|^2, mutual information and distance
covariance serve as ground truth for the sample based estimators.
"""

import logging
from math import asin, log, pi, sqrt

import numpy as np

from ._utils import clamp
from .errors import ConvergenceError
from .measures import JointDiscreteMeasure


class GaussianSpec(object):
    """Gaussian distribution on R^r x R^q given by covariance blocks"""
    def __init__(self, sigma11, sigma12, sigma22, mean=None):
        self.sigma11 = np.atleast_2d(np.asarray(sigma11, dtype=float))
        self.sigma22 = np.atleast_2d(np.asarray(sigma22, dtype=float))
        r, q = len(self.sigma11), len(self.sigma22)
        if self.sigma11.shape != (r, r) or self.sigma22.shape != (q, q):
            raise ValueError("sigma11 and sigma22 must be square")
        self.sigma12 = np.reshape(np.asarray(sigma12, dtype=float), (r, q))
        self.mean = np.zeros(r+q) if mean is None else np.asarray(mean, dtype=float).ravel()
        if len(self.mean) != r+q:
            raise ValueError("mean must have dimension %d" % (r+q))
        cov = self.covariance
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12):
            raise ValueError("covariance must be symmetric")
        if np.linalg.eigvalsh(cov).min() < -1e-10:
            raise ValueError("covariance must be positive semi-definite")

    @classmethod
    def bivariate(cls, sigma1, sigma2, rho):
        """Bivariate normal with standard deviations sigma1, sigma2 and correlation rho"""
        if sigma1 <= 0 or sigma2 <= 0:
            raise ValueError("standard deviations must be positive")
        if abs(rho) > 1:
            raise ValueError("rho must lie in [-1, 1]")
        return cls([[sigma1**2]], [[rho*sigma1*sigma2]], [[sigma2**2]])

    @property
    def r(self):
        return len(self.sigma11)

    @property
    def q(self):
        return len(self.sigma22)

    @property
    def covariance(self):
        """Full covariance matrix"""
        return np.block([[self.sigma11, self.sigma12], [self.sigma12.T, self.sigma22]])

    def weighted(self, alpha):
        """Distribution of (sqrt(alpha) x, y)"""
        if not alpha > 0:
            raise ValueError("alpha must be positive")
        mean = np.concatenate((sqrt(alpha)*self.mean[:self.r], self.mean[self.r:]))
        return GaussianSpec(alpha*self.sigma11, sqrt(alpha)*self.sigma12, self.sigma22, mean)

    def sample(self, n, seed=None):
        """Empirical measure of n independent draws"""
        rng = np.random.default_rng(seed)
        points = rng.multivariate_normal(self.mean, self.covariance, size=n, method='eigh')
        return JointDiscreteMeasure(points[:, :self.r], points[:, self.r:])

    def __repr__(self):
        return '<%s on R^%d x R^%d>' % (type(self).__name__, self.r, self.q)


def _residual(root, matrix):
    return np.linalg.norm(root.dot(root) - matrix)


def _denman_beavers(matrix, tol, max_iter):
    """Scaled Denman-Beavers iteration for the principal square root"""
    dim = len(matrix)
    norm = np.linalg.norm(matrix)
    y, z = matrix.copy(), np.eye(dim)
    scaling = True
    for _ in range(max_iter):
        if _residual(y, matrix) <= tol*norm:
            return y
        sign_y, logdet_y = np.linalg.slogdet(y)
        sign_z, logdet_z = np.linalg.slogdet(z)
        if sign_y == 0 or sign_z == 0:
            raise np.linalg.LinAlgError("singular iterate")
        mu = np.exp(-(logdet_y+logdet_z)/(2.*dim)) if scaling else 1.
        y_inv, z_inv = np.linalg.inv(y), np.linalg.inv(z)
        y_next = .5*(mu*y + z_inv/mu)
        z = .5*(mu*z + y_inv/mu)
        scaling = np.linalg.norm(y_next - y) > 1e-2*np.linalg.norm(y_next)
        y = y_next
        if not np.all(np.isfinite(y)):
            raise np.linalg.LinAlgError("iteration diverged")
    raise ConvergenceError("Denman-Beavers iteration did not converge",
                           _residual(y, matrix)/norm)


def matrix_sqrt(matrix, tol=1e-9, max_iter=100):
    """Real square root S of a matrix with ||S S - M|| <= tol ||M||

    Tries the scaled Denman-Beavers iteration first and falls back to
    scipy.linalg.sqrtm (Schur method) for singular or ill-conditioned
    matrices. Raises ConvergenceError if neither meets the tolerance.
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    norm = np.linalg.norm(matrix)
    if norm == 0:
        return np.zeros_like(matrix)
    try:
        return _denman_beavers(matrix, tol, max_iter)
    except (np.linalg.LinAlgError, ConvergenceError) as exc:
        logging.debug("falling back to Schur square root: %s", exc)
    from scipy.linalg import sqrtm
    root = np.real(sqrtm(matrix))
    residual = _residual(root, matrix)/norm
    if residual > tol:
        raise ConvergenceError("matrix square root did not converge", residual)
    return root


def gauss_tdep(spec):
    """Transport dependency of a Gaussian under the squared Euclidean cost"""
    s11, s12, s22 = spec.sigma11, spec.sigma12, spec.sigma22
    block = np.block([[s11.dot(s11), s11.dot(s12)], [s22.dot(s12.T), s22.dot(s22)]])
    root = matrix_sqrt(block)
    value = 2.*np.trace(s11) + 2.*np.trace(s22) - 2.*np.trace(root)
    scale = max(np.trace(s11) + np.trace(s22), 1.)
    return clamp(float(value), 0., below=1e-9*scale, name='Gaussian transport dependency')


def gauss_tdep_bivariate(sigma1, sigma2, rho):
    """Transport dependency of a bivariate normal under the squared Euclidean cost"""
    if sigma1 <= 0 or sigma2 <= 0:
        raise ValueError("standard deviations must be positive")
    if abs(rho) > 1:
        raise ValueError("rho must lie in [-1, 1]")
    s1, s2 = sigma1**2, sigma2**2
    value = 2.*(s1 + s2 - sqrt(s1*s1 + s2*s2 + 2.*s1*s2*sqrt(1.-rho*rho)))
    return max(value, 0.)


def gauss_marginal_tdep_bivariate(sigma2, rho):
    """Limit of the weighted transport dependency for alpha -> oo"""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    if abs(rho) > 1:
        raise ValueError("rho must lie in [-1, 1]")
    return 2.*sigma2**2*(1.-sqrt(1.-rho*rho))


def gauss_mutual_info(rho):
    """Mutual information -log(1-rho^2)/2 of a bivariate normal"""
    if abs(rho) >= 1:
        raise ValueError("mutual information diverges for |rho| = 1")
    return -.5*log(1.-rho*rho)


def gauss_dcov2_bivariate(sigma, rho):
    """Squared distance covariance of a bivariate normal with equal variances sigma^2"""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if abs(rho) > 1:
        raise ValueError("rho must lie in [-1, 1]")
    value = (rho*asin(rho) + sqrt(1.-rho*rho) - rho*asin(rho/2.)
             - sqrt(4.-rho*rho) + 1.)
    return max(4.*sigma**2/pi*value, 0.)


def gauss_tdep_weighted(spec, alpha):
    """Transport dependency under the cost alpha |dx|^2 + |dy|^2"""
    return gauss_tdep(spec.weighted(alpha))
