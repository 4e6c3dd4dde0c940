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

"""Discrete optimal transport solvers

This module provides solvers for the discrete optimal transport
problem between weighted atoms. All solvers implement the
TransportSolver interface by subclassing this abstract base class.

NetworkSimplex solves the problem exactly with the network simplex
implementation of the POT library and certifies optimality with a
dual solution (Kantorovich potentials). ScaledSinkhorn solves a
sequence of entropically regularized problems with geometrically
decreasing regularization, in the log domain and on truncated (sparse)
kernels, then rounds the result to an exactly feasible plan.

Both solvers return a TransportPlan, a sparse list of (source index,
destination index, mass) entries together with the primal cost, and a
DualSolution. Costs are given as matrices or as lazy cost evaluators
from tdep.costs.

select_solver chooses the exact solver for problems with at most
EXACT_LIMIT cost entries and Sinkhorn for larger ones.
"""

import abc
import logging

import numpy as np

from ._utils import with_metaclass
from .costs import as_evaluator
from .errors import ConvergenceError, NumericalError

#: largest number of cost entries solved exactly by select_solver('auto')
EXACT_LIMIT = 4*10**6


def _weights(measure):
    weights = getattr(measure, 'weights', measure)
    weights = np.asarray(weights, dtype=float).ravel()
    if not len(weights):
        raise ValueError("weights must not be empty")
    if not np.all(np.isfinite(weights)) or np.any(weights < 0):
        raise ValueError("weights must be finite and non-negative")
    return weights


class TransportPlan(object):
    """Sparse coupling between two discrete measures

    Entry k of the plan moves masses[k] > 0 from source atom rows[k]
    to destination atom cols[k]. primal_cost is the total cost of the
    plan. It is recomputed from cost if not given explicitly.
    """
    def __init__(self, rows, cols, masses, src_size, dst_size,
                 primal_cost=None, cost=None):
        self.rows = np.asarray(rows, dtype=np.intp).ravel()
        self.cols = np.asarray(cols, dtype=np.intp).ravel()
        self.masses = np.asarray(masses, dtype=float).ravel()
        if not len(self.rows) == len(self.cols) == len(self.masses):
            raise ValueError("rows, cols and masses must have equal length")
        if np.any(self.masses <= 0):
            raise ValueError("plan masses must be positive")
        if len(self.rows) and (self.rows.min() < 0 or self.rows.max() >= src_size
                               or self.cols.min() < 0 or self.cols.max() >= dst_size):
            raise ValueError("plan indices out of range")
        self.src_size = src_size
        self.dst_size = dst_size
        if primal_cost is None and cost is not None:
            primal_cost = transport_cost(self, cost)
        self.primal_cost = primal_cost

    @classmethod
    def from_dense(cls, matrix, cost=None):
        """Plan with the positive entries of a dense coupling matrix"""
        matrix = np.asarray(matrix, dtype=float)
        rows, cols = np.nonzero(matrix > 0)
        return cls(rows, cols, matrix[rows, cols], matrix.shape[0], matrix.shape[1],
                   cost=cost)

    @property
    def entries(self):
        """List of (src_index, dst_index, mass) triples"""
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.masses.tolist()))

    def __len__(self):
        return len(self.masses)

    def __repr__(self):
        return '<%s %dx%d with %d entries, cost %r>' % (
            type(self).__name__, self.src_size, self.dst_size, len(self), self.primal_cost)

    def matrix(self):
        """Coupling as scipy.sparse.csr_matrix"""
        from scipy import sparse
        return sparse.coo_matrix((self.masses, (self.rows, self.cols)),
                                 shape=(self.src_size, self.dst_size)).tocsr()

    def row_sums(self):
        """Mass leaving each source atom"""
        return np.bincount(self.rows, weights=self.masses, minlength=self.src_size)

    def col_sums(self):
        """Mass arriving at each destination atom"""
        return np.bincount(self.cols, weights=self.masses, minlength=self.dst_size)

    def is_feasible(self, src, dst, tol=1e-9):
        """True if the plan couples src and dst within tol"""
        return (np.abs(self.row_sums()-_weights(src)).max() <= tol
                and np.abs(self.col_sums()-_weights(dst)).max() <= tol)


class DualSolution(object):
    """Pair of Kantorovich potentials (f, g) with f_i + g_j <= c_ij

    dual_value = sum_i a_i f_i + sum_j b_j g_j is a lower bound of the
    transport cost between the weights a and b.
    """
    def __init__(self, f, g, src, dst):
        self.f = np.asarray(f, dtype=float)
        self.g = np.asarray(g, dtype=float)
        self.dual_value = float(_weights(src).dot(self.f) + _weights(dst).dot(self.g))

    def violation(self, cost):
        """Largest excess max(f_i + g_j - c_ij, 0) over all pairs"""
        excess = 0.
        for start, stop, block in as_evaluator(cost).blocks():
            excess = max(excess, float((self.f[start:stop, None] + self.g[None, :] - block).max()))
        return excess

    def is_feasible(self, cost, tol=1e-7):
        return self.violation(cost) <= tol

    def __repr__(self):
        return '<%s value %r>' % (type(self).__name__, self.dual_value)


def transport_cost(plan, cost):
    """Recompute sum_k masses[k] * cost(rows[k], cols[k])"""
    if not len(plan):
        return 0.
    return float(np.dot(plan.masses, as_evaluator(cost).entries(plan.rows, plan.cols)))


def _c_transform_rows(cost, g):
    """f_i = min_j (c_ij - g_j)"""
    f = np.empty(cost.shape[0])
    for start, stop, block in cost.blocks():
        f[start:stop] = (block - g[None, :]).min(axis=1)
    return f


def _c_transform_cols(cost, f):
    """g_j = min_i (c_ij - f_i)"""
    g = np.full(cost.shape[1], np.inf)
    for start, stop, block in cost.blocks():
        g = np.minimum(g, (block - f[start:stop, None]).min(axis=0))
    return g


class TransportSolver(with_metaclass(abc.ABCMeta, object)):
    """Abstract base class for optimal transport solvers

    Concrete solvers implement _solve for strictly positive weights.
    TransportSolver.solve removes atoms of zero weight, delegates to
    _solve, and maps the result back to the original indices. The
    potentials of removed atoms are filled in by c-transforms so that
    the dual solution stays feasible.

    Class attributes define default options. They can be overwritten
    per instance by keyword arguments of the constructor.
    """
    name = None

    def __init__(self, **options):
        for key, value in options.items():
            if key.startswith('_') or not hasattr(type(self), key) or callable(getattr(type(self), key)):
                raise TypeError("%s got an unexpected option %r" % (type(self).__name__, key))
            setattr(self, key, value)

    def solve(self, src, dst, cost):
        """Solve the transport problem between src and dst

        src and dst are measures (anything with a weights attribute)
        or weight vectors, cost is a matrix or cost evaluator of shape
        (len(src), len(dst)). Returns a pair (TransportPlan, DualSolution).
        """
        src, dst = _weights(src), _weights(dst)
        cost = as_evaluator(cost)
        if cost.shape != (len(src), len(dst)):
            raise ValueError("cost must have shape (%d, %d)" % (len(src), len(dst)))
        if abs(src.sum()-dst.sum()) > 1e-9:
            raise ValueError("src and dst weights must have equal total mass")

        rows, cols = np.flatnonzero(src > 0), np.flatnonzero(dst > 0)
        complete = len(rows) == len(src) and len(cols) == len(dst)
        reduced = cost if complete else cost.restrict(rows, cols)
        plan, f, g = self._solve(src[rows], dst[cols], reduced)
        if not complete:
            plan = TransportPlan(rows[plan.rows], cols[plan.cols], plan.masses,
                                 len(src), len(dst), plan.primal_cost)
            f, g = self._extend_potentials(cost, rows, cols, f, g)
        return plan, DualSolution(f, g, src, dst)

    @staticmethod
    def _extend_potentials(cost, rows, cols, f_reduced, g_reduced):
        n, m = cost.shape
        f, g = np.zeros(n), np.zeros(m)
        f[rows], g[cols] = f_reduced, g_reduced
        missing_cols = np.setdiff1d(np.arange(m), cols)
        if len(missing_cols):
            g[missing_cols] = _c_transform_cols(cost.restrict(rows, missing_cols), f_reduced)
        missing_rows = np.setdiff1d(np.arange(n), rows)
        if len(missing_rows):
            f[missing_rows] = _c_transform_rows(cost.restrict(missing_rows, np.arange(m)), g)
        return f, g

    @abc.abstractmethod
    def _solve(self, src, dst, cost):
        """Solve for positive weights, return (plan, f, g)"""
        raise NotImplementedError


class NetworkSimplex(TransportSolver):
    """Exact solver based on the network simplex of POT (ot.emd)

    The dense cost matrix is materialized. After solving, the duality
    gap and dual feasibility are checked against tol; a failed
    certificate raises NumericalError.
    """
    name = 'exact'
    max_iter = 10**8
    tol = 1e-7

    def _solve(self, src, dst, cost):
        import ot
        matrix = np.ascontiguousarray(cost.dense(), dtype=np.float64)
        coupling, log = ot.emd(src, dst, matrix, numItermax=int(self.max_iter), log=True)
        if log.get('result_code', 1) != 1:
            raise ConvergenceError("network simplex did not reach optimality: %s"
                                   % log.get('warning'))
        coupling = np.asarray(coupling)
        rows, cols = np.nonzero(coupling > 0)
        masses = coupling[rows, cols]
        primal = float(np.dot(masses, matrix[rows, cols]))
        plan = TransportPlan(rows, cols, masses, len(src), len(dst), primal)

        f, g = np.asarray(log['u'], dtype=float), np.asarray(log['v'], dtype=float)
        dual = float(src.dot(f) + dst.dot(g))
        excess = float((f[:, None] + g[None, :] - matrix).max())
        if primal-dual > self.tol*(1.+abs(primal)) or excess > self.tol:
            raise NumericalError("optimality certificate failed: gap %g, dual excess %g"
                                 % (primal-dual, excess))
        logging.debug("network simplex: %dx%d, cost %r, gap %g",
                      len(src), len(dst), primal, primal-dual)
        return plan, f, g


def _segment_logsumexp(values, indptr):
    """log-sum-exp over consecutive, non-empty segments of values"""
    starts = indptr[:-1]
    maxima = np.maximum.reduceat(values, starts)
    shifted = np.exp(values - np.repeat(maxima, np.diff(indptr)))
    return maxima + np.log(np.add.reduceat(shifted, starts))


def _northwest_corner(src, dst):
    """Northwest corner coupling of two non-negative vectors of equal mass"""
    rows, cols, masses = [], [], []
    i = j = 0
    left, right = src[0], dst[0]
    while i < len(src) and j < len(dst):
        mass = min(left, right)
        if mass > 0:
            rows.append(i)
            cols.append(j)
            masses.append(mass)
        left -= mass
        right -= mass
        if left <= right:
            i += 1
            if i < len(src):
                left = src[i]
        else:
            j += 1
            if j < len(dst):
                right = dst[j]
    return np.array(rows, dtype=np.intp), np.array(cols, dtype=np.intp), np.array(masses)


class _Kernel(object):
    """Truncated support of the entropic plan in row- and column-major order"""
    def __init__(self, rows, cols, costs, shape):
        self.rows, self.cols, self.costs = rows, cols, costs
        self.row_ptr = np.concatenate(([0], np.cumsum(np.bincount(rows, minlength=shape[0]))))
        self.col_order = np.lexsort((rows, cols))
        self.col_ptr = np.concatenate(([0], np.cumsum(np.bincount(cols, minlength=shape[1]))))

    def __len__(self):
        return len(self.costs)

    def row_lse(self, values):
        return _segment_logsumexp(values, self.row_ptr)

    def col_lse(self, values):
        return _segment_logsumexp(values[self.col_order], self.col_ptr)


class ScaledSinkhorn(TransportSolver):
    """Entropic transport with regularization scaling and sparse kernels

    The regularization eps = eta * c_mean is decreased geometrically by
    `ratio` from eta_start to eta_end, where c_mean is the mean cost
    under the independent coupling of src and dst. Each stage
    warm-starts from the potentials of the previous one and runs
    log-domain Sinkhorn iterations on a truncated kernel: entries whose
    plan mass would fall below `prune` are dropped, and at most
    max_kernel entries are kept, the highest scoring ones of every row.
    Intermediate stages stop once the marginal violation (in total
    variation) drops below stage_tol or after max_iter iterations, the
    final stage uses tol and max_iter_final. After the final stage the
    kernel is truncated again with the final potentials; if its support
    changed, the final stage is repeated, at most `refine` times. If
    the final stage ends with a violation above tol but below accept, a
    warning is logged, above accept a ConvergenceError is raised.

    The final plan is pruned and rounded onto the transport polytope by
    row and column rescaling and a rank-one repair of the residual
    marginals. Residuals with a support larger than max_fill entries
    are repaired by a northwest corner coupling instead.

    The returned dual solution is the final potential f together with
    its c-transform, a feasible pair whose value bounds the optimal
    cost from below. Primal costs and kernel sizes of all stages are
    kept in history and kernel_sizes.
    """
    name = 'sinkhorn'
    eta_start = 1e-1
    eta_end = 1e-3
    ratio = .5
    max_iter = 500
    max_iter_final = 10000
    tol = 1e-7
    stage_tol = 1e-5
    accept = 1e-3
    prune = 1e-15
    max_kernel = 2**24
    refine = 2
    max_fill = 10**6

    def __init__(self, **options):
        super(ScaledSinkhorn, self).__init__(**options)
        if not 0 < self.eta_end <= self.eta_start:
            raise ValueError("eta_end must be positive and not exceed eta_start")
        if not 0 < self.ratio < 1:
            raise ValueError("ratio must lie in (0, 1)")
        if not 0 <= self.prune < 1:
            raise ValueError("prune must lie in [0, 1)")
        if self.max_iter < 1 or self.max_iter_final < 1:
            raise ValueError("max_iter and max_iter_final must be positive")
        if self.max_kernel < 1:
            raise ValueError("max_kernel must be positive")
        self.history = []
        self.kernel_sizes = []

    def schedule(self):
        """Regularization values eta of all stages"""
        etas = []
        eta = self.eta_start
        while eta > self.eta_end*(1.+1e-12):
            etas.append(eta)
            eta *= self.ratio
        etas.append(self.eta_end)
        return etas

    @staticmethod
    def mean_cost(src, dst, cost):
        """Mean cost under the independent coupling of src and dst"""
        return float(sum(src[start:stop].dot(block).dot(dst)
                         for start, stop, block in cost.blocks()))

    def _truncate(self, cost, f, g, eps):
        n, m = cost.shape
        threshold = eps*np.log(self.prune) if self.prune > 0 else -np.inf
        row_cap = max(1, int(self.max_kernel) // n)
        rows, cols, costs = [], [], []
        best = np.full(m, -np.inf)
        best_row = np.zeros(m, dtype=np.intp)
        best_cost = np.zeros(m)
        for start, stop, block in cost.blocks():
            score = f[start:stop, None] + g[None, :] - block
            keep = score >= threshold
            keep[np.arange(stop-start), score.argmax(axis=1)] = True
            if row_cap < m:
                over = np.flatnonzero(keep.sum(axis=1) > row_cap)
                if len(over):
                    top = np.argpartition(-score[over], row_cap-1, axis=1)[:, :row_cap]
                    keep[over] = False
                    keep[over[:, None], top] = True
            top = score.argmax(axis=0)
            top_score = score[top, np.arange(m)]
            better = top_score > best
            best[better] = top_score[better]
            best_row[better] = start + top[better]
            best_cost[better] = block[top[better], np.flatnonzero(better)]
            r, c = np.nonzero(keep)
            rows.append(r + start)
            cols.append(c)
            costs.append(block[r, c])
        rows = np.concatenate(rows + [best_row])
        cols = np.concatenate(cols + [np.arange(m)])
        costs = np.concatenate(costs + [best_cost])
        keys, unique = np.unique(rows*m + cols, return_index=True)
        return _Kernel(rows[unique], cols[unique], costs[unique], (n, m)), keys

    def _iterate(self, kernel, f, g, log_src, log_dst, src, eps, tol, max_iter):
        violation = np.inf
        for iteration in range(1, int(max_iter)+1):
            f = eps*log_src - eps*kernel.row_lse((g[kernel.cols] - kernel.costs)/eps)
            g = eps*log_dst - eps*kernel.col_lse((f[kernel.rows] - kernel.costs)/eps)
            mass = np.exp((f[kernel.rows] + g[kernel.cols] - kernel.costs)/eps)
            violation = .5*np.abs(np.bincount(kernel.rows, weights=mass,
                                              minlength=len(src)) - src).sum()
            if violation <= tol:
                break
        return f, g, mass, violation, iteration

    def _round(self, src, dst, rows, cols, masses, cost):
        n, m = len(src), len(dst)
        row_sums = np.bincount(rows, weights=masses, minlength=n)
        scale = np.minimum(1., src/np.where(row_sums > 0, row_sums, 1.))
        masses = masses*scale[rows]
        col_sums = np.bincount(cols, weights=masses, minlength=m)
        scale = np.minimum(1., dst/np.where(col_sums > 0, col_sums, 1.))
        masses = masses*scale[cols]

        err_src = np.maximum(src - np.bincount(rows, weights=masses, minlength=n), 0.)
        err_dst = np.maximum(dst - np.bincount(cols, weights=masses, minlength=m), 0.)
        total = err_src.sum()
        if total > 0 and err_dst.sum() > 0:
            err_rows, err_cols = np.flatnonzero(err_src), np.flatnonzero(err_dst)
            if len(err_rows)*len(err_cols) <= self.max_fill:
                extra_rows = np.repeat(err_rows, len(err_cols))
                extra_cols = np.tile(err_cols, len(err_rows))
                extra = np.outer(err_src[err_rows], err_dst[err_cols]).ravel()/total
            else:
                logging.debug("residual of %dx%d atoms repaired by northwest corner rule",
                              len(err_rows), len(err_cols))
                extra_rows, extra_cols, extra = _northwest_corner(
                    err_src[err_rows], err_dst[err_cols])
                extra_rows, extra_cols = err_rows[extra_rows], err_cols[extra_cols]
            keys, inverse = np.unique(np.concatenate((rows*m + cols, extra_rows*m + extra_cols)),
                                      return_inverse=True)
            masses = np.bincount(inverse.reshape(-1), weights=np.concatenate((masses, extra)))
            rows, cols = keys // m, keys % m
        positive = masses > 0
        rows, cols, masses = rows[positive], cols[positive], masses[positive]
        primal = float(np.dot(masses, cost.entries(rows, cols)))
        return TransportPlan(rows, cols, masses, n, m, primal)

    def _stage(self, cost, kernel, f, g, log_src, log_dst, src, eps, final):
        tol = self.tol if final else self.stage_tol
        max_iter = self.max_iter_final if final else self.max_iter
        f, g, mass, violation, iterations = self._iterate(
            kernel, f, g, log_src, log_dst, src, eps, tol, max_iter)
        self.history.append(float(np.dot(mass, kernel.costs)))
        self.kernel_sizes.append(len(kernel))
        logging.debug("sinkhorn stage %d (eps=%g): %d of %d entries, %d iterations, "
                      "violation %g, cost %r", len(self.history)-1, eps, len(kernel),
                      cost.shape[0]*cost.shape[1], iterations, violation, self.history[-1])
        return f, g, mass, violation

    def _solve(self, src, dst, cost):
        n, m = cost.shape
        self.history = []
        self.kernel_sizes = []
        scale = self.mean_cost(src, dst, cost)
        if scale <= 0:
            # all costs vanish: the independent coupling is optimal
            plan = TransportPlan(np.repeat(np.arange(n), m), np.tile(np.arange(m), n),
                                 np.outer(src, dst).ravel(), n, m, 0.)
            return plan, np.zeros(n), np.zeros(m)

        log_src, log_dst = np.log(src), np.log(dst)
        f, g = np.zeros(n), np.zeros(m)
        etas = self.schedule()
        for stage, eta in enumerate(etas):
            eps = eta*scale
            kernel, keys = self._truncate(cost, f, g, eps)
            f, g, mass, violation = self._stage(cost, kernel, f, g, log_src, log_dst, src,
                                                eps, stage == len(etas)-1)
        for _ in range(int(self.refine)):
            refined, refined_keys = self._truncate(cost, f, g, eps)
            if np.array_equal(refined_keys, keys):
                break
            kernel, keys = refined, refined_keys
            f, g, mass, violation = self._stage(cost, kernel, f, g, log_src, log_dst, src,
                                                eps, True)
        if violation > self.tol:
            if violation > self.accept:
                raise ConvergenceError("sinkhorn did not converge (violation %g)" % violation,
                                       violation)
            logging.warning("sinkhorn stopped at marginal violation %g", violation)

        keep = mass > self.prune
        plan = self._round(src, dst, kernel.rows[keep], kernel.cols[keep], mass[keep], cost)
        return plan, f, _c_transform_cols(cost, f)


SOLVERS = {
    NetworkSimplex.name: NetworkSimplex,
    ScaledSinkhorn.name: ScaledSinkhorn,
}


def select_solver(solver='auto', src_size=0, dst_size=0, **options):
    """Return a TransportSolver instance

    solver is a TransportSolver instance (returned as is), or one of
    'exact', 'sinkhorn' and 'auto'. 'auto' selects the exact solver if
    src_size*dst_size does not exceed EXACT_LIMIT.
    """
    if isinstance(solver, TransportSolver):
        return solver
    if solver == 'auto':
        solver = 'exact' if src_size*dst_size <= EXACT_LIMIT else 'sinkhorn'
        logging.debug("selected %s solver for %dx%d problem", solver, src_size, dst_size)
    if solver not in SOLVERS:
        raise ValueError("solver must be one of auto, %s" % ', '.join(sorted(SOLVERS)))
    return SOLVERS[solver](**options)


def solve_exact(src, dst, cost, **options):
    """Exact optimal plan and certifying dual solution"""
    return NetworkSimplex(**options).solve(src, dst, cost)


def solve_sinkhorn_scaled(src, dst, cost, eta_start=1e-1, eta_end=1e-3, prune=1e-15, **options):
    """Approximately optimal plan from scaled Sinkhorn iterations"""
    solver = ScaledSinkhorn(eta_start=eta_start, eta_end=eta_end, prune=prune, **options)
    return solver.solve(src, dst, cost)[0]
