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

"""Command line interface of tdep

    tdep compute   transport dependency and its bounds (JSON)
    tdep corr      a dependency coefficient (JSON)
    tdep test      permutation test of independence (JSON)
    tdep power     power curve over a noise grid (CSV)
    tdep gauss     closed-form Gaussian dependency curves (CSV)
    tdep synth     synthetic sample (CSV)

Data is read from a sample CSV file (--in) or drawn from a synthetic
geometry (--geometry). Randomized commands require --seed. Exit codes
are 0 on success, 1 on usage errors, 2 on unreadable or invalid data,
3 when an atom or entry budget is exceeded and 4 on numerical failures
(degenerate measures, non-convergence, drift).
"""

import argparse
import csv
import json
import logging
import sys
from contextlib import contextmanager
from math import sqrt

import numpy as np

from ._utils import parse_grid
from .algorithms import SOLVERS
from .coefficients import KINDS, CoefficientRequest
from .costs import METRICS, AdditiveCost, IsometricCost, MarginalCost, MinMarginalCost, RawPowerCost
from .dependency import transport_dependency
from .errors import CapacityError, ConvergenceError, DegenerateMeasureError, NumericalError
from .geometries import GEOMETRIES, convex_contaminate, gaussian_noise, geometry
from .measures import read_csv, write_csv
from .oracles import (GaussianSpec, gauss_dcov2_bivariate, gauss_marginal_tdep_bivariate,
                      gauss_mutual_info, gauss_tdep_bivariate, gauss_tdep_weighted)
from .permutation import NOISE_MODELS, permutation_test, power_curve

SCHEMA = 1

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CAPACITY = 3
EXIT_NUMERIC = 4


class InputError(Exception):
    """Raised when the input sample cannot be read"""


class ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that exits with EXIT_USAGE on errors"""
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '%s: error: %s\n' % (self.prog, message))


def _jsonable(value):
    if isinstance(value, dict):
        return dict((key, _jsonable(item)) for key, item in value.items())
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    return value


@contextmanager
def _output(path):
    if path in (None, '-'):
        yield sys.stdout
    else:
        with open(path, 'w') as stream:
            yield stream


def _dump_json(payload, path):
    with _output(path) as stream:
        json.dump(_jsonable(payload), stream, indent=2, sort_keys=True, allow_nan=False)
        stream.write('\n')


def _dump_csv(header, rows, path):
    with _output(path) as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)


def _geometry(args):
    params = {}
    for name in ('segments', 'slope', 'turns', 'r', 'q'):
        if getattr(args, name, None) is not None:
            params[name] = getattr(args, name)
    if getattr(args, 'coefficients', None):
        params['coefficients'] = [float(c) for c in args.coefficients.split(',')]
    return geometry(args.geometry, **params)


def _sample(args):
    if args.epsilon and args.sigma:
        raise ValueError("--epsilon and --sigma must not be combined")
    spec = _geometry(args)
    if args.sigma:
        return gaussian_noise(spec, args.sigma, args.n, args.seed)
    return convex_contaminate(spec, args.epsilon, args.n, args.seed)


def load_measure(args):
    """Joint measure from --in or from a seeded --geometry sample"""
    if args.input is not None:
        source = sys.stdin if args.input == '-' else args.input
        try:
            return read_csv(source, args.x_dim, args.y_dim)
        except (IOError, OSError, ValueError) as exc:
            raise InputError("could not read %s: %s" % (args.input, exc))
    if args.seed is None:
        raise ValueError("--seed is required with --geometry")
    return _sample(args)


def cost_from_args(args, gamma):
    """Cost specification selected by --cost and its parameters"""
    if args.cost == 'additive':
        alpha = 1. if args.alpha is None else args.alpha
        return AdditiveCost(alpha, args.p, args.beta_x, args.metric_x, args.metric_y)
    elif args.cost == 'raw':
        if args.metric_y != args.metric_x:
            raise ValueError("--cost raw takes a single metric: --metric-y must equal --metric-x")
        return RawPowerCost(args.p, args.metric_x)
    elif args.cost == 'min':
        return MinMarginalCost(MarginalCost(args.metric_x, args.p),
                               MarginalCost(args.metric_y, args.p))
    mu, nu = gamma.marginals()
    return IsometricCost(mu, nu, args.p, args.metric_x, args.metric_y)


def _request(args):
    return CoefficientRequest(args.coeff, args.alpha, args.p, args.metric_x, args.metric_y,
                              args.solver, getattr(args, 'tolerance', None))


def cmd_compute(args):
    """Transport dependency with bounds as JSON"""
    gamma = load_measure(args)
    cost = cost_from_args(args, gamma)
    result = transport_dependency(gamma, cost, args.solver, bounds=not args.no_bounds,
                                  coalesce=args.merge_atoms, tolerance=args.tolerance)
    payload = result.as_dict()
    payload.update(schema=SCHEMA, command='compute', n=len(gamma), cost=repr(cost))
    _dump_json(payload, args.out)


def cmd_corr(args):
    """Dependency coefficient as JSON"""
    gamma = load_measure(args)
    payload = _request(args).evaluate(gamma).as_dict()
    payload.update(schema=SCHEMA, command='corr')
    _dump_json(payload, args.out)


def cmd_test(args):
    """Permutation test report as JSON"""
    gamma = load_measure(args)
    permutation_seed = np.random.SeedSequence(args.seed).spawn(1)[0]
    report = permutation_test(gamma, _request(args), args.m, args.k, permutation_seed,
                              args.exclude_identity, args.level)
    payload = report.as_dict()
    payload.update(schema=SCHEMA, command='test', coefficient=args.coeff, n=len(gamma),
                   seed=args.seed)
    _dump_json(payload, args.out)


def cmd_power(args):
    """Power over a noise grid as CSV rows (noise level, power)"""
    if args.noise == 'convex':
        label, grid = 'epsilon', parse_grid(args.eps_grid)
    else:
        label, grid = 'sigma', parse_grid(args.sigma_grid)
    curve = power_curve(_geometry(args), grid, _request(args), args.runs, args.n,
                        args.m, args.k, args.seed, args.noise, args.workers,
                        args.exclude_identity)
    _dump_csv((label, 'power'), curve, args.out)


def cmd_gauss(args):
    """Closed-form dependency measures of bivariate normals as CSV"""
    sigma1, sigma2 = args.sigma1, args.sigma2

    def tdep(rho):
        if args.alpha is None:
            return gauss_tdep_bivariate(sigma1, sigma2, rho)
        return gauss_tdep_weighted(GaussianSpec.bivariate(sigma1, sigma2, rho), args.alpha)

    def mutual_info(rho):
        try:
            return gauss_mutual_info(rho)
        except ValueError:
            return float('inf')

    scale = sqrt(sigma1*sigma2)
    top = (tdep(1.), gauss_marginal_tdep_bivariate(sigma2, 1.), gauss_dcov2_bivariate(scale, 1.))
    rows = []
    for rho in parse_grid(args.rho_grid):
        if abs(rho) > 1:
            raise ValueError("rho grid must lie in [-1, 1]")
        values = (tdep(rho), gauss_marginal_tdep_bivariate(sigma2, rho),
                  gauss_dcov2_bivariate(scale, rho))
        rows.append((rho, rho*rho) + values + (mutual_info(rho),)
                    + tuple(value/norm for value, norm in zip(values, top)))
    _dump_csv(('rho', 'rho2', 'tdep', 'marginal_tdep', 'dcov2', 'mutual_info',
               'tdep_relative', 'marginal_tdep_relative', 'dcov2_relative'), rows, args.out)


def cmd_synth(args):
    """Synthetic sample in CSV sample format"""
    gamma = _sample(args)
    with _output(args.out) as stream:
        write_csv(gamma, stream)


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _add_geometry_arguments(parser, group=None, required=False):
    (group or parser).add_argument('--geometry', choices=sorted(GEOMETRIES), required=required,
                                   help='synthetic geometry to sample from')
    parser.add_argument('--segments', type=_positive_int, help='segments of zigzag')
    parser.add_argument('--slope', type=float, help='maximal slope of sine')
    parser.add_argument('--coefficients', help='comma separated coefficients of polynomial')
    parser.add_argument('--turns', type=float, help='turns of spiral')
    parser.add_argument('--r', type=_positive_int, help='x-dimension of higher-dimensional geometries')
    parser.add_argument('--q', type=_positive_int, help='y-dimension of higher-dimensional geometries')
    parser.add_argument('--n', type=_positive_int, default=50, help='sample size')


def _add_sample_arguments(parser, group=None, required=False):
    _add_geometry_arguments(parser, group, required)
    parser.add_argument('--epsilon', type=float, default=0.,
                        help='convex contamination level of the sample')
    parser.add_argument('--sigma', type=float, default=0.,
                        help='standard deviation of Gaussian noise on the sample')


def _add_input_arguments(parser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument('--in', dest='input', metavar='PATH', help="sample CSV file ('-' for stdin)")
    _add_sample_arguments(parser, group)
    parser.add_argument('--x-dim', type=_positive_int, default=1, help='number of x columns')
    parser.add_argument('--y-dim', type=_positive_int, default=1, help='number of y columns')


def _add_metric_arguments(parser):
    parser.add_argument('--p', type=float, default=1., help='cost exponent')
    parser.add_argument('--metric-x', choices=sorted(METRICS), default='euclidean')
    parser.add_argument('--metric-y', choices=sorted(METRICS), default='euclidean')
    parser.add_argument('--solver', choices=['auto'] + sorted(SOLVERS), default='auto')


def _add_coefficient_arguments(parser):
    parser.add_argument('--coeff', choices=KINDS, default='rho_star', help='dependency coefficient')
    parser.add_argument('--alpha', type=float, help='scale of rho_alpha')
    _add_metric_arguments(parser)


def _add_test_arguments(parser):
    parser.add_argument('--m', type=_positive_int, default=29, help='number of permutations')
    parser.add_argument('--k', type=int, default=2, help='tolerated number of exceedances')
    parser.add_argument('--exclude-identity', action='store_true',
                        help='redraw identity permutations')


def build_parser():
    """ArgumentParser of the tdep command"""
    parser = ArgumentParser(prog='tdep', description="Transport dependency of joint samples.")
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='increase verbosity (-v info, -vv debug)')
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    output = ArgumentParser(add_help=False)
    output.add_argument('--out', metavar='PATH', default='-', help="output file ('-' for stdout)")

    # compute
    compute = subparsers.add_parser('compute', parents=[output],
                                     help='transport dependency and its upper bounds')
    _add_input_arguments(compute)
    compute.add_argument('--seed', type=int, help='seed of --geometry samples')
    compute.add_argument('--cost', choices=('additive', 'raw', 'min', 'isometric'),
                         default='additive', help='cost family')
    compute.add_argument('--alpha', type=float, help="scale of the additive cost ('inf' allowed)")
    compute.add_argument('--beta-x', type=float, default=1.,
                         help='exponent of d_X in the additive cost')
    _add_metric_arguments(compute)
    compute.add_argument('--tolerance', type=float, help='x-grouping tolerance of tau^Y')
    compute.add_argument('--merge-atoms', action='store_true',
                         help='merge duplicate atoms of the product measure')
    compute.add_argument('--no-bounds', action='store_true', help='skip the upper bounds')
    compute.set_defaults(func=cmd_compute)

    # corr
    corr = subparsers.add_parser('corr', parents=[output], help='dependency coefficient')
    _add_input_arguments(corr)
    corr.add_argument('--seed', type=int, help='seed of --geometry samples')
    _add_coefficient_arguments(corr)
    corr.add_argument('--tolerance', type=float, help='x-grouping tolerance of rho_inf')
    corr.set_defaults(func=cmd_corr)

    # test
    test = subparsers.add_parser('test', parents=[output], help='permutation test of independence')
    _add_input_arguments(test)
    test.add_argument('--seed', type=int, required=True, help='seed of samples and permutations')
    _add_coefficient_arguments(test)
    _add_test_arguments(test)
    test.add_argument('--level', type=float, help='maximal admissible nominal level')
    test.set_defaults(func=cmd_test)

    # power
    power = subparsers.add_parser('power', parents=[output], help='power over a noise grid')
    _add_geometry_arguments(power, required=True)
    power.add_argument('--seed', type=int, required=True, help='root seed of all runs')
    _add_coefficient_arguments(power)
    _add_test_arguments(power)
    power.add_argument('--noise', choices=NOISE_MODELS, default='convex', help='noise model')
    power.add_argument('--eps-grid', default='0:1:0.1', help='start:stop:step of epsilon')
    power.add_argument('--sigma-grid', default='0:0.5:0.05', help='start:stop:step of sigma')
    power.add_argument('--runs', type=_positive_int, default=100, help='tests per noise level')
    power.add_argument('--workers', type=_positive_int, help='worker processes')
    power.set_defaults(func=cmd_power)

    # gauss
    gauss = subparsers.add_parser('gauss', parents=[output],
                                  help='closed-form Gaussian dependency curves')
    gauss.add_argument('--rho-grid', default='0:1:0.01', help='start:stop:step of rho')
    gauss.add_argument('--sigma1', type=float, default=1., help='standard deviation of x')
    gauss.add_argument('--sigma2', type=float, default=1., help='standard deviation of y')
    gauss.add_argument('--alpha', type=float, help='weight of |dx|^2 in the cost')
    gauss.set_defaults(func=cmd_gauss)

    # synth
    synth = subparsers.add_parser('synth', parents=[output], help='synthetic sample as CSV')
    _add_sample_arguments(synth, required=True)
    synth.add_argument('--seed', type=int, required=True, help='seed of the sample')
    synth.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    """Run the tdep command and return its exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    level = max(logging.WARNING - 10*args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format='%(levelname)s: %(message)s')
    try:
        args.func(args)
    except CapacityError as exc:
        logging.error("%s", exc)
        return EXIT_CAPACITY
    except (DegenerateMeasureError, ConvergenceError, NumericalError) as exc:
        logging.error("%s", exc)
        return EXIT_NUMERIC
    except InputError as exc:
        logging.error("%s", exc)
        return EXIT_DATA
    except ValueError as exc:
        logging.error("%s", exc)
        return EXIT_USAGE
    return 0
