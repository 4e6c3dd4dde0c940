"""This python script performs statistical validation of tdep

The module is meant to be run from command line as

> python tdep/examples/validation.py {run|report}

see python tdep/examples/validation.py -h

for more information.

The script runs randomized experiments on the estimators of tdep:

    gauss-consistency    empirical transport dependency of bivariate
                         normal samples against its closed form
    independence-bias    rho_star and dcor under independence for
                         several sample sizes and dimensions
    geometry             coefficients on noiseless synthetic geometries
    test                 rejection rates of permutation tests (level
                         under independence, power under contamination)

Every single run of an experiment yields a dictionary of scalar
results that is fed into a DataStore. The store aggregates mean and
standard deviation online and keeps all values for medians. By
default, the store lives in the directory validation_data, which can
be changed via command line option. Runs are seeded from a root seed,
the experiment name and the run index, so that repeated invocations
extend earlier results reproducibly. Optional multiprocessing allows to
perform runs in parallel.

The report command writes a CSV summary of all results and, if
matplotlib is available, figures of the consistency and bias studies.
"""
import sys
import os
import logging

from collections import namedtuple
from math import sqrt
from zlib import crc32

try:
    import numpy as np
except ImportError:
    logging.error("Example validation.py requires numpy.")
    sys.exit(1)

import tdep
from tdep.coefficients import CoefficientRequest, dcor, pearson, rho_alpha, rho_star, spearman
from tdep.geometries import UniformNoise, convex_contaminate, geometry
from tdep.oracles import GaussianSpec, gauss_tdep_bivariate
from tdep.permutation import permutation_test


class Stats(namedtuple('_Stats', ('runs', 'mean', 'M2', 'values', 'config'))):
    """Aggregated results of an experiment

    Stats groups the number of runs with mean and M2 values for every
    result key. (M2 is a temporary value used to keep track of standard
    deviations. See DataStore documentation for details.) values holds
    the individual results of all runs.
    """
    @property
    def stdev(self):
        """Dictionary of standard deviations for each result key"""
        return dict((key, sqrt(m2/(self.runs-1)) if self.runs > 1 else 0.)
                    for key, m2 in self.M2.items())

    def median(self, key):
        """Median of the results for key"""
        return float(np.median(self.values[key]))


class DataStore(object):
    """Persistent store for aggregated data

    This class provides a data store that maintains statistics of
    experiment results throughout multiple incarnations of the
    validation script.

    A DataStore accepts individual results for given experiments, and
    allows retrieval of the aggregated statistics for a given
    experiment.
    """
    def __init__(self, path):
        import errno
        self.path = path
        try:
            os.makedirs(self.path)
        except OSError as exc:
            if exc.errno != errno.EEXIST:
                raise

    def __iter__(self):
        """Access all data files and statistics in the data store"""
        import pickle
        for dirpath, _, filenames in os.walk(self.path):
            for name in sorted(filenames):
                fname = os.path.join(dirpath, name)
                if fname.endswith('.dat'):
                    try:
                        with open(fname, 'rb') as fstats:
                            yield fname, pickle.load(fstats)
                    except Exception as exc:
                        logging.warning("Could not access data in %s", fname)
                        logging.info(exc, exc_info=True)
                        yield fname, None

    def get_path_for_config(self, config):
        """Retrieve path of datafile for a given experiment"""
        return os.path.join(self.path, config.name+'.dat')

    def feed_result(self, result, config):
        """Add a single result dictionary for a given experiment

        feed_result uses an online algorithm to update mean and
        standard deviation with every new result fed into the store.
        (The online aggregation is adapted from
        https://en.wikipedia.org/wiki/Algorithms_for_calculating_variance#Online_algorithm)
        """
        import pickle
        from shutil import copyfile

        fname = self.get_path_for_config(config)
        if os.path.exists(fname):
            with open(fname, 'rb') as fstats:
                stats = pickle.load(fstats)
            N = stats.runs + 1
            delta = dict((key, value - stats.mean[key]) for key, value in result.items())
            mean = dict((key, value + delta[key]/float(N)) for key, value in stats.mean.items())
            M2 = dict((key, value + delta[key]*(result[key] - mean[key]))
                      for key, value in stats.M2.items())
            values = dict((key, value + [result[key]]) for key, value in stats.values.items())
            copyfile(fname, fname+'~')
        else:
            N = 1
            mean = dict(result)
            M2 = dict((key, 0.) for key in result)
            values = dict((key, [value]) for key, value in result.items())

        with open(fname, 'wb') as outfile:
            outfile.write(pickle.dumps(Stats(N, mean, M2, values, config)))

        if os.path.exists(fname+'~'):
            os.remove(fname+'~')

    def get_stats(self, config):
        """Read stats for a given experiment"""
        import pickle
        fname = self.get_path_for_config(config)
        with open(fname, 'rb') as fstats:
            return pickle.load(fstats)

    def get_runs(self, config):
        """Number of runs stored for a given experiment"""
        if not os.path.exists(self.get_path_for_config(config)):
            return 0
        return self.get_stats(config).runs


class GaussianConsistency(namedtuple('_GaussianConsistency', ('n', 'rho', 'solver'))):
    """Empirical transport dependency of a bivariate normal sample"""
    cost = tdep.RawPowerCost(p=2.)

    @property
    def name(self):
        return 'gauss-consistency-n%04d-rho%g-%s' % self

    @property
    def reference(self):
        return {'tdep': gauss_tdep_bivariate(1., 1., self.rho)}

    def __call__(self, seed):
        gamma = GaussianSpec.bivariate(1., 1., self.rho).sample(self.n, seed)
        value = tdep.transport_dependency(gamma, self.cost, self.solver, bounds=False).value
        return {'tdep': value, 'error': abs(value - self.reference['tdep'])}


class IndependenceBias(namedtuple('_IndependenceBias', ('n', 'r', 'q'))):
    """rho_star and dcor of independent uniform samples"""
    @property
    def name(self):
        return 'independence-bias-r%d-q%d-n%04d' % (self.r, self.q, self.n)

    reference = {'rho_star': 0., 'dcor': 0.}

    def __call__(self, seed):
        gamma = UniformNoise(self.r, self.q).sample(self.n, seed)
        return {'rho_star': rho_star(gamma), 'dcor': dcor(gamma)}


class GeometryCoefficients(namedtuple('_GeometryCoefficients', ('kind', 'params', 'n'))):
    """Coefficients on a noiseless sample of a synthetic geometry"""
    @property
    def name(self):
        params = ''.join('-%s%s' % item for item in self.params)
        return 'geometry-%s%s-n%d' % (self.kind, params, self.n)

    @property
    def reference(self):
        spec = geometry(self.kind, **dict(self.params))
        if self.kind in ('identity', 'polynomial') or (self.kind == 'zigzag' and spec.segments <= 3):
            return {'rho_3': 1.}
        return {}

    def __call__(self, seed):
        gamma = geometry(self.kind, **dict(self.params)).sample(self.n, seed)
        return {'rho_star': rho_star(gamma), 'rho_3': rho_alpha(gamma, 3.),
                'dcor': dcor(gamma), 'pearson': pearson(gamma), 'spearman': spearman(gamma)}


class TestRejection(namedtuple('_TestRejection', ('kind', 'params', 'epsilon', 'coefficient',
                                                  'n', 'm', 'k'))):
    """Rejection of a permutation test on a contaminated geometry sample"""
    __test__ = False

    @property
    def name(self):
        params = ''.join('-%s%s' % item for item in self.params)
        coefficient = self.coefficient.kind
        if coefficient == 'rho_alpha':
            coefficient = 'rho_%g' % self.coefficient.alpha
        return 'test-%s%s-eps%g-%s-n%d-m%d-k%d' % (
            self.kind, params, self.epsilon, coefficient, self.n, self.m, self.k)

    @property
    def reference(self):
        if self.epsilon == 1:
            return {'reject': (self.k+1.)/(self.m+1.)}
        return {}

    def __call__(self, seed):
        data_seed, perm_seed = seed.spawn(2)
        gamma = convex_contaminate(geometry(self.kind, **dict(self.params)),
                                   self.epsilon, self.n, data_seed)
        report = permutation_test(gamma, self.coefficient, self.m, self.k, perm_seed)
        return {'reject': float(report.reject)}


def experiments():
    """Default list of experiments"""
    configs = [GaussianConsistency(n, .75, 'exact' if n <= 200 else 'sinkhorn')
               for n in (50, 200, 800)]
    configs += [IndependenceBias(n, r, q)
                for r, q in ((1, 1), (2, 1), (2, 2), (5, 5))
                for n in (10, 20, 50, 100, 200, 500, 1000)]
    geometries = [('identity', ()), ('zigzag', (('segments', 3),)),
                  ('zigzag', (('segments', 5),)), ('polynomial', ()), ('sine', (('slope', 3.),)),
                  ('circle', ()), ('cross', ()), ('spiral', ()), ('pretzel', ()),
                  ('uniform_noise', ())]
    configs += [GeometryCoefficients(kind, params, 50) for kind, params in geometries]
    rho_3 = CoefficientRequest('rho_alpha', alpha=3.)
    configs += [TestRejection('identity', (), 1., coefficient, 50, 29, 2)
                for coefficient in (CoefficientRequest('rho_star'), rho_3)]
    configs += [TestRejection('zigzag', (('segments', 5),), .5, coefficient, 50, 29, 2)
                for coefficient in (rho_3, CoefficientRequest('dcor'))]
    return configs


def run_experiment(config, seed):
    """Perform a single run of an experiment"""
    logging.debug("Start run of %s.", config.name)
    result = config(seed)
    logging.debug("Run of %s finished.", config.name)
    return result


def seed_for(root, config, index):
    """SeedSequence of run index of an experiment"""
    return np.random.SeedSequence([root, crc32(config.name.encode('utf-8')), index])


def run_in_process(queue, locks, store):
    """Worker process for parallel execution of experiments.

    The worker continuously fetches an experiment and seed from the
    queue, runs the experiment and feeds the result into the data
    store. The worker stops if it fetches a single None from the queue.
    """
    while True:
        job = queue.get()
        if not job:
            break
        config, seed = job

        try:
            result = run_experiment(config, seed)
        except Exception as exc:
            logging.warning("Could not run experiment %s", config.name)
            logging.info(exc, exc_info=True)
            continue

        with locks[config]:
            try:
                store.feed_result(result, config)
            except Exception as exc:
                logging.warning("Could not store result for %s", config.name)
                logging.info(exc, exc_info=True)

    logging.debug("Worker finished")


def run_validation(args):
    """Perform validation experiments.

    Run experiments required for the store to hold aggregated
    statistics from args.N runs for each selected experiment. If
    args.experiments is given, only experiments whose names start
    with one of the given prefixes are run.

    If args.cpu is given and greater than 1, runs are performed in
    parallel.
    """
    from multiprocessing import Process, Queue, Lock

    configs = [config for config in experiments()
               if not args.experiments
               or any(config.name.startswith(prefix) for prefix in args.experiments)]

    def jobs(N):
        for config in configs:
            done = args.store.get_runs(config)
            for index in range(done, N):
                yield config, seed_for(args.seed, config, index)

    if args.cpu > 1:
        queue = Queue(maxsize=args.cpu)
        locks = dict((config, Lock()) for config in configs)
        processes = [Process(target=run_in_process,
                             args=(queue, locks, args.store))
                     for _ in range(args.cpu)]
        for proc in processes:
            proc.start()
        logging.debug("%d processes started." % args.cpu)
        for job in jobs(args.N):
            queue.put(job)
        logging.debug("All jobs requested.")
        for _ in processes:
            queue.put(None)
            logging.debug("Shutdown signal sent.")
        queue.close()
        for proc in processes:
            proc.join()
    else:
        for config, seed in jobs(args.N):
            args.store.feed_result(run_experiment(config, seed), config)
    logging.debug("Done.")


def report_validation(args, frmt='png'):
    """Write a summary of all results in args.store and generate figures"""
    import csv

    collected = [stats for _, stats in args.store if stats]
    reportfile = args.reportfile or os.path.join(args.store.path, 'summary.csv')
    with open(reportfile, 'w') as report:
        writer = csv.writer(report, lineterminator='\n')
        writer.writerow(('experiment', 'key', 'runs', 'mean', 'stdev', 'median', 'reference'))
        for stats in collected:
            reference = stats.config.reference
            for key in sorted(stats.mean):
                writer.writerow((stats.config.name, key, stats.runs, stats.mean[key],
                                 stats.stdev[key], stats.median(key), reference.get(key, '')))
    logging.info("Summary written to %s", reportfile)

    figures = (
        ('gauss-consistency', 'error', lambda config: 'rho=%g, %s' % (config.rho, config.solver)),
        ('independence-bias', 'rho_star', lambda config: 'r=%d, q=%d' % (config.r, config.q)),
    )
    for prefix, key, label in figures:
        group = [stats for stats in collected if stats.config.name.startswith(prefix)]
        if not group:
            continue
        figname = os.path.join(args.store.path, prefix+'.'+frmt)
        logging.debug("Generate figure for %s", prefix)
        try:
            generate_figure(group, key, label, figname)
        except Exception as exc:
            logging.warning("Could not generate figure for %s", prefix)
            logging.info(exc, exc_info=True)


def generate_figure(group, key, label, fname):
    """Plot medians of key against the sample size and save it to fname

    Experiments are grouped into curves by label(config).
    """
    try:
        from matplotlib import pyplot as plt
    except ImportError:
        logging.error("Example validation.py requires matplotlib.")
        sys.exit(1)

    series = {}
    for stats in group:
        series.setdefault(label(stats.config), []).append((stats.config.n, stats.median(key)))

    fig = plt.figure(figsize=plt.figaspect(.6))
    ax = fig.add_subplot(111)
    ax.set_xscale('log')
    for name, points in sorted(series.items()):
        points.sort()
        ax.plot([n for n, _ in points], [value for _, value in points], marker='o', label=name)
    plt.xlabel('samples n')
    plt.ylabel('median %s' % key)
    plt.legend(loc=0)
    fig.savefig(fname)
    plt.close()


if __name__ == '__main__':
    import argparse

    parser = argparse.ArgumentParser(
        prog=sys.argv[0],
        description="Perform statistical validation experiments.",
        epilog="""If --dir is provided, it specifies a directory used to
               hold validation data.""")
    # global options
    parser.add_argument('--dir', dest='store',
                        type=DataStore,
                        default=DataStore('validation_data'),
                        help='directory for/with experiment results')

    subparsers = parser.add_subparsers(help='validation sub-command')

    # parser for the "run" command
    parser_run = subparsers.add_parser('run', help='run experiments to generate validation data')
    parser_run.add_argument('N',
                            type=int,
                            help='number of runs to be performed per experiment in total')
    parser_run.add_argument('--experiment',
                            action='append',
                            dest='experiments',
                            help='name prefix of experiments to be run')
    parser_run.add_argument('--seed',
                            type=int,
                            default=0,
                            help='root seed of all runs')
    parser_run.add_argument('--cpu', metavar='N',
                            type=int,
                            default=1,
                            help='number of parallel processes')
    parser_run.set_defaults(func=run_validation)

    # parser for the "report" command
    parser_report = subparsers.add_parser('report', help='generate summary and figures')
    parser_report.add_argument('--file',
                               action='store',
                               dest='reportfile',
                               default='',
                               help='file name of generated summary')
    parser_report.set_defaults(func=report_validation)

    # parse and act
    logging.basicConfig(level=logging.INFO)
    args = parser.parse_args()
    args.func(args)
