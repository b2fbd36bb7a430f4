# -*- coding: utf-8 -*-
"""kgaccuracy.bench

Monte Carlo replication of evaluation runs, Welch t-tests, the expected
width study of priors, and report files.

Copyright 2024-2025 by the kgaccuracy developers

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU General Public License as published by
the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU General Public License for more details.

The full text of the GNU General Public License is available at:
<http://www.gnu.org/licenses/gpl-3.0.txt>.
"""

import codecs
import copy
import csv
import json
import math
import multiprocessing
from collections import namedtuple

import numpy as np

from .annotate import OracleAnnotator
from .data import DEFAULT_PRIOR_NAMES, NAMED_PRIORS
from .errors import (ConfigError, DegenerateTestError, KGAccuracyError,
                     require)
from .evaluate import AHPD, prior_label, resolve_prior, run_evaluation
from .intervals import (CREDIBLE_METHODS, WALD, WILSON, credible_interval,
                        posterior_update)
from .special import student_t_sf
from .util import verbose_print

CSV_COLUMNS = ['method', 'dataset', 'sampling', 'alpha', 'epsilon', 'R',
               'triples_mean', 'triples_std', 'cost_h_mean', 'cost_h_std',
               'entities_mean', 'converged_frac']

SWEEP_COLUMNS = ['alpha', 'baseline', 'method', 'baseline_cost_h',
                 'method_cost_h', 'reduction_pct']

WEIGHT_FLOOR = 1e-18

RAW_FIELDS = ('triples', 'cost_hours', 'entities', 'converged', 'mu_hat',
              'zero_width')

RunOutcome = namedtuple('RunOutcome',
                        ['run_index', 'triples', 'cost_hours', 'entities',
                         'converged', 'mu_hat', 'zero_width', 'error'])

PriorWidthTable = namedtuple('PriorWidthTable', ['mu_grid', 'names',
                                                 'widths'])

SweepRow = namedtuple('SweepRow', ['alpha', 'baseline', 'method', 'ratio'])


def method_tag(config):
    """Short name of the interval method of config, priors included when
    they differ from the defaults.
    """
    labels = [prior_label(prior) for prior in config.priors]
    if config.method == AHPD:
        if tuple(labels) == DEFAULT_PRIOR_NAMES:
            return AHPD
        return AHPD + ':' + ','.join(labels)
    if config.method in CREDIBLE_METHODS:
        return config.method + ':' + ','.join(labels)
    return config.method


def run_seed(base_seed, run_index):
    """Return the independent generator of replication run_index."""
    return np.random.default_rng(np.random.SeedSequence([base_seed,
                                                         run_index]))


def run_once(kg, config, base_seed, run_index):
    """Run one seeded replication against the oracle annotator.

    Errors are recorded on the outcome instead of being raised.
    """
    try:
        report = run_evaluation(kg, config, OracleAnnotator(kg),
                                run_seed(base_seed, run_index))
    except KGAccuracyError as error:
        return RunOutcome(run_index, 0, 0.0, 0, False, None, False,
                          str(error))
    zero_width = (report.converged and report.interval is not None and
                  report.interval.width == 0.0)
    return RunOutcome(run_index, report.n_triples, report.cost_hours,
                      report.n_entities, report.converged, report.mu_hat,
                      zero_width, None)


class Worker(multiprocessing.Process):
    """Worker object for multiprocessing."""
    def __init__(self, work_queue, result_queue, kg, config, base_seed):
        # base class initialization
        multiprocessing.Process.__init__(self)

        # job management stuff
        self.work_queue = work_queue
        self.result_queue = result_queue

        self.kg = kg
        self.config = config
        self.base_seed = base_seed

    def run(self):
        while True:
            # get a task, None marks the end of the queue
            job = self.work_queue.get()
            if job is None:
                break

            # the actual processing
            try:
                outcome = run_once(self.kg, self.config, self.base_seed, job)
            except Exception as error:  # pylint: disable=broad-except
                outcome = RunOutcome(job, 0, 0.0, 0, False, None, False,
                                     repr(error))

            # store the result
            self.result_queue.put(outcome)


def _run_parallel(kg, config, repetitions, base_seed, workers):
    work_queue = multiprocessing.Queue()
    for job in range(repetitions):
        work_queue.put(job)
    for _ in range(workers):
        work_queue.put(None)

    result_queue = multiprocessing.Queue()
    pool = [Worker(work_queue, result_queue, kg, config, base_seed)
            for _ in range(workers)]
    for worker in pool:
        worker.start()

    outcomes = [result_queue.get() for _ in range(repetitions)]
    for worker in pool:
        worker.join()
    return outcomes


def _mean(values):
    return float(np.mean(values)) if len(values) else float('nan')


def _std(values):
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1))


class ReplicationSummary(object):
    """Aggregate of R replications of one (method, dataset, sampling) cell.

    Standard deviations use the R - 1 denominator and are 0 when fewer than
    two runs succeeded. raw holds the per-run vectors keyed by RAW_FIELDS.
    """
    def __init__(self, method, dataset, sampling, alpha, epsilon, repetitions,
                 triples_mean, triples_std, cost_hours_mean, cost_hours_std,
                 entities_mean, converged_fraction, zero_width_fraction=0.0,
                 failures=0, raw=None):
        self.method = method
        self.dataset = dataset
        self.sampling = sampling
        self.alpha = alpha
        self.epsilon = epsilon
        self.repetitions = repetitions
        self.triples_mean = triples_mean
        self.triples_std = triples_std
        self.cost_hours_mean = cost_hours_mean
        self.cost_hours_std = cost_hours_std
        self.entities_mean = entities_mean
        self.converged_fraction = converged_fraction
        self.zero_width_fraction = zero_width_fraction
        self.failures = failures
        self.raw = raw

    @classmethod
    def from_outcomes(cls, method, dataset, sampling, alpha, epsilon,
                      outcomes):
        outcomes = sorted(outcomes, key=lambda outcome: outcome.run_index)
        done = [outcome for outcome in outcomes if outcome.error is None]
        raw = {
            'triples': [o.triples for o in done],
            'cost_hours': [o.cost_hours for o in done],
            'entities': [o.entities for o in done],
            'converged': [bool(o.converged) for o in done],
            'mu_hat': [o.mu_hat for o in done],
            'zero_width': [bool(o.zero_width) for o in done],
        }
        repetitions = len(outcomes)
        return cls(method, dataset, sampling, alpha, epsilon, repetitions,
                   _mean(raw['triples']), _std(raw['triples']),
                   _mean(raw['cost_hours']), _std(raw['cost_hours']),
                   _mean(raw['entities']),
                   sum(raw['converged']) / float(repetitions),
                   sum(raw['zero_width']) / float(repetitions),
                   repetitions - len(done), raw)

    def to_row(self):
        return {
            'method': self.method,
            'dataset': self.dataset,
            'sampling': self.sampling,
            'alpha': self.alpha,
            'epsilon': self.epsilon,
            'R': self.repetitions,
            'triples_mean': self.triples_mean,
            'triples_std': self.triples_std,
            'cost_h_mean': self.cost_hours_mean,
            'cost_h_std': self.cost_hours_std,
            'entities_mean': self.entities_mean,
            'converged_frac': self.converged_fraction,
        }

    def to_dict(self, raw=False):
        result = self.to_row()
        result['zero_width_frac'] = self.zero_width_fraction
        result['failures'] = self.failures
        if raw and self.raw is not None:
            result['raw'] = self.raw
        return result

    @classmethod
    def from_dict(cls, record):
        return cls(record['method'], record['dataset'], record['sampling'],
                   record['alpha'], record['epsilon'], record['R'],
                   record['triples_mean'], record['triples_std'],
                   record['cost_h_mean'], record['cost_h_std'],
                   record['entities_mean'], record['converged_frac'],
                   record.get('zero_width_frac', 0.0),
                   record.get('failures', 0), record.get('raw'))

    def __eq__(self, other):
        if not isinstance(other, ReplicationSummary):
            return NotImplemented
        return self.to_dict(raw=True) == other.to_dict(raw=True)

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    __hash__ = None

    def describe(self):
        return ('%s %s %s: triples %.1f+-%.1f cost %.2f+-%.2fh '
                'converged %.3f (R=%d)' %
                (self.method, self.dataset, self.sampling, self.triples_mean,
                 self.triples_std, self.cost_hours_mean, self.cost_hours_std,
                 self.converged_fraction, self.repetitions))


def replicate(kg, config, repetitions, base_seed, workers=1, dataset='kg',
              verbose=False):
    """Run run_evaluation repetitions times and aggregate the outcomes.

    Run i draws from the generator seeded by (base_seed, i), so the summary
    does not depend on the number of workers.

    Keyword arguments:
    kg -- the labeled KnowledgeGraph
    config -- evaluate.EvalConfig
    repetitions -- R >= 1
    base_seed -- non-negative integer
    workers -- number of worker processes
    dataset -- tag recorded on the summary
    verbose -- report progress
    """
    require(repetitions >= 1, 'repetitions must be at least 1')
    require(base_seed >= 0, 'base_seed must be non-negative')
    config.validate()
    workers = max(1, min(int(workers), repetitions))
    verbose_print('Replicating %s on %s (%s), R=%d, %d worker(s)' %
                  (method_tag(config), dataset, config.sampling, repetitions,
                   workers), verbose)
    if workers == 1:
        outcomes = [run_once(kg, config, base_seed, i)
                    for i in range(repetitions)]
    else:
        outcomes = _run_parallel(kg, config, repetitions, base_seed, workers)
    summary = ReplicationSummary.from_outcomes(
        method_tag(config), dataset, config.sampling, config.alpha,
        config.epsilon, outcomes)
    verbose_print(summary.describe(), verbose)
    return summary


def alpha_sweep(kg, config, alphas, repetitions, base_seed, baseline=WILSON,
                workers=1, dataset='kg', verbose=False):
    """Replicate config and a frequentist baseline at several significance
    levels and compare their mean annotation costs.

    Both methods share the sampling design, batch schedule, cost model and
    run seeds of config; only the interval method differs.

    Keyword arguments:
    kg -- the labeled KnowledgeGraph
    config -- evaluate.EvalConfig of the compared method
    alphas -- significance levels in (0, 1)
    repetitions -- R >= 1 per alpha and method
    base_seed -- non-negative integer
    baseline -- 'wald' or 'wilson'
    workers -- number of worker processes
    dataset -- tag recorded on the summaries
    verbose -- report progress

    Returns a list of SweepRow(alpha, baseline summary, method summary,
    cost reduction ratio in percent).
    """
    require(baseline in (WALD, WILSON),
            'baseline must be wald or wilson, got %r' % (baseline,),
            ConfigError)
    require(len(alphas) >= 1, 'the sweep needs at least one alpha',
            ConfigError)
    rows = []
    for alpha in alphas:
        compared = copy.copy(config)
        compared.alpha = alpha
        reference = copy.copy(compared)
        reference.method = baseline
        reference.priors = []
        reference_summary = replicate(kg, reference, repetitions, base_seed,
                                      workers, dataset, verbose)
        compared_summary = replicate(kg, compared, repetitions, base_seed,
                                     workers, dataset, verbose)
        rows.append(SweepRow(alpha, reference_summary, compared_summary,
                             reduction_ratio(reference_summary,
                                             compared_summary)))
    return rows


def write_sweep(rows, path):
    """Write the rows of alpha_sweep as CSV with SWEEP_COLUMNS."""
    require(len(rows) >= 1, 'nothing to report')
    try:
        with codecs.open(path, 'w', 'utf-8') as outfile:
            writer = csv.writer(outfile, lineterminator='\n')
            writer.writerow(SWEEP_COLUMNS)
            for row in rows:
                writer.writerow([row.alpha, row.baseline.method,
                                 row.method.method,
                                 '%.6f' % row.baseline.cost_hours_mean,
                                 '%.6f' % row.method.cost_hours_mean,
                                 '%.2f' % row.ratio])
    except (IOError, OSError) as error:
        raise IOError('cannot write sweep %s: %s' % (path, error))


def welch_df(a, b):
    """Welch-Satterthwaite degrees of freedom of two samples."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    se_a = float(np.var(a, ddof=1)) / a.size
    se_b = float(np.var(b, ddof=1)) / b.size
    return (se_a + se_b) ** 2 / (se_a * se_a / (a.size - 1) +
                                 se_b * se_b / (b.size - 1))


def t_test(a, b):
    """Welch two-sample t-test.

    Returns (t, p) with the two-sided p-value on Welch-Satterthwaite degrees
    of freedom.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    require(a.size >= 2 and b.size >= 2,
            't-test needs at least two observations per sample')
    mean_a, mean_b = float(np.mean(a)), float(np.mean(b))
    se2 = float(np.var(a, ddof=1)) / a.size + float(np.var(b, ddof=1)) / b.size
    if se2 == 0.0:
        if mean_a == mean_b:
            raise DegenerateTestError('both samples are constant and equal')
        return math.copysign(float('inf'), mean_a - mean_b), 0.0
    t = (mean_a - mean_b) / math.sqrt(se2)
    p = min(1.0, 2.0 * student_t_sf(abs(t), welch_df(a, b)))
    return t, p


def reduction_ratio(baseline, other, metric='cost_hours'):
    """Percentage by which other lowers the mean metric of baseline.

    Keyword arguments:
    baseline -- ReplicationSummary of the reference method
    other -- ReplicationSummary of the compared method
    metric -- 'cost_hours' or 'triples'
    """
    require(metric in ('cost_hours', 'triples'),
            'metric must be cost_hours or triples')
    if metric == 'cost_hours':
        base, value = baseline.cost_hours_mean, other.cost_hours_mean
    else:
        base, value = baseline.triples_mean, other.triples_mean
    require(base > 0.0, 'baseline mean must be positive, got %r' % (base,))
    return 100.0 * (base - value) / base


def compare(summary_a, summary_b, metric='cost_hours'):
    """Welch t-test between the per-run vectors of two summaries."""
    require(summary_a.raw is not None and summary_b.raw is not None,
            'comparison needs per-run vectors')
    return t_test(summary_a.raw[metric], summary_b.raw[metric])


def default_mu_grid(step=0.01):
    """Return the accuracy grid step, 2 step, ..., 1 - step."""
    count = int(round(1.0 / step))
    return [round(i * step, 10) for i in range(1, count)]


def binomial_weights(n, mu):
    """Return P(tau = k) for k = 0..n under Binomial(n, mu).

    The weights are formed in log space, so large n neither overflows the
    binomial coefficient nor underflows the powers of mu.
    """
    if mu == 0.0:
        return [1.0] + [0.0] * n
    if mu == 1.0:
        return [0.0] * n + [1.0]
    log_mu = math.log(mu)
    log_rest = math.log1p(-mu)
    log_n = math.lgamma(n + 1.0)
    return [math.exp(log_n - math.lgamma(k + 1.0) - math.lgamma(n - k + 1.0) +
                     k * log_mu + (n - k) * log_rest)
            for k in range(n + 1)]


def expected_width(prior, n, alpha, mu_grid, method):
    """Return, for each mu of mu_grid, the expected width of the credible
    interval after n annotations: sum over tau of Bin(tau; n, mu) times the
    width of the interval on posterior_update(prior, tau, n).

    Keyword arguments:
    prior -- BetaParams
    n -- sample size >= 1
    alpha -- significance level
    mu_grid -- accuracies in [0, 1]
    method -- 'et' or 'hpd'
    """
    require(n >= 1, 'n must be at least 1')
    require(method in CREDIBLE_METHODS, 'method must be et or hpd')
    require(all(0.0 <= mu <= 1.0 for mu in mu_grid),
            'grid values must lie in [0, 1]')
    weights = [binomial_weights(n, mu) for mu in mu_grid]
    # outcomes no grid point can produce contribute nothing
    widths = dict()
    for tau in range(n + 1):
        if max((row[tau] for row in weights), default=0.0) > WEIGHT_FLOOR:
            widths[tau] = credible_interval(
                method, posterior_update(prior, tau, n), alpha).width
    return [math.fsum(row[tau] * width for tau, width in widths.items())
            for row in weights]


def prior_width_table(priors, n, alpha, method, mu_grid=None):
    """Expected widths of several priors on one grid.

    Keyword arguments:
    priors -- list of prior names, 'a:b' strings or BetaParams
    n -- sample size
    alpha -- significance level
    method -- 'et' or 'hpd'
    mu_grid -- accuracies (default_mu_grid() if None)
    """
    if mu_grid is None:
        mu_grid = default_mu_grid()
    names = []
    widths = dict()
    for prior in priors:
        params = resolve_prior(prior)
        name = prior_label(params)
        names.append(name)
        widths[name] = expected_width(params, n, alpha, mu_grid, method)
    return PriorWidthTable(list(mu_grid), names, widths)


def minimal_prior_at(table, mu):
    """Name of the prior with the smallest expected width at the grid point
    closest to mu.
    """
    index = min(range(len(table.mu_grid)),
                key=lambda i: abs(table.mu_grid[i] - mu))
    return min(table.names, key=lambda name: table.widths[name][index])


def jeffreys_dominated(table):
    """True when at every grid point some other prior is strictly narrower
    than Jeffreys.
    """
    jeffreys = prior_label(NAMED_PRIORS['jeffreys'])
    require(jeffreys in table.names, 'the table has no jeffreys column')
    others = [name for name in table.names if name != jeffreys]
    require(others, 'the table needs a prior besides jeffreys')
    return all(table.widths[jeffreys][i] >
               min(table.widths[name][i] for name in others)
               for i in range(len(table.mu_grid)))


def write_prior_width_table(table, path):
    with codecs.open(path, 'w', 'utf-8') as outfile:
        writer = csv.writer(outfile, lineterminator='\n')
        writer.writerow(['mu'] + table.names)
        for i, mu in enumerate(table.mu_grid):
            writer.writerow(['%.2f' % mu] +
                            ['%.6f' % table.widths[name][i]
                             for name in table.names])


def emit_report(summaries, fmt, path, raw=False, config=None):
    """Write summaries as a CSV table or a JSON document.

    Keyword arguments:
    summaries -- non-empty list of ReplicationSummary
    fmt -- 'csv' or 'json'
    path -- output file
    raw -- embed the per-run vectors (JSON only)
    config -- optional dict echoed into the JSON document
    """
    require(len(summaries) >= 1, 'nothing to report')
    require(fmt in ('csv', 'json'), 'report format must be csv or json')
    try:
        with codecs.open(path, 'w', 'utf-8') as outfile:
            if fmt == 'csv':
                writer = csv.DictWriter(outfile, fieldnames=CSV_COLUMNS,
                                        lineterminator='\n')
                writer.writeheader()
                for summary in summaries:
                    writer.writerow(summary.to_row())
            else:
                document = {'summaries': [summary.to_dict(raw)
                                          for summary in summaries]}
                if config is not None:
                    document['config'] = config
                json.dump(document, outfile, indent=2, sort_keys=True)
                outfile.write('\n')
    except (IOError, OSError) as error:
        raise IOError('cannot write report %s: %s' % (path, error))


def load_report(path):
    """Read the summaries of a JSON report written by emit_report."""
    with codecs.open(path, 'r', 'utf-8') as infile:
        document = json.load(infile)
    return [ReplicationSummary.from_dict(record)
            for record in document['summaries']]


def _matrix_error(path, message):
    return ConfigError('malformed matrix file %s: %s' % (path, message))


def load_matrix(path):
    """Read a bench matrix file.

    The JSON document maps 'datasets' to {name: path or 'profile:NAME'},
    'sampling' to a list of designs and 'methods' to a list of
    {"method": ..., "priors": "..."} objects. Returns a list of
    (dataset name, source, sampling, method, priors) cells.

    Raises ConfigError naming the offending key when the document does not
    have that shape.
    """
    with codecs.open(path, 'r', 'utf-8') as infile:
        try:
            document = json.load(infile)
        except ValueError as error:
            raise _matrix_error(path, 'not JSON (%s)' % (error,))
    if not isinstance(document, dict):
        raise _matrix_error(path, 'the top level must be an object')
    datasets = document.get('datasets') or {}
    samplings = document.get('sampling') or ['srs']
    methods = document.get('methods') or [{'method': AHPD}]
    if not isinstance(datasets, dict) or not datasets:
        raise _matrix_error(path, '"datasets" must be a non-empty object')
    for name, source in datasets.items():
        if not isinstance(source, str):
            raise _matrix_error(path, 'datasets[%r] must be a string' %
                                (name,))
    if (not isinstance(samplings, list) or
            not all(isinstance(sampling, str) for sampling in samplings)):
        raise _matrix_error(path, '"sampling" must be a list of strings')
    if not isinstance(methods, list):
        raise _matrix_error(path, '"methods" must be a list of objects')
    for index, entry in enumerate(methods):
        if not isinstance(entry, dict):
            raise _matrix_error(path, 'methods[%d] must be an object' %
                                (index,))
        if not isinstance(entry.get('method'), str):
            raise _matrix_error(path, 'methods[%d] has no "method" string' %
                                (index,))
        priors = entry.get('priors')
        if priors is not None and not isinstance(priors, str):
            raise _matrix_error(path, 'methods[%d] "priors" must be a '
                                'string' % (index,))
    cells = []
    for name in sorted(datasets):
        for sampling in samplings:
            for entry in methods:
                cells.append((name, datasets[name], sampling,
                              entry['method'], entry.get('priors')))
    return cells
