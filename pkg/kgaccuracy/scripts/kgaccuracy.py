#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""kgaccuracy -- estimate the accuracy of a knowledge graph from a small
annotated sample.

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

import argparse
import multiprocessing
import os
import sys

import numpy as np

from kgaccuracy import __version__
from kgaccuracy.annotate import (FileAnnotator, OracleAnnotator,
                                 interactive_annotator)
from kgaccuracy.bench import (alpha_sweep, compare, emit_report,
                              jeffreys_dominated, load_matrix,
                              minimal_prior_at, prior_width_table, replicate,
                              write_prior_width_table, write_sweep)
from kgaccuracy.data import (DATASET_PROFILES, DEFAULT_ALPHA, DEFAULT_C1,
                             DEFAULT_C2, DEFAULT_EPSILON, DEFAULT_M,
                             DEFAULT_PRIOR_NAMES, LARGE_CLUSTER_M)
from kgaccuracy.errors import (ConfigError, DegenerateTestError, DomainError,
                               KGAccuracyError)
from kgaccuracy.evaluate import (AHPD, EVAL_METHODS, EvalConfig,
                                 resolve_prior, run_evaluation, write_trace)
from kgaccuracy.intervals import CREDIBLE_METHODS, HPD, WALD, WILSON
from kgaccuracy.kgstore import (generate_like, generate_synthetic,
                                kg_statistics, load_tsv, write_tsv)
from kgaccuracy.sampling import DESIGNS, SRS
from kgaccuracy.util import verbose_print

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3

OUTPUT_DIR_VARIABLE = 'KGACCURACY_OUTPUT_DIR'
PROFILE_PREFIX = 'profile:'


def output_path(path):
    """Resolve a relative output path against $KGACCURACY_OUTPUT_DIR."""
    base = os.environ.get(OUTPUT_DIR_VARIABLE)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def split_priors(text):
    if text is None:
        return None
    return [prior.strip() for prior in text.split(',') if prior.strip()]


def load_dataset(source, seed, verbose=False, icc=0.0):
    """Load a TSV path, or generate the stand-in of 'profile:NAME' with
    intra-cluster label correlation icc.
    """
    if source.startswith(PROFILE_PREFIX):
        profile = source[len(PROFILE_PREFIX):]
        verbose_print('Generating stand-in for profile ' + profile, verbose)
        return generate_like(profile, seed, icc=icc)
    return load_tsv(source, verbose)


def _add_eval_flags(parser):
    source = parser.add_mutually_exclusive_group()
    source.add_argument('--data', help='labeled or unlabeled TSV dataset')
    source.add_argument('--profile', choices=sorted(DATASET_PROFILES),
                        help='synthetic stand-in with the statistics of a '
                             'published dataset')
    parser.add_argument('--sampling', choices=DESIGNS, default=SRS)
    parser.add_argument('--m', type=int,
                        help='second-stage size of TWCS (default %d, %d on '
                             'the syn profile)' % (DEFAULT_M, LARGE_CLUSTER_M))
    parser.add_argument('--method', choices=EVAL_METHODS, default=AHPD)
    parser.add_argument('--priors',
                        help='comma-separated priors: kerman, jeffreys, '
                             'uniform or a:b')
    parser.add_argument('--alpha', type=float, default=DEFAULT_ALPHA)
    parser.add_argument('--epsilon', type=float, default=DEFAULT_EPSILON,
                        help='upper bound on the margin of error, < 0.5')
    parser.add_argument('--initial-batch', type=int)
    parser.add_argument('--step-batch', type=int)
    parser.add_argument('--c1', type=float, default=DEFAULT_C1,
                        help='seconds per entity identification')
    parser.add_argument('--c2', type=float, default=DEFAULT_C2,
                        help='seconds per fact verification')
    parser.add_argument('--max-annotations', type=int)
    parser.add_argument('--icc', type=float, default=0.0,
                        help='intra-cluster label correlation of profile '
                             'stand-ins, in [0, 1)')
    parser.add_argument('--seed', type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(
        prog='kgaccuracy',
        description='Knowledge graph accuracy estimation with Wald, Wilson, '
                    'ET, HPD and adaptive multi-prior HPD intervals.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    generate = commands.add_parser('generate',
                                   help='write a synthetic labeled dataset')
    generate.add_argument('--profile', choices=sorted(DATASET_PROFILES))
    generate.add_argument('--clusters', type=int)
    generate.add_argument('--mean-size', type=float)
    generate.add_argument('--mu', type=float)
    generate.add_argument('--size-law', choices=('geometric', 'constant'),
                          default='geometric')
    generate.add_argument('--icc', type=float, default=0.0,
                          help='intra-cluster label correlation, in [0, 1)')
    generate.add_argument('--seed', type=int, default=0)
    generate.add_argument('--out', required=True)
    generate.add_argument('-v', '--verbose', action='store_true')
    generate.set_defaults(handler=cmd_generate)

    evaluate = commands.add_parser('evaluate',
                                   help='run one accuracy evaluation')
    _add_eval_flags(evaluate)
    evaluate.add_argument('--annotator',
                          choices=('oracle', 'interactive', 'file'),
                          default='oracle')
    evaluate.add_argument('--labels',
                          help='labeled TSV answering the file annotator')
    evaluate.add_argument('--trace', help='write the iteration trace (CSV)')
    evaluate.add_argument('-v', '--verbose', action='store_true')
    evaluate.set_defaults(handler=cmd_evaluate)

    bench = commands.add_parser('bench',
                                help='replicate evaluations and report '
                                     'cost statistics')
    _add_eval_flags(bench)
    bench.add_argument('--reps', type=int, default=1000)
    bench.add_argument('--workers', type=int,
                       default=max(1, multiprocessing.cpu_count()))
    bench.add_argument('--matrix',
                       help='JSON file of datasets x sampling x methods')
    bench.add_argument('--out', required=True)
    bench.add_argument('--format', choices=('csv', 'json'))
    bench.add_argument('--raw', action='store_true',
                       help='embed per-run vectors in JSON reports')
    bench.add_argument('-v', '--verbose', action='store_true')
    bench.set_defaults(handler=cmd_bench)

    width = commands.add_parser('prior-width',
                                help='expected credible interval width of '
                                     'priors over true accuracies')
    width.add_argument('--n', type=int, default=30)
    width.add_argument('--alpha', type=float, default=DEFAULT_ALPHA)
    width.add_argument('--priors', default=','.join(DEFAULT_PRIOR_NAMES))
    width.add_argument('--method', choices=CREDIBLE_METHODS, default=HPD)
    width.add_argument('--out', required=True)
    width.add_argument('--assert-jeffreys-dominated', action='store_true')
    width.add_argument('-v', '--verbose', action='store_true')
    width.set_defaults(handler=cmd_prior_width)

    sweep = commands.add_parser('sweep',
                                help='cost reduction over a frequentist '
                                     'baseline across significance levels')
    _add_eval_flags(sweep)
    sweep.add_argument('--alphas', default='0.01,0.05,0.1',
                       help='comma-separated significance levels')
    sweep.add_argument('--baseline', choices=(WALD, WILSON),
                       default=WILSON)
    sweep.add_argument('--reps', type=int, default=1000)
    sweep.add_argument('--workers', type=int,
                       default=max(1, multiprocessing.cpu_count()))
    sweep.add_argument('--out', required=True)
    sweep.add_argument('-v', '--verbose', action='store_true')
    sweep.set_defaults(handler=cmd_sweep)
    return parser


def _second_stage_size(options, source):
    if options.m is not None:
        return options.m
    if source == PROFILE_PREFIX + 'syn':
        return LARGE_CLUSTER_M
    return DEFAULT_M


def _eval_config(parser, options, method=None, priors=None, source=None):
    method = options.method if method is None else method
    priors = split_priors(options.priors) if priors is None else priors
    if method in (WALD, WILSON) and priors:
        parser.error('--priors only applies to et, hpd and ahpd')
    if method in CREDIBLE_METHODS and not priors:
        print('No --priors given for ' + method + ', defaulting to uniform '
              'prior')
    if method in CREDIBLE_METHODS and priors and len(priors) != 1:
        parser.error(method + ' takes exactly one prior')
    try:
        config = EvalConfig(options.alpha, options.epsilon, options.sampling,
                            _second_stage_size(options, source), method,
                            priors or None,
                            options.initial_batch, options.step_batch,
                            options.c1, options.c2, options.seed,
                            options.max_annotations)
        return config.validate()
    except (ConfigError, DomainError) as error:
        parser.error(str(error))


def _check_icc(parser, options):
    if not 0.0 <= options.icc < 1.0:
        parser.error('--icc must lie in [0, 1)')


def cmd_generate(parser, options):
    clusters, mean_size, mu = options.clusters, options.mean_size, options.mu
    if options.profile is not None:
        _, p_clusters, p_mean, p_accuracy = DATASET_PROFILES[options.profile]
        clusters = p_clusters if clusters is None else clusters
        mean_size = p_mean if mean_size is None else mean_size
        mu = p_accuracy if mu is None else mu
    for flag, value in (('--clusters', clusters), ('--mean-size', mean_size),
                        ('--mu', mu)):
        if value is None:
            parser.error(flag + ' is required without --profile')
    if clusters < 1:
        parser.error('--clusters must be at least 1')
    if mean_size < 1.0:
        parser.error('--mean-size must be at least 1')
    if not 0.0 <= mu <= 1.0:
        parser.error('--mu must lie in [0, 1]')
    _check_icc(parser, options)

    kg = generate_synthetic(clusters, mean_size, mu, options.seed,
                            options.size_law, options.icc)
    path = output_path(options.out)
    write_tsv(kg, path)
    stats = kg_statistics(kg)
    print('Wrote %s: M=%d triples, %d clusters, accuracy %.4f' %
          (path, stats.facts, stats.clusters, stats.accuracy))
    return EXIT_OK


def _annotator(options, kg):
    if options.annotator == 'interactive':
        return interactive_annotator()
    if options.annotator == 'file':
        return FileAnnotator(options.labels)
    return OracleAnnotator(kg)


def cmd_evaluate(parser, options):
    if not (options.data or options.profile):
        parser.error('one of --data or --profile is required')
    source = options.data or PROFILE_PREFIX + options.profile
    config = _eval_config(parser, options, source=source)
    _check_icc(parser, options)
    if options.annotator == 'file' and not options.labels:
        parser.error('--annotator file needs --labels')

    kg = load_dataset(source, options.seed, options.verbose, options.icc)
    annotator = _annotator(options, kg)
    report = run_evaluation(kg, config, annotator,
                            np.random.default_rng(options.seed),
                            options.verbose)
    print(report.summary())
    if report.interval is not None and report.interval.prior is not None:
        print('Selected interval: ' + report.trace[-1].chosen)
    if options.trace:
        write_trace(report, output_path(options.trace))
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def _named_source(options):
    """Return the report name and the load_dataset source of the options."""
    if options.data:
        return (os.path.splitext(os.path.basename(options.data))[0],
                options.data)
    return options.profile, PROFILE_PREFIX + options.profile


def _bench_cells(parser, options):
    """Return (dataset, source, config) triples, all validated."""
    if options.matrix:
        try:
            matrix_cells = load_matrix(options.matrix)
        except ConfigError as error:
            parser.error(str(error))
        cells = []
        for name, source, sampling, method, priors in matrix_cells:
            if sampling not in DESIGNS:
                parser.error('unknown sampling %r in %s' %
                             (sampling, options.matrix))
            options.sampling = sampling
            if isinstance(priors, str):
                priors = split_priors(priors)
            cells.append((name, source,
                          _eval_config(parser, options, method, priors,
                                       source)))
        return cells
    if not (options.data or options.profile):
        parser.error('one of --data, --profile or --matrix is required')
    name, source = _named_source(options)
    return [(name, source, _eval_config(parser, options, source=source))]


def _report_tests(summaries):
    """Welch t-tests of every method against the first one of its cell."""
    groups = dict()
    order = []
    for summary in summaries:
        key = (summary.dataset, summary.sampling)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(summary)
    for key in order:
        baseline = groups[key][0]
        for other in groups[key][1:]:
            try:
                t, p = compare(baseline, other, 'cost_hours')
                result = 't=%.3f p=%.4g' % (t, p)
            except DegenerateTestError:
                result = 'degenerate (identical constant costs)'
            except KGAccuracyError as error:
                result = 'not testable: ' + str(error)
            print('%s %s: %s vs %s cost: %s' %
                  (key[0], key[1], baseline.method, other.method, result))


def cmd_bench(parser, options):
    if options.reps < 1:
        parser.error('--reps must be at least 1')
    if options.workers < 1:
        parser.error('--workers must be at least 1')
    out = output_path(options.out)
    fmt = options.format
    if fmt is None:
        fmt = 'json' if out.lower().endswith('.json') else 'csv'
    _check_icc(parser, options)
    cells = _bench_cells(parser, options)

    datasets = dict()
    summaries = []
    for name, source, config in cells:
        if source not in datasets:
            datasets[source] = load_dataset(source, options.seed,
                                            options.verbose, options.icc)
        summary = replicate(datasets[source], config, options.reps,
                            options.seed, options.workers, name,
                            options.verbose)
        print(summary.describe())
        summaries.append(summary)

    _report_tests(summaries)
    echo = {'reps': options.reps, 'seed': options.seed,
            'cells': [dict(config.to_dict(), dataset=name)
                      for name, _, config in cells]}
    emit_report(summaries, fmt, out, options.raw, echo)
    print('Wrote ' + out)
    return EXIT_OK


def cmd_prior_width(parser, options):
    if options.n < 1:
        parser.error('--n must be at least 1')
    if not 0.0 < options.alpha < 1.0:
        parser.error('--alpha must lie in (0, 1)')
    try:
        priors = [resolve_prior(prior)
                  for prior in split_priors(options.priors)]
    except ConfigError as error:
        parser.error(str(error))
    if not priors:
        parser.error('--priors names no prior')

    table = prior_width_table(priors, options.n, options.alpha,
                              options.method)
    path = output_path(options.out)
    write_prior_width_table(table, path)
    print('Wrote ' + path)
    for mu in (0.05, 0.5, 0.95):
        verbose_print('narrowest at mu=%.2f: %s' %
                      (mu, minimal_prior_at(table, mu)), options.verbose)

    if options.assert_jeffreys_dominated:
        try:
            dominated = jeffreys_dominated(table)
        except DomainError as error:
            parser.error(str(error))
        if not dominated:
            print('Jeffreys prior is the narrowest somewhere on the grid')
            return EXIT_NOT_CONVERGED
        print('Jeffreys prior is never the narrowest')
    return EXIT_OK


def _parse_alphas(parser, text):
    try:
        alphas = [float(value) for value in text.split(',') if value.strip()]
    except ValueError:
        parser.error('--alphas must be comma-separated numbers')
    if not alphas:
        parser.error('--alphas names no significance level')
    if not all(0.0 < alpha < 1.0 for alpha in alphas):
        parser.error('--alphas values must lie in (0, 1)')
    return alphas


def cmd_sweep(parser, options):
    if options.reps < 1:
        parser.error('--reps must be at least 1')
    if options.workers < 1:
        parser.error('--workers must be at least 1')
    if not (options.data or options.profile):
        parser.error('one of --data or --profile is required')
    if options.method in (WALD, WILSON):
        parser.error('--method must be et, hpd or ahpd; the baseline is '
                     'set with --baseline')
    _check_icc(parser, options)
    alphas = _parse_alphas(parser, options.alphas)
    name, source = _named_source(options)
    config = _eval_config(parser, options, source=source)

    kg = load_dataset(source, options.seed, options.verbose, options.icc)
    rows = alpha_sweep(kg, config, alphas, options.reps, options.seed,
                       options.baseline, options.workers, name,
                       options.verbose)
    for row in rows:
        print('alpha=%g: %s %.3fh, %s %.3fh, reduction %.1f%%' %
              (row.alpha, row.baseline.method, row.baseline.cost_hours_mean,
               row.method.method, row.method.cost_hours_mean, row.ratio))
    path = output_path(options.out)
    write_sweep(rows, path)
    print('Wrote ' + path)
    return EXIT_OK


def main(args=None):
    parser = build_parser()
    options = parser.parse_args(args)
    try:
        return options.handler(parser, options)
    except (IOError, OSError) as error:
        sys.stderr.write('kgaccuracy: ' + str(error) + '\n')
        return EXIT_IO
    except KGAccuracyError as error:
        sys.stderr.write('kgaccuracy: ' + str(error) + '\n')
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
