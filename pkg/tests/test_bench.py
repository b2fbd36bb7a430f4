# -*- coding: utf-8 -*-
"""test_bench

This module contains unit tests for kgaccuracy.bench

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

import csv
import io
import json
import math
import os
import shutil
import tempfile
import time
import unittest

from kgaccuracy.bench import (CSV_COLUMNS, SWEEP_COLUMNS, ReplicationSummary,
                              alpha_sweep, binomial_weights, compare,
                              default_mu_grid, emit_report, expected_width,
                              jeffreys_dominated, load_matrix, load_report,
                              method_tag, minimal_prior_at, prior_width_table,
                              reduction_ratio, replicate, run_once, t_test,
                              welch_df, write_sweep)
from kgaccuracy.data import NAMED_PRIORS
from kgaccuracy.errors import ConfigError, DegenerateTestError, DomainError
from kgaccuracy.evaluate import AHPD, EvalConfig
from kgaccuracy.intervals import ET, HPD, WALD, WILSON, credible_interval
from kgaccuracy.kgstore import (KnowledgeGraph, generate_like,
                                generate_synthetic)
from kgaccuracy.sampling import TWCS
from kgaccuracy.special import BetaParams


class TTestTestCases(unittest.TestCase):
    """test cases for kgaccuracy.bench.t_test"""
    def test_t_test(self):
        """test kgaccuracy.bench.t_test"""
        t, p = t_test([10, 12, 14, 16], [11, 13, 15, 17])
        # equal variances 20/3: t = -1 / sqrt(10/3), df = 6
        self.assertAlmostEqual(t, -1.0 / math.sqrt(10.0 / 3.0))
        self.assertAlmostEqual(welch_df([10, 12, 14, 16], [11, 13, 15, 17]),
                               6.0)
        self.assertTrue(0.5 < p < 1.0)

        t, p = t_test([1, 2, 3], [1, 2, 3])
        self.assertEqual(t, 0.0)
        self.assertEqual(p, 1.0)

        t, p = t_test([1, 2, 3], [101, 102, 103])
        self.assertLess(t, 0.0)
        self.assertLess(p, 0.01)

    def test_t_test_degenerate(self):
        """test kgaccuracy.bench.t_test with constant samples"""
        self.assertRaises(DegenerateTestError, t_test, [2, 2, 2], [2, 2])
        t, p = t_test([3, 3, 3], [2, 2, 2])
        self.assertEqual(t, float('inf'))
        self.assertEqual(p, 0.0)
        self.assertRaises(DomainError, t_test, [1], [1, 2])


class ReplicateTestCases(unittest.TestCase):
    """test cases for kgaccuracy.bench.replicate"""
    def setUp(self):
        self.kg = generate_synthetic(400, 2.0, 0.9, 21)

    def test_replicate_single(self):
        """test kgaccuracy.bench.replicate with one run"""
        config = EvalConfig(method=WILSON)
        summary = replicate(self.kg, config, 1, 5, dataset='syn')
        outcome = run_once(self.kg, config, 5, 0)
        self.assertEqual(summary.repetitions, 1)
        self.assertEqual(summary.triples_mean, outcome.triples)
        self.assertEqual(summary.cost_hours_mean, outcome.cost_hours)
        self.assertEqual(summary.triples_std, 0.0)
        self.assertEqual(summary.cost_hours_std, 0.0)
        self.assertEqual(summary.converged_fraction, 1.0)
        self.assertEqual((summary.method, summary.dataset, summary.sampling),
                         ('wilson', 'syn', 'srs'))

    def test_replicate_deterministic(self):
        """test kgaccuracy.bench.replicate is reproducible"""
        config = EvalConfig()
        first = replicate(self.kg, config, 6, 17)
        second = replicate(self.kg, config, 6, 17)
        self.assertEqual(first, second)
        self.assertEqual(len(first.raw['triples']), 6)
        self.assertTrue(first.triples_std >= 0.0)
        self.assertNotEqual(replicate(self.kg, config, 6, 18).raw,
                            first.raw)

    def test_replicate_workers(self):
        """test kgaccuracy.bench.replicate does not depend on workers"""
        config = EvalConfig(method=HPD, priors=['kerman'])
        serial = replicate(self.kg, config, 4, 3, workers=1)
        parallel = replicate(self.kg, config, 4, 3, workers=2)
        self.assertEqual(serial, parallel)

    def test_replicate_zero_width(self):
        """test kgaccuracy.bench.replicate flags zero-width halts"""
        kg = generate_synthetic(300, 2.0, 1.0, 2)
        summary = replicate(kg, EvalConfig(method=WALD), 3, 1)
        self.assertEqual(summary.raw['zero_width'], [True, True, True])
        self.assertEqual(summary.zero_width_fraction, 1.0)
        self.assertEqual(summary.triples_mean, 30.0)

    def test_replicate_invalid(self):
        """test kgaccuracy.bench.replicate argument checks"""
        self.assertRaises(DomainError, replicate, self.kg, EvalConfig(), 0, 1)
        self.assertRaises(DomainError, replicate, self.kg, EvalConfig(), 2,
                          -1)

    def test_compare(self):
        """test kgaccuracy.bench.compare"""
        wald = replicate(self.kg, EvalConfig(method=WALD), 5, 2)
        ahpd = replicate(self.kg, EvalConfig(), 5, 2)
        t, p = compare(wald, ahpd, 'triples')
        self.assertTrue(0.0 <= p <= 1.0)
        self.assertFalse(math.isnan(t))

    def test_mirrored_accuracy_same_cost(self):
        """test replicate needs as many triples at mu as at 1 - mu"""
        kg = generate_synthetic(2000, 2.0, 0.85, 31)
        mirrored = KnowledgeGraph(kg.entities, kg.triple_cluster,
                                  1 - kg.labels)
        for method in (WILSON, HPD, AHPD):
            config = EvalConfig(method=method)
            high = replicate(kg, config, 20, 9)
            low = replicate(mirrored, config, 20, 9)
            self.assertLess(abs(high.triples_mean - low.triples_mean),
                            0.1 * high.triples_mean, msg=method)

    def test_replicate_twcs_speed(self):
        """test replicate on a NELL-sized graph under TWCS"""
        kg = generate_like('nell', 3)
        start = time.perf_counter()
        summary = replicate(kg, EvalConfig(sampling=TWCS), 20, 1)
        self.assertLess(time.perf_counter() - start, 60.0)
        self.assertEqual(summary.failures, 0)

    def test_method_tag(self):
        """test kgaccuracy.bench.method_tag"""
        self.assertEqual(method_tag(EvalConfig()), 'ahpd')
        self.assertEqual(method_tag(EvalConfig(priors=['80:20'])),
                         'ahpd:80:20')
        self.assertEqual(method_tag(EvalConfig(method=HPD)), 'hpd:uniform')
        self.assertEqual(method_tag(EvalConfig(method=WALD)), 'wald')


class ReportTestCases(unittest.TestCase):
    """test cases for kgaccuracy.bench.emit_report & load_report"""
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()
        kg = generate_synthetic(300, 2.0, 0.9, 8)
        self.summaries = [replicate(kg, EvalConfig(method=WILSON), 3, 4,
                                    dataset='syn'),
                          replicate(kg, EvalConfig(), 3, 4, dataset='syn')]

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_emit_csv(self):
        """test kgaccuracy.bench.emit_report as CSV"""
        path = os.path.join(self.tmpdir, 'report.csv')
        emit_report(self.summaries[:1], 'csv', path)
        with io.open(path, encoding='utf-8') as infile:
            rows = list(csv.reader(infile))
        self.assertEqual(len(rows), 2)
        self.assertEqual(rows[0], CSV_COLUMNS)
        self.assertEqual(rows[1][:3], ['wilson', 'syn', 'srs'])
        self.assertEqual(rows[1][5], '3')

    def test_emit_json(self):
        """test kgaccuracy.bench.emit_report as JSON"""
        path = os.path.join(self.tmpdir, 'report.json')
        emit_report(self.summaries, 'json', path, raw=True,
                    config={'seed': 4})
        self.assertEqual(load_report(path), self.summaries)
        with io.open(path, encoding='utf-8') as infile:
            document = json.load(infile)
        self.assertEqual(document['config'], {'seed': 4})
        self.assertIn('raw', document['summaries'][0])

        emit_report(self.summaries, 'json', path)
        loaded = load_report(path)
        self.assertIsNone(loaded[0].raw)
        self.assertEqual(loaded[1].triples_mean,
                         self.summaries[1].triples_mean)

    def test_emit_invalid(self):
        """test kgaccuracy.bench.emit_report argument checks"""
        path = os.path.join(self.tmpdir, 'report.txt')
        self.assertRaises(DomainError, emit_report, [], 'csv', path)
        self.assertRaises(DomainError, emit_report, self.summaries, 'xml',
                          path)
        self.assertFalse(os.path.exists(path))

    def test_summary_dict(self):
        """test kgaccuracy.bench.ReplicationSummary.from_dict"""
        summary = self.summaries[1]
        self.assertEqual(ReplicationSummary.from_dict(summary.to_dict(True)),
                         summary)

    def test_load_matrix(self):
        """test kgaccuracy.bench.load_matrix"""
        path = os.path.join(self.tmpdir, 'matrix.json')
        with io.open(path, 'w', encoding='utf-8') as outfile:
            json.dump({'datasets': {'nell': 'profile:nell',
                                    'mine': 'mine.tsv'},
                       'sampling': ['srs', 'twcs'],
                       'methods': [{'method': 'ahpd'},
                                   {'method': 'et', 'priors': 'kerman'}]},
                      outfile)
        cells = load_matrix(path)
        self.assertEqual(len(cells), 8)
        self.assertEqual(cells[0], ('mine', 'mine.tsv', 'srs', 'ahpd', None))
        self.assertEqual(cells[-1], ('nell', 'profile:nell', 'twcs', 'et',
                                     'kerman'))

    def test_load_matrix_malformed(self):
        """test kgaccuracy.bench.load_matrix rejects malformed files"""
        path = os.path.join(self.tmpdir, 'matrix.json')
        for document, where in (
                ('{"datasets": {', 'not JSON'),
                ('[1, 2]', 'top level'),
                ('{"datasets": {}}', '"datasets"'),
                ('{"datasets": {"a": 3}}', "datasets['a']"),
                ('{"datasets": {"a": "a.tsv"}, "sampling": "srs"}',
                 '"sampling"'),
                ('{"datasets": {"a": "a.tsv"}, "methods": ["wald"]}',
                 'methods[0]'),
                ('{"datasets": {"a": "a.tsv"}, '
                 '"methods": [{"method": "wald"}, {"prior": "kerman"}]}',
                 'methods[1]'),
                ('{"datasets": {"a": "a.tsv"}, '
                 '"methods": [{"method": "et", "priors": ["kerman"]}]}',
                 'methods[0]')):
            with io.open(path, 'w', encoding='utf-8') as outfile:
                outfile.write(document)
            with self.assertRaises(ConfigError) as context:
                load_matrix(path)
            self.assertIn(where, str(context.exception))
            self.assertIn('malformed matrix file', str(context.exception))


class SweepTestCases(unittest.TestCase):
    """test cases for kgaccuracy.bench.alpha_sweep & reduction_ratio"""
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()
        self.kg = generate_synthetic(400, 2.0, 0.9, 21)

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def _summary(self, method, triples, cost_hours):
        return ReplicationSummary(method, 'syn', 'srs', 0.05, 0.05, 10,
                                  triples, 1.0, cost_hours, 0.1, triples,
                                  1.0)

    def test_reduction_ratio(self):
        """test kgaccuracy.bench.reduction_ratio"""
        wilson = self._summary('wilson', 120.0, 2.0)
        ahpd = self._summary('ahpd', 90.0, 1.5)
        self.assertAlmostEqual(reduction_ratio(wilson, ahpd), 25.0)
        self.assertAlmostEqual(reduction_ratio(wilson, ahpd, 'triples'),
                               25.0)
        self.assertAlmostEqual(reduction_ratio(ahpd, wilson), -100.0 / 3.0)
        self.assertEqual(reduction_ratio(wilson, wilson), 0.0)
        self.assertRaises(DomainError, reduction_ratio, wilson, ahpd,
                          'entities')
        self.assertRaises(DomainError, reduction_ratio,
                          self._summary('wald', 0.0, 0.0), ahpd)

    def test_alpha_sweep(self):
        """test kgaccuracy.bench.alpha_sweep"""
        config = EvalConfig()
        rows = alpha_sweep(self.kg, config, [0.05, 0.1], 3, 4,
                           dataset='syn')
        self.assertEqual([row.alpha for row in rows], [0.05, 0.1])
        self.assertEqual(config.alpha, 0.05)
        self.assertEqual(config.method, AHPD)
        for row in rows:
            self.assertEqual(row.baseline.method, WILSON)
            self.assertEqual(row.method.method, AHPD)
            self.assertEqual(row.baseline.alpha, row.alpha)
            self.assertEqual(row.ratio,
                             reduction_ratio(row.baseline, row.method))
        self.assertEqual(rows[1].baseline,
                         replicate(self.kg,
                                   EvalConfig(alpha=0.1, method=WILSON), 3,
                                   4, dataset='syn'))
        self.assertEqual(rows[1].method,
                         replicate(self.kg, EvalConfig(alpha=0.1), 3, 4,
                                   dataset='syn'))

        wald_rows = alpha_sweep(self.kg, EvalConfig(method=HPD), [0.1], 2, 4,
                                baseline=WALD)
        self.assertEqual(wald_rows[0].baseline.method, WALD)
        self.assertRaises(ConfigError, alpha_sweep, self.kg, config, [0.05],
                          2, 4, baseline=HPD)
        self.assertRaises(ConfigError, alpha_sweep, self.kg, config, [], 2,
                          4)

    def test_write_sweep(self):
        """test kgaccuracy.bench.write_sweep"""
        rows = alpha_sweep(self.kg, EvalConfig(), [0.1], 2, 1)
        path = os.path.join(self.tmpdir, 'sweep.csv')
        write_sweep(rows, path)
        with io.open(path, encoding='utf-8') as infile:
            table = list(csv.reader(infile))
        self.assertEqual(table[0], SWEEP_COLUMNS)
        self.assertEqual(table[1][:3], ['0.1', 'wilson', 'ahpd'])
        self.assertAlmostEqual(float(table[1][5]), rows[0].ratio, places=2)
        self.assertRaises(DomainError, write_sweep, [], path)


class PriorWidthTestCases(unittest.TestCase):
    """test cases for the expected width study in kgaccuracy.bench"""
    def test_binomial_weights(self):
        """test kgaccuracy.bench.binomial_weights"""
        for mu in (0.01, 0.3, 0.5, 0.99):
            self.assertAlmostEqual(sum(binomial_weights(30, mu)), 1.0,
                                   places=12)
        for weight, expected in zip(binomial_weights(2, 0.5),
                                    (0.25, 0.5, 0.25)):
            self.assertAlmostEqual(weight, expected, places=14)

    def test_binomial_weights_large_n(self):
        """test kgaccuracy.bench.binomial_weights beyond float range"""
        weights = binomial_weights(2000, 0.9)
        self.assertEqual(len(weights), 2001)
        self.assertTrue(all(math.isfinite(w) and w >= 0.0 for w in weights))
        self.assertAlmostEqual(math.fsum(weights), 1.0, places=10)
        self.assertEqual(max(range(2001), key=weights.__getitem__), 1800)
        self.assertEqual(binomial_weights(3, 0.0), [1.0, 0.0, 0.0, 0.0])
        self.assertEqual(binomial_weights(3, 1.0), [0.0, 0.0, 0.0, 1.0])

    def test_expected_width_large_n(self):
        """test kgaccuracy.bench.expected_width with many annotations"""
        uniform = NAMED_PRIORS['uniform']
        small = expected_width(uniform, 30, 0.05, [0.5, 0.9], HPD)
        large = expected_width(uniform, 2000, 0.05, [0.5, 0.9], HPD)
        for narrow, wide in zip(large, small):
            self.assertTrue(math.isfinite(narrow))
            self.assertLess(narrow, wide)
        # about 2 z sqrt(mu (1 - mu) / n)
        self.assertAlmostEqual(large[0], 0.0438, places=3)
        self.assertAlmostEqual(large[1], 0.0263, places=3)

    def test_expected_width_hpd_not_wider(self):
        """test kgaccuracy.bench.expected_width of HPD never exceeds ET"""
        grid = default_mu_grid(0.05)
        for name in ('kerman', 'jeffreys', 'uniform'):
            prior = NAMED_PRIORS[name]
            hpd = expected_width(prior, 30, 0.05, grid, HPD)
            et = expected_width(prior, 30, 0.05, grid, ET)
            for mu, hpd_width, et_width in zip(grid, hpd, et):
                self.assertLessEqual(hpd_width, et_width + 1e-12,
                                     msg='%s at mu=%r' % (name, mu))

    def test_default_mu_grid(self):
        """test kgaccuracy.bench.default_mu_grid"""
        grid = default_mu_grid()
        self.assertEqual(len(grid), 99)
        self.assertEqual((grid[0], grid[49], grid[-1]), (0.01, 0.5, 0.99))

    def test_expected_width(self):
        """test kgaccuracy.bench.expected_width"""
        uniform = NAMED_PRIORS['uniform']
        widths = expected_width(uniform, 1, 0.05, [0.0, 1.0], HPD)
        self.assertAlmostEqual(widths[0], credible_interval(
            HPD, BetaParams(1, 2), 0.05).width)
        self.assertAlmostEqual(widths[1], credible_interval(
            HPD, BetaParams(2, 1), 0.05).width)
        self.assertAlmostEqual(widths[0], widths[1])
        self.assertRaises(DomainError, expected_width, uniform, 0, 0.05,
                          [0.5], HPD)
        self.assertRaises(DomainError, expected_width, uniform, 5, 0.05,
                          [0.5], WALD)

    def test_prior_width_table(self):
        """test kgaccuracy.bench.prior_width_table"""
        table = prior_width_table(['kerman', 'jeffreys', 'uniform'], 30,
                                  0.05, HPD)
        self.assertEqual(table.names, ['kerman', 'jeffreys', 'uniform'])
        self.assertEqual(len(table.mu_grid), 99)
        self.assertTrue(all(len(table.widths[name]) == 99
                            for name in table.names))
        self.assertEqual(minimal_prior_at(table, 0.5), 'uniform')
        self.assertEqual(minimal_prior_at(table, 0.05), 'kerman')
        self.assertEqual(minimal_prior_at(table, 0.95), 'kerman')
        self.assertTrue(jeffreys_dominated(table))

        # symmetric priors give widths symmetric in mu
        for i in range(99):
            self.assertAlmostEqual(table.widths['uniform'][i],
                                   table.widths['uniform'][98 - i], places=6)

        narrow = prior_width_table(['jeffreys'], 30, 0.05, HPD)
        self.assertRaises(DomainError, jeffreys_dominated, narrow)


if __name__ == '__main__':
    unittest.main()
