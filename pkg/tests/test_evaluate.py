# -*- coding: utf-8 -*-
"""test_evaluate

This module contains unit tests for kgaccuracy.evaluate

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
import os
import shutil
import tempfile
import unittest

import numpy as np

from kgaccuracy.annotate import AnnotationAdapter, OracleAnnotator
from kgaccuracy.data import NAMED_PRIORS
from kgaccuracy.errors import AnnotationAbortedError, ConfigError, DomainError
from kgaccuracy.evaluate import (AHPD, ANNOTATION_ABORTED, BUDGET_EXHAUSTED,
                                 CONVERGED, POPULATION_EXHAUSTED, EvalConfig,
                                 annotation_cost, candidate_intervals,
                                 prior_label, resolve_prior, run_evaluation,
                                 select_interval, write_trace)
from kgaccuracy.intervals import ET, HPD, WALD, WILSON, IntervalEstimate
from kgaccuracy.kgstore import generate_synthetic, load_tsv
from kgaccuracy.sampling import TWCS, EstimateWithVariance
from kgaccuracy.special import BetaParams

from . import data_path


class CountingAnnotator(AnnotationAdapter):
    """Oracle that records how many facts it was asked about."""
    def __init__(self, kg):
        self.oracle = OracleAnnotator(kg)
        self.asked = []

    def label(self, batch):
        self.asked.extend(fact.index for fact in batch)
        return self.oracle.label(batch)


class ClosingAnnotator(AnnotationAdapter):
    """Answers the first batch, then reports a closed channel."""
    def __init__(self, kg):
        self.oracle = OracleAnnotator(kg)
        self.calls = 0

    def label(self, batch):
        self.calls += 1
        if self.calls > 1:
            raise AnnotationAbortedError('closed')
        return self.oracle.label(batch)


class PriorTestCases(unittest.TestCase):
    """test cases for kgaccuracy.evaluate prior helpers"""
    def test_resolve_prior(self):
        """test kgaccuracy.evaluate.resolve_prior"""
        self.assertEqual(resolve_prior('Kerman'), NAMED_PRIORS['kerman'])
        self.assertEqual(resolve_prior('80:20'), BetaParams(80, 20))
        self.assertEqual(resolve_prior(BetaParams(2, 3)), BetaParams(2, 3))
        self.assertRaises(ConfigError, resolve_prior, 'haldane')
        self.assertRaises(ConfigError, resolve_prior, 'a:b')

    def test_prior_label(self):
        """test kgaccuracy.evaluate.prior_label"""
        self.assertEqual(prior_label(NAMED_PRIORS['jeffreys']), 'jeffreys')
        self.assertEqual(prior_label(BetaParams(80, 20)), '80:20')


class EvalConfigTestCases(unittest.TestCase):
    """test cases for kgaccuracy.evaluate.EvalConfig"""
    def test_defaults(self):
        """test kgaccuracy.evaluate.EvalConfig defaults"""
        config = EvalConfig()
        self.assertEqual(config.method, AHPD)
        self.assertEqual(config.interval_method, HPD)
        self.assertEqual(config.priors, [NAMED_PRIORS['kerman'],
                                         NAMED_PRIORS['jeffreys'],
                                         NAMED_PRIORS['uniform']])
        self.assertEqual((config.initial_batch, config.step_batch), (30, 1))
        self.assertEqual((config.c1, config.c2), (45.0, 25.0))

        self.assertEqual(EvalConfig(method=ET).priors,
                         [NAMED_PRIORS['uniform']])
        self.assertEqual(EvalConfig(method=WILSON).priors, [])
        twcs = EvalConfig(sampling=TWCS)
        self.assertEqual((twcs.initial_batch, twcs.step_batch, twcs.m),
                         (10, 1, 3))
        self.assertEqual(twcs.to_dict()['priors'],
                         ['kerman', 'jeffreys', 'uniform'])

    def test_validate(self):
        """test kgaccuracy.evaluate.EvalConfig.validate"""
        self.assertRaises(ConfigError, EvalConfig(epsilon=0.5).validate)
        self.assertRaises(ConfigError, EvalConfig(epsilon=0.0).validate)
        self.assertRaises(ConfigError, EvalConfig(alpha=1.0).validate)
        self.assertRaises(ConfigError, EvalConfig(priors=[]).validate)
        self.assertRaises(ConfigError,
                          EvalConfig(method=HPD,
                                     priors=['kerman', 'uniform']).validate)
        self.assertRaises(ConfigError,
                          EvalConfig(method=WALD, priors=['uniform']).validate)
        self.assertRaises(ConfigError, EvalConfig(sampling='strata').validate)
        self.assertRaises(ConfigError, EvalConfig(method='bootstrap').validate)
        self.assertRaises(ConfigError, EvalConfig(m=0).validate)
        self.assertRaises(ConfigError,
                          EvalConfig(max_annotations=0).validate)
        config = EvalConfig(method=ET, priors=['jeffreys'])
        self.assertIs(config.validate(), config)


class CostTestCases(unittest.TestCase):
    """test cases for kgaccuracy.evaluate.annotation_cost"""
    def test_annotation_cost(self):
        """test kgaccuracy.evaluate.annotation_cost"""
        self.assertEqual(annotation_cost(10, 30, 45, 25), 1200)
        self.assertAlmostEqual(annotation_cost(10, 30) / 3600.0, 1.0 / 3.0)
        self.assertEqual(annotation_cost(0, 0), 0)
        self.assertEqual(annotation_cost(1, 1, 45, 25), 70)
        self.assertRaises(DomainError, annotation_cost, -1, 0)


class SelectionTestCases(unittest.TestCase):
    """test cases for kgaccuracy.evaluate candidate selection"""
    def test_select_interval(self):
        """test kgaccuracy.evaluate.select_interval"""
        first = IntervalEstimate(0.1, 0.5, HPD)
        second = IntervalEstimate(0.25, 0.5, HPD)
        tie = IntervalEstimate(0.5, 0.75, HPD)
        self.assertIs(select_interval([first, second]), second)
        self.assertIs(select_interval([second, tie]), second)
        self.assertIs(select_interval([first]), first)

    def test_candidate_intervals(self):
        """test kgaccuracy.evaluate.candidate_intervals"""
        estimate = EstimateWithVariance(0.9, 0.003, 30.0, 27.0)
        candidates = candidate_intervals(estimate, EvalConfig())
        self.assertEqual([c.prior for c in candidates],
                         EvalConfig().priors)
        self.assertTrue(all(c.method == HPD for c in candidates))
        candidates = candidate_intervals(estimate, EvalConfig(method=WALD))
        self.assertEqual(len(candidates), 1)
        self.assertIsNone(candidates[0].prior)


class RunEvaluationTestCases(unittest.TestCase):
    """test cases for kgaccuracy.evaluate.run_evaluation"""
    def test_all_correct_wald(self):
        """test kgaccuracy.evaluate.run_evaluation halts on a zero-width
        Wald interval"""
        kg = generate_synthetic(300, 2.0, 1.0, 3)
        config = EvalConfig(method=WALD)
        report = run_evaluation(kg, config, OracleAnnotator(kg),
                                np.random.default_rng(1))
        self.assertTrue(report.converged)
        self.assertEqual(report.n_triples, 30)
        self.assertEqual(report.iterations, 1)
        self.assertEqual((report.interval.lower, report.interval.upper),
                         (1.0, 1.0))
        self.assertEqual(report.mu_hat, 1.0)
        self.assertEqual(report.cost_seconds,
                         annotation_cost(report.n_entities, 30))

    def test_loose_epsilon(self):
        """test kgaccuracy.evaluate.run_evaluation stops after one batch"""
        kg = generate_synthetic(300, 2.0, 0.5, 3)
        config = EvalConfig(method=ET, epsilon=0.49)
        report = run_evaluation(kg, config, OracleAnnotator(kg),
                                np.random.default_rng(2))
        self.assertEqual(report.stop_reason, CONVERGED)
        self.assertEqual(report.iterations, 1)
        self.assertEqual(report.n_triples, 30)

    def test_ahpd(self):
        """test kgaccuracy.evaluate.run_evaluation with aHPD"""
        kg = generate_synthetic(800, 2.3, 0.91, 5)
        report = run_evaluation(kg, EvalConfig(), OracleAnnotator(kg),
                                np.random.default_rng(7))
        self.assertTrue(report.converged)
        self.assertLessEqual(report.moe, 0.05)
        self.assertGreaterEqual(report.n_triples, 30)
        self.assertIn(report.interval.prior, EvalConfig().priors)
        self.assertEqual(report.iterations, len(report.trace))
        self.assertEqual(report.n_triples, report.trace[-1].n)
        for record in report.trace:
            self.assertEqual(len(record.candidates), 3)
            widths = [c.upper - c.lower for c in record.candidates]
            chosen = [c for c in record.candidates
                      if c.label == record.chosen][0]
            self.assertEqual(chosen.upper - chosen.lower, min(widths))
        for record in report.trace[:-1]:
            self.assertGreater(record.moe, 0.05)

    def test_reproducible(self):
        """test kgaccuracy.evaluate.run_evaluation is seeded"""
        kg = generate_synthetic(500, 2.0, 0.8, 9)
        config = EvalConfig(method=HPD, priors=['kerman'])
        first = run_evaluation(kg, config, OracleAnnotator(kg),
                               np.random.default_rng(3))
        second = run_evaluation(kg, config, OracleAnnotator(kg),
                                np.random.default_rng(3))
        self.assertEqual(first.to_dict(with_trace=True),
                         second.to_dict(with_trace=True))

    def test_twcs(self):
        """test kgaccuracy.evaluate.run_evaluation with TWCS"""
        kg = generate_synthetic(600, 3.0, 0.9, 5)
        annotator = CountingAnnotator(kg)
        config = EvalConfig(sampling=TWCS)
        report = run_evaluation(kg, config, annotator,
                                np.random.default_rng(11))
        self.assertTrue(report.converged)
        self.assertLessEqual(report.moe, 0.05)
        self.assertEqual(len(annotator.asked), len(set(annotator.asked)))
        self.assertEqual(report.n_triples, len(annotator.asked))
        self.assertGreaterEqual(report.design_effect, 0.5)
        self.assertLessEqual(report.n_entities, report.n_triples)

    def test_population_exhausted(self):
        """test kgaccuracy.evaluate.run_evaluation on a small graph"""
        kg = load_tsv(data_path('tiny_kg.tsv'))
        config = EvalConfig(method=WILSON, epsilon=0.01)
        report = run_evaluation(kg, config, OracleAnnotator(kg),
                                np.random.default_rng(0))
        self.assertEqual(report.stop_reason, POPULATION_EXHAUSTED)
        self.assertFalse(report.converged)
        self.assertEqual(report.n_triples, 6)
        self.assertEqual(report.n_entities, 3)
        self.assertAlmostEqual(report.mu_hat, 5.0 / 6.0)

    def test_budget(self):
        """test kgaccuracy.evaluate.run_evaluation with max_annotations"""
        kg = generate_synthetic(1000, 2.4, 0.54, 2)
        config = EvalConfig(epsilon=0.01, max_annotations=40)
        report = run_evaluation(kg, config, OracleAnnotator(kg),
                                np.random.default_rng(0))
        self.assertEqual(report.stop_reason, BUDGET_EXHAUSTED)
        self.assertEqual(report.n_triples, 40)
        self.assertEqual(report.iterations, 11)

    def test_annotation_aborted(self):
        """test kgaccuracy.evaluate.run_evaluation when labels stop"""
        kg = generate_synthetic(1000, 2.4, 0.54, 2)
        report = run_evaluation(kg, EvalConfig(epsilon=0.01),
                                ClosingAnnotator(kg),
                                np.random.default_rng(0))
        self.assertEqual(report.stop_reason, ANNOTATION_ABORTED)
        self.assertEqual(report.n_triples, 30)
        self.assertEqual(report.iterations, 1)
        self.assertIsNotNone(report.interval)

    def test_report(self):
        """test kgaccuracy.evaluate.EvalReport serialization"""
        kg = generate_synthetic(300, 2.0, 1.0, 3)
        report = run_evaluation(kg, EvalConfig(method=WALD),
                                OracleAnnotator(kg),
                                np.random.default_rng(1))
        record = report.to_dict()
        self.assertEqual(record['interval']['lower'], 1.0)
        self.assertTrue(record['converged'])
        self.assertNotIn('trace', record)
        self.assertIn('status=converged', report.summary())
        self.assertIn('[1.0000, 1.0000]', report.summary())


class TraceTestCases(unittest.TestCase):
    """test cases for kgaccuracy.evaluate.write_trace"""
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_write_trace(self):
        """test kgaccuracy.evaluate.write_trace"""
        kg = generate_synthetic(500, 2.0, 0.85, 4)
        report = run_evaluation(kg, EvalConfig(), OracleAnnotator(kg),
                                np.random.default_rng(5))
        path = os.path.join(self.tmpdir, 'trace.csv')
        write_trace(report, path)
        with io.open(path, encoding='utf-8') as infile:
            rows = list(csv.reader(infile))
        self.assertEqual(rows[0][:7], ['iteration', 'n', 'tau', 'n_entities',
                                       'mu_hat', 'chosen', 'moe'])
        self.assertIn('hpd:kerman_lower', rows[0])
        self.assertEqual(len(rows), len(report.trace) + 1)


if __name__ == '__main__':
    unittest.main()
