# -*- coding: utf-8 -*-
"""kgaccuracy.evaluate

The iterative sample / annotate / estimate loop and its adaptive
multi-prior HPD variant (aHPD).

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
import csv
from collections import namedtuple

from .data import (DEFAULT_ALPHA, DEFAULT_BATCHES, DEFAULT_C1, DEFAULT_C2,
                   DEFAULT_EPSILON, DEFAULT_M, DEFAULT_PRIOR_NAMES,
                   NAMED_PRIORS)
from .errors import (AnnotationAbortedError, ConfigError, DomainError,
                     PopulationExhaustedError)
from .intervals import (CREDIBLE_METHODS, ET, HPD, WALD, WILSON,
                        build_interval)
from .sampling import (SRS, TWCS, AnnotatedSample, design_effect_adjust,
                       estimate_srs, estimate_twcs, srs_draw, twcs_draw)
from .special import BetaParams
from .util import format_bounds, verbose_print

AHPD = 'ahpd'
EVAL_METHODS = (WALD, WILSON, ET, HPD, AHPD)

CONVERGED = 'converged'
POPULATION_EXHAUSTED = 'population-exhausted'
BUDGET_EXHAUSTED = 'budget-exhausted'
ANNOTATION_ABORTED = 'annotation-aborted'

SECONDS_PER_HOUR = 3600.0

Candidate = namedtuple('Candidate', ['label', 'lower', 'upper'])

IterationRecord = namedtuple('IterationRecord',
                             ['iteration', 'n', 'tau', 'n_entities', 'mu_hat',
                              'candidates', 'chosen', 'moe'])


def resolve_prior(prior):
    """Return BetaParams for a prior name, an 'a:b' string or BetaParams."""
    if isinstance(prior, BetaParams):
        return prior
    text = str(prior).strip().lower()
    if text in NAMED_PRIORS:
        return NAMED_PRIORS[text]
    if ':' in text:
        a, _, b = text.partition(':')
        try:
            return BetaParams(float(a), float(b))
        except ValueError:
            pass
    raise ConfigError('unknown prior %r; use kerman, jeffreys, uniform or '
                      'a:b' % (prior,))


def prior_label(prior):
    """Return the name of a named prior, 'a:b' otherwise."""
    for name, params in NAMED_PRIORS.items():
        if params == prior:
            return name
    return '%g:%g' % (prior.a, prior.b)


class EvalConfig(object):
    """Settings of one evaluation run.

    Keyword arguments:
    alpha -- significance level of the intervals
    epsilon -- upper bound on the margin of error, in (0, 0.5)
    sampling -- 'srs' or 'twcs'
    m -- second-stage size of TWCS
    method -- 'wald', 'wilson', 'et', 'hpd' or 'ahpd'
    priors -- priors (names, 'a:b' strings or BetaParams); the credible
              methods default to uniform, aHPD to kerman, jeffreys, uniform
    initial_batch -- first batch, triples (SRS) or clusters (TWCS)
    step_batch -- later batches, same unit
    c1 -- seconds per entity identification
    c2 -- seconds per fact verification
    seed -- seed recorded for reproducibility
    max_annotations -- optional cap on annotated triples
    """
    def __init__(self, alpha=DEFAULT_ALPHA, epsilon=DEFAULT_EPSILON,
                 sampling=SRS, m=DEFAULT_M, method=AHPD, priors=None,
                 initial_batch=None, step_batch=None, c1=DEFAULT_C1,
                 c2=DEFAULT_C2, seed=0, max_annotations=None):
        self.alpha = alpha
        self.epsilon = epsilon
        self.sampling = sampling
        self.m = m
        self.method = method
        if priors is None:
            if method == AHPD:
                priors = DEFAULT_PRIOR_NAMES
            elif method in CREDIBLE_METHODS:
                priors = ('uniform',)
            else:
                priors = ()
        self.priors = [resolve_prior(prior) for prior in priors]
        default_initial, default_step = DEFAULT_BATCHES.get(sampling, (1, 1))
        self.initial_batch = (default_initial if initial_batch is None
                              else initial_batch)
        self.step_batch = default_step if step_batch is None else step_batch
        self.c1 = c1
        self.c2 = c2
        self.seed = seed
        self.max_annotations = max_annotations

    @property
    def interval_method(self):
        """The interval built for each candidate prior."""
        return HPD if self.method == AHPD else self.method

    def validate(self):
        """Raise ConfigError unless every setting is coherent."""
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError('alpha must lie in (0, 1)')
        if not 0.0 < self.epsilon < 0.5:
            raise ConfigError('epsilon must lie in (0, 0.5)')
        if self.sampling not in (SRS, TWCS):
            raise ConfigError('sampling must be srs or twcs')
        if self.method not in EVAL_METHODS:
            raise ConfigError('method must be one of ' +
                              ', '.join(EVAL_METHODS))
        if self.m < 1:
            raise ConfigError('m must be at least 1')
        if self.initial_batch < 1 or self.step_batch < 1:
            raise ConfigError('batch sizes must be at least 1')
        if self.c1 < 0 or self.c2 < 0:
            raise ConfigError('annotation costs must be non-negative')
        if self.max_annotations is not None and self.max_annotations < 1:
            raise ConfigError('max_annotations must be at least 1')
        if self.method == AHPD and not self.priors:
            raise ConfigError('aHPD needs at least one prior')
        if self.method in CREDIBLE_METHODS and len(self.priors) != 1:
            raise ConfigError('%s needs exactly one prior' % self.method)
        if self.method in (WALD, WILSON) and self.priors:
            raise ConfigError('priors only apply to credible intervals')
        return self

    def to_dict(self):
        return {
            'alpha': self.alpha,
            'epsilon': self.epsilon,
            'sampling': self.sampling,
            'm': self.m,
            'method': self.method,
            'priors': [prior_label(prior) for prior in self.priors],
            'initial_batch': self.initial_batch,
            'step_batch': self.step_batch,
            'c1': self.c1,
            'c2': self.c2,
            'seed': self.seed,
            'max_annotations': self.max_annotations,
        }


def annotation_cost(n_entities, n_triples, c1=DEFAULT_C1, c2=DEFAULT_C2):
    """Return the annotation cost in seconds: |E_S| c1 + |T_S| c2."""
    if n_entities < 0 or n_triples < 0:
        raise DomainError('annotation counts must be non-negative')
    return n_entities * c1 + n_triples * c2


class EvalReport(object):
    """Outcome of run_evaluation.

    interval is the halting interval (under aHPD, the winning prior is on
    interval.prior); trace holds one IterationRecord per estimate.
    """
    def __init__(self, mu_hat, interval, n_triples, n_entities, cost_seconds,
                 iterations, trace, stop_reason, design_effect=1.0):
        self.mu_hat = mu_hat
        self.interval = interval
        self.n_triples = n_triples
        self.n_entities = n_entities
        self.cost_seconds = cost_seconds
        self.iterations = iterations
        self.trace = trace
        self.stop_reason = stop_reason
        self.design_effect = design_effect

    @property
    def converged(self):
        return self.stop_reason == CONVERGED

    @property
    def cost_hours(self):
        return self.cost_seconds / SECONDS_PER_HOUR

    @property
    def moe(self):
        return None if self.interval is None else self.interval.moe

    def to_dict(self, with_trace=False):
        interval = None
        if self.interval is not None:
            interval = {
                'lower': self.interval.lower,
                'upper': self.interval.upper,
                'moe': self.interval.moe,
                'method': self.interval.method,
                'prior': (None if self.interval.prior is None
                          else prior_label(self.interval.prior)),
            }
        result = {
            'mu_hat': self.mu_hat,
            'interval': interval,
            'n_triples': self.n_triples,
            'n_entities': self.n_entities,
            'cost_seconds': self.cost_seconds,
            'cost_hours': self.cost_hours,
            'iterations': self.iterations,
            'converged': self.converged,
            'stop_reason': self.stop_reason,
        }
        if with_trace:
            result['trace'] = [record._asdict() for record in self.trace]
            for record in result['trace']:
                record['candidates'] = [c._asdict()
                                        for c in record['candidates']]
        return result

    def summary(self):
        """One-line human-readable summary."""
        if self.interval is None:
            bounds = 'no interval'
            moe = 'n/a'
        else:
            bounds = format_bounds(self.interval.lower, self.interval.upper)
            moe = '%.4f' % self.interval.moe
        mu_hat = 'n/a' if self.mu_hat is None else '%.4f' % self.mu_hat
        return ('mu_hat=%s interval=%s moe=%s triples=%d entities=%d '
                'cost=%.2fh iterations=%d status=%s' %
                (mu_hat, bounds, moe, self.n_triples, self.n_entities,
                 self.cost_hours, self.iterations, self.stop_reason))


def _candidate_label(interval):
    if interval.prior is None:
        return interval.method
    return interval.method + ':' + prior_label(interval.prior)


def _estimate(sample, config):
    """Return the design-appropriate estimate, or None while a TWCS sample
    has fewer than two cluster groups.
    """
    if config.sampling == SRS:
        return estimate_srs(sample)
    if sample.n_clusters < 2:
        return None
    if config.method == WALD:
        return estimate_twcs(sample)
    return design_effect_adjust(sample)


def candidate_intervals(estimate, config):
    """Build every interval the configured method competes on."""
    if config.method in (WALD, WILSON):
        return [build_interval(config.method, estimate, config.alpha)]
    # per-prior intervals are independent of each other
    return [build_interval(config.interval_method, estimate, config.alpha,
                           prior) for prior in config.priors]


def select_interval(candidates):
    """Return the narrowest candidate; ties go to the earliest."""
    chosen = candidates[0]
    for candidate in candidates[1:]:
        if candidate.width < chosen.width:
            chosen = candidate
    return chosen


class _Annotations(object):
    """Labels obtained so far, so a triple is never annotated twice."""

    def __init__(self, kg, annotator):
        self.kg = kg
        self.annotator = annotator
        self.known = dict()

    def labels_for(self, indices):
        missing = []
        for index in indices:
            if index not in self.known and index not in missing:
                missing.append(index)
        if missing:
            labels = self.annotator.label([self.kg.fact(i) for i in missing])
            if len(labels) != len(missing):
                raise DomainError('annotator returned %d labels for %d facts' %
                                  (len(labels), len(missing)))
            for index, label in zip(missing, labels):
                self.known[index] = int(label)
        return [self.known[index] for index in indices]


def _annotate_batch(kg, config, sample, drawn, batch, annotations, rng):
    if config.sampling == SRS:
        remaining = len(kg) - len(drawn)
        if remaining == 0:
            raise PopulationExhaustedError('every triple has been annotated')
        batch = min(batch, remaining)
        if config.max_annotations is not None:
            batch = min(batch, config.max_annotations - sample.n)
        indices = srs_draw(kg, batch, drawn, rng)
        labels = annotations.labels_for(indices)
        sample.add_triples(indices, [kg.subject(i) for i in indices], labels)
        return
    for draw in twcs_draw(kg, batch, config.m, rng):
        labels = annotations.labels_for(draw.triple_indices)
        sample.add_cluster(draw.cluster_id, draw.triple_indices,
                           [kg.subject(i) for i in draw.triple_indices],
                           labels)


def run_evaluation(kg, config, annotator, rng, verbose=False):
    """Estimate the accuracy of kg, annotating until MoE <= epsilon.

    Each iteration draws a batch (initial_batch first, step_batch after),
    obtains labels from annotator, updates the estimate and builds the
    configured interval(s); under aHPD the narrowest per-prior HPD interval
    is kept. Exhausting the population or the budget, or a closed
    annotation channel, ends the run with a non-converged report.

    Keyword arguments:
    kg -- the KnowledgeGraph under audit
    config -- EvalConfig
    annotator -- annotate.AnnotationAdapter
    rng -- numpy Generator
    verbose -- print one line per iteration
    """
    config.validate()
    sample = AnnotatedSample(config.sampling)
    annotations = _Annotations(kg, annotator)
    drawn = set()
    trace = []
    estimate = None
    interval = None
    iteration = 0

    while True:
        if (config.max_annotations is not None and
                sample.n >= config.max_annotations):
            stop_reason = BUDGET_EXHAUSTED
            break
        batch = config.initial_batch if iteration == 0 else config.step_batch
        try:
            _annotate_batch(kg, config, sample, drawn, batch, annotations,
                            rng)
        except PopulationExhaustedError:
            stop_reason = POPULATION_EXHAUSTED
            break
        except AnnotationAbortedError as error:
            verbose_print('Annotation aborted: ' + str(error), verbose)
            stop_reason = ANNOTATION_ABORTED
            break
        iteration += 1

        current = _estimate(sample, config)
        if current is None:
            continue
        estimate = current
        candidates = candidate_intervals(estimate, config)
        interval = select_interval(candidates)
        trace.append(IterationRecord(
            iteration, sample.n, sample.tau, len(sample.distinct_entities),
            estimate.mu_hat,
            [Candidate(_candidate_label(c), c.lower, c.upper)
             for c in candidates],
            _candidate_label(interval), interval.moe))
        verbose_print('iteration %d: n=%d tau=%d mu_hat=%.4f moe=%.4f (%s)' %
                      (iteration, sample.n, sample.tau, estimate.mu_hat,
                       interval.moe, _candidate_label(interval)), verbose)
        if interval.moe <= config.epsilon:
            stop_reason = CONVERGED
            break

    n_entities = len(sample.distinct_entities)
    n_triples = len(annotations.known)
    return EvalReport(
        None if estimate is None else estimate.mu_hat, interval, n_triples,
        n_entities, annotation_cost(n_entities, n_triples, config.c1,
                                    config.c2),
        iteration, trace, stop_reason,
        1.0 if estimate is None else estimate.design_effect)


def write_trace(report, path):
    """Write the per-iteration trace of report as CSV."""
    labels = []
    for record in report.trace:
        for candidate in record.candidates:
            if candidate.label not in labels:
                labels.append(candidate.label)
    header = ['iteration', 'n', 'tau', 'n_entities', 'mu_hat', 'chosen',
              'moe']
    for label in labels:
        header += [label + '_lower', label + '_upper']
    with codecs.open(path, 'w', 'utf-8') as outfile:
        writer = csv.writer(outfile, lineterminator='\n')
        writer.writerow(header)
        for record in report.trace:
            bounds = dict((c.label, c) for c in record.candidates)
            row = [record.iteration, record.n, record.tau, record.n_entities,
                   '%.6f' % record.mu_hat, record.chosen,
                   '%.6f' % record.moe]
            for label in labels:
                if label in bounds:
                    row += ['%.6f' % bounds[label].lower,
                            '%.6f' % bounds[label].upper]
                else:
                    row += ['', '']
            writer.writerow(row)
