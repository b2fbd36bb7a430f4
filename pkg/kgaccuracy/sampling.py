# -*- coding: utf-8 -*-
"""kgaccuracy.sampling

Simple random sampling (SRS) and two-stage weighted cluster sampling (TWCS)
of knowledge-graph triples, with their accuracy estimators.

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

from collections import namedtuple

import numpy as np

from .errors import EstimationError, PopulationExhaustedError, require

SRS = 'srs'
TWCS = 'twcs'
DESIGNS = (SRS, TWCS)

DEFF_FLOOR = 0.5

ClusterDraw = namedtuple('ClusterDraw', ['cluster_id', 'triple_indices'])

EstimateWithVariance = namedtuple(
    'EstimateWithVariance',
    ['mu_hat', 'variance', 'effective_n', 'effective_tau', 'design_effect'],
    defaults=(1.0,))


class ClusterGroup(namedtuple('ClusterGroup',
                              ['cluster_id', 'size', 'correct'])):
    """One second-stage TWCS sub-sample: drawn size min(M_i, m) and the
    number of correct triples in it.
    """
    __slots__ = ()

    @property
    def proportion(self):
        return self.correct / float(self.size)


class AnnotatedSample(object):
    """Annotations accumulated over the iterations of one evaluation.

    Keyword arguments:
    design -- 'srs' or 'twcs'; only TWCS samples keep cluster groups
    """
    def __init__(self, design=SRS):
        require(design in DESIGNS, 'unknown sampling design %r' % (design,))
        self.design = design
        self.entries = []
        self.distinct_entities = set()
        self.tau = 0
        self.cluster_groups = [] if design == TWCS else None

    @property
    def n(self):
        return len(self.entries)

    @property
    def n_clusters(self):
        if self.cluster_groups is None:
            return 0
        return len(self.cluster_groups)

    def _add(self, indices, subjects, labels):
        require(len(indices) == len(labels) == len(subjects),
                'indices, subjects and labels must have equal length')
        correct = 0
        for index, subject, label in zip(indices, subjects, labels):
            require(label in (0, 1), 'labels must be 0 or 1, got %r' %
                    (label,))
            self.entries.append((int(index), int(label)))
            self.distinct_entities.add(subject)
            correct += int(label)
        self.tau += correct
        return correct

    def add_triples(self, indices, subjects, labels):
        """Merge a batch of individually drawn triples."""
        self._add(indices, subjects, labels)

    def add_cluster(self, cluster_id, indices, subjects, labels):
        """Merge the second-stage sub-sample of one selected cluster."""
        require(self.design == TWCS, 'cluster groups need a TWCS sample')
        require(len(indices) >= 1, 'a cluster sub-sample is never empty')
        correct = self._add(indices, subjects, labels)
        self.cluster_groups.append(ClusterGroup(int(cluster_id),
                                                len(indices), correct))


def srs_draw(kg, batch, already_drawn, rng):
    """Draw batch triple indices uniformly, without replacement, from the
    triples not yet in already_drawn. already_drawn is updated in place.

    Keyword arguments:
    kg -- the KnowledgeGraph
    batch -- number of triples to draw, >= 1
    already_drawn -- set of previously drawn triple indices
    rng -- numpy Generator
    """
    require(batch >= 1, 'batch must be at least 1')
    total = len(kg)
    remaining = total - len(already_drawn)
    if batch > remaining:
        raise PopulationExhaustedError(
            'cannot draw %d triples, only %d remain undrawn' %
            (batch, remaining))

    chosen = []
    if 2 * len(already_drawn) <= total:
        seen = set()
        while len(chosen) < batch:
            for candidate in rng.integers(0, total, size=batch - len(chosen)):
                candidate = int(candidate)
                if candidate not in already_drawn and candidate not in seen:
                    seen.add(candidate)
                    chosen.append(candidate)
    else:
        drawn = np.fromiter(already_drawn, dtype=np.int64,
                            count=len(already_drawn))
        pool = np.setdiff1d(np.arange(total, dtype=np.int64), drawn,
                            assume_unique=True)
        chosen = [int(i) for i in rng.choice(pool, size=batch, replace=False)]
    already_drawn.update(chosen)
    return chosen


def twcs_draw(kg, n_clusters, m, rng):
    """Draw n_clusters cluster sub-samples by two-stage weighted cluster
    sampling.

    Clusters are selected with replacement with probability M_i / M; each
    selection then gets its own draw of min(M_i, m) of the cluster's triples
    without replacement.

    Keyword arguments:
    kg -- the KnowledgeGraph
    n_clusters -- number of first-stage selections, >= 1
    m -- second-stage size, >= 1
    rng -- numpy Generator
    """
    require(n_clusters >= 1, 'n_clusters must be at least 1')
    require(m >= 1, 'm must be at least 1')
    ranks = rng.integers(0, len(kg), size=n_clusters)
    cluster_ids = kg.locate_many(ranks)
    draws = []
    for cluster_id in cluster_ids:
        members = kg.cluster_members(cluster_id)
        take = min(int(members.size), m)
        picked = rng.choice(members, size=take, replace=False)
        draws.append(ClusterDraw(int(cluster_id), [int(i) for i in picked]))
    return draws


def estimate_srs(sample):
    """Return the sample proportion tau/n and its variance."""
    if sample.n < 1:
        raise EstimationError('cannot estimate accuracy from an empty sample')
    mu_hat = sample.tau / float(sample.n)
    variance = mu_hat * (1.0 - mu_hat) / sample.n
    return EstimateWithVariance(mu_hat, variance, float(sample.n),
                                float(sample.tau))


def estimate_twcs(sample):
    """Return the mean of the cluster proportions and its with-replacement
    variance sum((p_i - mu)^2) / (n_C (n_C - 1)).

    The effective counts are the raw counts; see design_effect_adjust.
    """
    if sample.cluster_groups is None:
        raise EstimationError('TWCS estimation needs cluster groups')
    n_c = len(sample.cluster_groups)
    if n_c <= 1:
        raise EstimationError('TWCS variance needs at least two cluster '
                              'groups, got %d' % n_c)
    proportions = np.array([group.proportion
                            for group in sample.cluster_groups])
    mu_hat = float(np.mean(proportions))
    variance = float(np.var(proportions, ddof=1)) / n_c
    return EstimateWithVariance(mu_hat, variance, float(sample.n),
                                mu_hat * sample.n)


def design_effect(mu_hat, variance, n, floor=DEFF_FLOOR):
    """Return the ratio of a design's variance to the SRS variance of an
    equal-size sample, floored at floor; 1 when the SRS variance is zero.
    """
    srs_variance = mu_hat * (1.0 - mu_hat) / n
    if srs_variance <= 0.0:
        return 1.0
    return max(variance / srs_variance, floor)


def design_effect_adjust(sample, floor=DEFF_FLOOR):
    """Return the TWCS estimate with design-effect-adjusted effective counts.

    effective_n = n / deff and effective_tau = mu_hat * effective_n; both
    stay real-valued.
    """
    estimate = estimate_twcs(sample)
    deff = design_effect(estimate.mu_hat, estimate.variance, sample.n, floor)
    effective_n = sample.n / deff
    return estimate._replace(effective_n=effective_n,
                             effective_tau=estimate.mu_hat * effective_n,
                             design_effect=deff)
