# -*- coding: utf-8 -*-
"""kgaccuracy.kgstore

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
from collections import namedtuple

import numpy as np

from .data import DATASET_PROFILES
from .errors import (EmptyGraphError, MissingLabelError, ParseError,
                     require)
from .util import verbose_print

UNLABELED = -1

Triple = namedtuple('Triple', ['subject', 'predicate', 'object', 'label'])

# The unlabeled view of a triple handed to annotators.
Fact = namedtuple('Fact', ['index', 'subject', 'predicate', 'object'])

EntityCluster = namedtuple('EntityCluster', ['entity', 'triple_refs', 'size'])

GraphStatistics = namedtuple('GraphStatistics',
                             ['facts', 'clusters', 'avg_cluster_size',
                              'accuracy'])


class KnowledgeGraph(object):
    """An immutable population of triples partitioned into entity clusters.

    Triples are stored column-wise. Each triple carries the id of its
    cluster (its subject); labels are an int8 array holding 1, 0, or
    UNLABELED.

    Keyword arguments:
    entities -- list of subject identifiers, one per cluster, in cluster order
    triple_cluster -- sequence of cluster ids, one per triple
    labels -- sequence of 1/0/UNLABELED, one per triple
    predicates -- list of predicate identifiers, or None for synthetic graphs
    objects -- list of object identifiers, or None for synthetic graphs
    """
    def __init__(self, entities, triple_cluster, labels, predicates=None,
                 objects=None):
        self.entities = list(entities)
        self.triple_cluster = np.asarray(triple_cluster, dtype=np.int64)
        self.labels = np.asarray(labels, dtype=np.int8)
        self.predicates = predicates
        self.objects = objects

        if self.triple_cluster.size == 0:
            raise EmptyGraphError('empty knowledge graph')
        require(self.labels.shape == self.triple_cluster.shape,
                'one label per triple is required')
        require(predicates is None or len(predicates) == len(self),
                'one predicate per triple is required')
        require(objects is None or len(objects) == len(self),
                'one object per triple is required')

        self.cluster_sizes = np.bincount(self.triple_cluster,
                                         minlength=len(self.entities))
        require(len(self.cluster_sizes) == len(self.entities) and
                bool(np.all(self.cluster_sizes >= 1)),
                'every entity cluster must hold at least one triple')
        self.cluster_size_prefix_sums = np.cumsum(self.cluster_sizes)
        self._members = np.argsort(self.triple_cluster, kind='stable')
        self._offsets = np.concatenate(([0], self.cluster_size_prefix_sums))

    def __len__(self):
        return int(self.triple_cluster.size)

    @property
    def total_size(self):
        return len(self)

    @property
    def n_clusters(self):
        return len(self.entities)

    @property
    def fully_labeled(self):
        return not bool(np.any(self.labels == UNLABELED))

    def subject(self, index):
        return self.entities[self.triple_cluster[index]]

    def predicate(self, index):
        if self.predicates is None:
            start = self._offsets[self.triple_cluster[index]]
            return 'p' + str(int(index - start))
        return self.predicates[index]

    def object(self, index):
        if self.objects is None:
            return 'o' + str(int(index))
        return self.objects[index]

    def triple(self, index):
        label = int(self.labels[index])
        return Triple(self.subject(index), self.predicate(index),
                      self.object(index),
                      None if label == UNLABELED else label)

    def fact(self, index):
        """Return the unlabeled view of triple index."""
        index = int(index)
        return Fact(index, self.subject(index), self.predicate(index),
                    self.object(index))

    def triples(self):
        for index in range(len(self)):
            yield self.triple(index)

    def cluster(self, cluster_id):
        start = self._offsets[cluster_id]
        stop = self._offsets[cluster_id + 1]
        refs = self._members[start:stop]
        return EntityCluster(self.entities[cluster_id], refs, int(refs.size))

    def clusters(self):
        for cluster_id in range(self.n_clusters):
            yield self.cluster(cluster_id)

    def cluster_members(self, cluster_id):
        """Return the triple indices of a cluster as an int array."""
        return self._members[self._offsets[cluster_id]:
                             self._offsets[cluster_id + 1]]

    def locate(self, rank):
        """Return the id of the cluster holding global triple rank.

        Ranks enumerate triples cluster by cluster, so rank r belongs to the
        first cluster whose prefix sum exceeds r.
        """
        require(0 <= rank < len(self), 'rank %r outside [0, %d)' %
                (rank, len(self)))
        return int(self.locate_many([rank])[0])

    def locate_many(self, ranks):
        """Vectorized locate: return the cluster ids of an array of ranks."""
        ranks = np.asarray(ranks, dtype=np.int64)
        require(ranks.size == 0 or
                (int(ranks.min()) >= 0 and int(ranks.max()) < len(self)),
                'ranks must lie in [0, %d)' % (len(self),))
        return np.searchsorted(self.cluster_size_prefix_sums, ranks,
                               side='right')

    def __eq__(self, other):
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return (len(self) == len(other) and
                self.entities == other.entities and
                bool(np.array_equal(self.triple_cluster,
                                    other.triple_cluster)) and
                bool(np.array_equal(self.labels, other.labels)) and
                all(self.predicate(i) == other.predicate(i) and
                    self.object(i) == other.object(i)
                    for i in range(len(self))))

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    __hash__ = None


def _parse_label(field, path, line_number):
    field = field.strip()
    if field == '':
        return UNLABELED
    if field not in ('0', '1'):
        raise ParseError('label must be 0 or 1, got %r' % field, path,
                         line_number)
    return int(field)


def load_tsv(path, verbose=False):
    """Read a knowledge graph from a subject/predicate/object[/label] TSV.

    Clusters are formed by subject in order of first appearance. Blank lines
    and lines starting with '#' are skipped.

    Keyword arguments:
    path -- the dataset file, UTF-8 encoded
    verbose -- report progress
    """
    verbose_print('Loading: ' + str(path), verbose)
    entity_ids = dict()
    entities = list()
    triple_cluster = list()
    predicates = list()
    objects = list()
    labels = list()

    with codecs.open(path, 'r', 'utf-8') as infile:
        for line_number, line in enumerate(infile, 1):
            line = line.rstrip('\r\n')
            if not line.strip() or line.startswith('#'):
                continue
            fields = line.split('\t')
            if len(fields) < 3:
                raise ParseError('expected at least 3 tab-separated fields, '
                                 'found %d' % len(fields), path, line_number)
            if len(fields) > 4:
                raise ParseError('expected at most 4 tab-separated fields, '
                                 'found %d' % len(fields), path, line_number)
            subject, predicate, obj = fields[0], fields[1], fields[2]
            label = UNLABELED
            if len(fields) == 4:
                label = _parse_label(fields[3], path, line_number)
            if subject not in entity_ids:
                entity_ids[subject] = len(entities)
                entities.append(subject)
            triple_cluster.append(entity_ids[subject])
            predicates.append(predicate)
            objects.append(obj)
            labels.append(label)

    if not triple_cluster:
        raise EmptyGraphError('empty knowledge graph: ' + str(path))
    kg = KnowledgeGraph(entities, triple_cluster, labels, predicates, objects)
    verbose_print('Loaded %d triples in %d entity clusters' %
                  (len(kg), kg.n_clusters), verbose)
    return kg


def write_tsv(kg, path):
    """Write kg in the load_tsv schema; unlabeled triples get no 4th field.

    Triples are written in index order, so reloading reproduces the same
    triple indices and the same first-appearance cluster order.
    """
    with codecs.open(path, 'w', 'utf-8') as outfile:
        for triple in kg.triples():
            fields = [triple.subject, triple.predicate, triple.object]
            if triple.label is not None:
                fields.append(str(triple.label))
            outfile.write('\t'.join(fields) + '\n')


def generate_synthetic(n_clusters, mean_cluster_size, mu, seed,
                       size_law='geometric', icc=0.0):
    """Build a synthetic labeled knowledge graph.

    Cluster sizes follow a geometric law on {1, 2, ...} with the requested
    mean (or are all equal to round(mean) for size_law='constant'). With
    icc = 0 every triple is correct with probability mu independently.
    With icc > 0 each cluster first draws its own accuracy from
    Beta(mu (1 - icc) / icc, (1 - mu) (1 - icc) / icc), whose mean is mu,
    and its triples are correct with that probability; icc is then the
    intra-cluster correlation of the labels.

    Keyword arguments:
    n_clusters -- number of entity clusters, >= 1
    mean_cluster_size -- mean triples per cluster, >= 1
    mu -- probability that a triple is correct
    seed -- seed of the numpy generator
    size_law -- 'geometric' or 'constant'
    icc -- intra-cluster correlation of the labels, in [0, 1)
    """
    n_clusters = int(n_clusters)
    require(n_clusters >= 1, 'n_clusters must be at least 1')
    require(mean_cluster_size >= 1.0, 'mean_cluster_size must be at least 1')
    require(0.0 <= mu <= 1.0, 'mu must lie in [0, 1]')
    require(size_law in ('geometric', 'constant'),
            'unknown cluster size law %r' % (size_law,))
    require(0.0 <= icc < 1.0, 'icc must lie in [0, 1), got %r' % (icc,))

    rng = np.random.default_rng(seed)
    if size_law == 'constant':
        sizes = np.full(n_clusters, int(round(mean_cluster_size)),
                        dtype=np.int64)
    else:
        sizes = rng.geometric(1.0 / mean_cluster_size, size=n_clusters)
    triple_cluster = np.repeat(np.arange(n_clusters, dtype=np.int64), sizes)
    accuracy = mu
    if icc > 0.0 and 0.0 < mu < 1.0:
        scale = (1.0 - icc) / icc
        accuracy = np.repeat(rng.beta(mu * scale, (1.0 - mu) * scale,
                                      size=n_clusters), sizes)
    labels = (rng.random(triple_cluster.size) < accuracy).astype(np.int8)
    entities = ['e' + str(i) for i in range(n_clusters)]
    return KnowledgeGraph(entities, triple_cluster, labels)


def generate_like(profile, seed, mu=None, icc=0.0):
    """Build a synthetic stand-in with the published statistics of a dataset.

    Keyword arguments:
    profile -- key of data.DATASET_PROFILES ('yago', 'nell', ...)
    seed -- generator seed
    mu -- accuracy override (defaults to the profile's accuracy)
    icc -- intra-cluster correlation of the labels, see generate_synthetic
    """
    require(profile in DATASET_PROFILES,
            'unknown dataset profile %r' % (profile,))
    _, clusters, mean_size, accuracy = DATASET_PROFILES[profile]
    return generate_synthetic(clusters, mean_size,
                              accuracy if mu is None else mu, seed, icc=icc)


def true_accuracy(kg):
    """Return the proportion of correct triples of a fully labeled kg."""
    if not kg.fully_labeled:
        raise MissingLabelError('true accuracy needs every triple labeled')
    return float(np.mean(kg.labels))


def kg_statistics(kg):
    """Return facts, clusters, average cluster size and accuracy of kg.

    Accuracy is None unless every triple is labeled.
    """
    accuracy = true_accuracy(kg) if kg.fully_labeled else None
    return GraphStatistics(len(kg), kg.n_clusters,
                           len(kg) / float(kg.n_clusters), accuracy)
