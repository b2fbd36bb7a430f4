# -*- coding: utf-8 -*-
"""kgaccuracy.annotate

Annotation adapters: each turns a batch of facts into 0/1 correctness
labels, one per fact, in order.

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

import sys

from .errors import AnnotationAbortedError, MissingLabelError
from .kgstore import load_tsv


class AnnotationAdapter(object):
    """Base adapter. Subclasses implement label(batch)."""

    def label(self, batch):
        """Return one 0/1 label per kgstore.Fact in batch, in order."""
        raise NotImplementedError


class OracleAnnotator(AnnotationAdapter):
    """Answers from the ground-truth labels stored in the knowledge graph."""

    def __init__(self, kg):
        if not kg.fully_labeled:
            raise MissingLabelError('the oracle annotator needs every triple '
                                    'of the knowledge graph labeled')
        self.labels = kg.labels

    def label(self, batch):
        return [int(self.labels[fact.index]) for fact in batch]


def oracle_annotator(kg):
    return OracleAnnotator(kg)


class InteractiveAnnotator(AnnotationAdapter):
    """Asks a person for each label.

    Every fact is printed to sink and a line is read from source; '1' and
    '0' are accepted, anything else prompts again. End of input aborts the
    batch.

    Keyword arguments:
    source -- readable text stream (stdin by default)
    sink -- writable text stream (stdout by default)
    """
    PROMPT = 'Is this fact correct? [1/0]: '

    def __init__(self, source=None, sink=None):
        self.source = source if source is not None else sys.stdin
        self.sink = sink if sink is not None else sys.stdout

    def _ask(self, fact):
        self.sink.write('\n' + fact.subject + '\t' + fact.predicate + '\t' +
                        fact.object + '\n')
        while True:
            self.sink.write(self.PROMPT)
            self.sink.flush()
            line = self.source.readline()
            if not line:
                raise AnnotationAbortedError('annotation input closed')
            answer = line.strip()
            if answer in ('0', '1'):
                return int(answer)
            self.sink.write('Please answer 1 (correct) or 0 (incorrect).\n')

    def label(self, batch):
        return [self._ask(fact) for fact in batch]


def interactive_annotator(source=None, sink=None):
    return InteractiveAnnotator(source, sink)


class FileAnnotator(AnnotationAdapter):
    """Looks labels up in a labeled TSV keyed by (subject, predicate, object).

    A fact with no label in the file aborts the batch.
    """

    def __init__(self, path):
        labeled = load_tsv(path)
        self.path = path
        self.labels = dict()
        for triple in labeled.triples():
            if triple.label is not None:
                self.labels[(triple.subject, triple.predicate,
                             triple.object)] = triple.label

    def label(self, batch):
        labels = []
        for fact in batch:
            key = (fact.subject, fact.predicate, fact.object)
            if key not in self.labels:
                raise AnnotationAbortedError(
                    '%s has no label for %s' % (self.path, '\t'.join(key)))
            labels.append(self.labels[key])
        return labels
