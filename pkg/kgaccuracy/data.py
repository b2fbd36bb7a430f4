# -*- coding: utf-8 -*-
"""kgaccuracy.data

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

from .special import BetaParams

# -- Uninformative beta priors (a = b <= 1)
NAMED_PRIORS = {
    'kerman': BetaParams(1.0 / 3.0, 1.0 / 3.0),
    'jeffreys': BetaParams(0.5, 0.5),
    'uniform': BetaParams(1.0, 1.0),
}

DEFAULT_PRIOR_NAMES = ('kerman', 'jeffreys', 'uniform')

# -- Annotation cost model, seconds
DEFAULT_C1 = 45.0  # entity identification
DEFAULT_C2 = 25.0  # fact verification

DEFAULT_ALPHA = 0.05
DEFAULT_EPSILON = 0.05

# second-stage TWCS size; the large-cluster syn profile uses LARGE_CLUSTER_M
DEFAULT_M = 3
LARGE_CLUSTER_M = 5

# initial / step batches: triples for SRS, clusters for TWCS
DEFAULT_BATCHES = {
    'srs': (30, 1),
    'twcs': (10, 1),
}

# -- Published statistics of the evaluation datasets.
#    name: (facts, clusters, average cluster size, accuracy)
#    'syn' is scaled down to one million triples; mean cluster size is kept.
#    Stand-ins built from a profile label triples independently unless an
#    intra-cluster correlation is requested, so their TWCS sample sizes sit
#    near the SRS ones instead of the published TWCS figures. A TWCS sample
#    smaller than the SRS one, as reported for FACTBENCH, needs labels that are
#    negatively correlated within clusters, which the generator does not
#    produce.
DATASET_PROFILES = {
    'yago': (1386, 822, 1.69, 0.99),
    'nell': (1860, 817, 2.28, 0.91),
    'dbpedia': (9344, 2936, 3.18, 0.85),
    'factbench': (2800, 1157, 2.42, 0.54),
    'syn': (1000000, 49310, 20.28, 0.9),
}
