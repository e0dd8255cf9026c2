# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Sample-similarity graphs built from tabular rows.

Every pair of rows is compared with cosine similarity or a min-max scaled
Euclidean distance turned into similarity (one minus the scaled distance).
Pairs whose similarity reaches the threshold keep an edge, either with the
similarity as weight or with weight 1, and every node keeps a self-loop.
"""

import json
import logging
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from ..exception import InvalidConfigError, InvalidDataError

_logger = logging.getLogger(__name__)

try:
    from scipy.spatial.distance import pdist, squareform
    from sklearn.metrics.pairwise import cosine_similarity
except ImportError:
    _logger.warning('Cannot import scipy / scikit-learn')

METRICS = ('cosine', 'euclidean')
MODES = ('weighted', 'binary')
SCALINGS = ('global', 'column')
NORMALIZATIONS = ('row_mean', 'symmetric')

# suffixes of method labels, such as GCN_CB
METRIC_CODES = {'cosine': 'C', 'euclidean': 'E'}

GraphStats = namedtuple(
    'GraphStats',
    'nodes edges density min_degree mean_degree max_degree isolated',
)


@dataclass(frozen=True)
class SimilarityConfig(object):
    """ How a table becomes a graph

    :param metric: ``cosine`` or ``euclidean``
    :param threshold: Minimum similarity, in [0, 1], for an edge to survive
    :param mode: ``weighted`` keeps similarities, ``binary`` writes 1
    :param scaling: ``global`` min-max over all off-diagonal distances or
        ``column`` min-max per column, symmetrised afterwards
    """

    metric: str = 'cosine'
    threshold: float = 0.5
    mode: str = 'weighted'
    scaling: str = 'global'

    def __post_init__(self):
        if self.metric not in METRICS:
            raise InvalidConfigError('Unknown metric %r' % self.metric)
        if self.mode not in MODES:
            raise InvalidConfigError('Unknown mode %r' % self.mode)
        if self.scaling not in SCALINGS:
            raise InvalidConfigError('Unknown scaling %r' % self.scaling)
        try:
            threshold = float(self.threshold)
        except (TypeError, ValueError):
            raise InvalidConfigError(
                'Threshold %r is not a number' % (self.threshold,),
            )
        if not 0.0 <= threshold <= 1.0:
            raise InvalidConfigError(
                'Threshold %r outside [0, 1]' % self.threshold,
            )
        object.__setattr__(self, 'threshold', threshold)

    @property
    def code(self):
        """ ``C``/``E`` followed by ``B`` for binary graphs """
        return METRIC_CODES[self.metric] + ('B' if self.mode == 'binary'
                                            else '')

    def as_dict(self):
        return {
            'metric': self.metric,
            'threshold': self.threshold,
            'mode': self.mode,
            'scaling': self.scaling,
        }


@dataclass(frozen=True, eq=False)
class AdjacencyMatrix(object):
    """ Symmetric N×N edge weights in [0, 1] with a unit diagonal

    ``indices`` are the rows of the source table the nodes stand for.
    """

    weights: np.ndarray
    config: SimilarityConfig = None
    indices: np.ndarray = field(default=None)

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64)
        if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
            raise InvalidDataError('An adjacency matrix must be square')
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)
        indices = self.indices
        if indices is None:
            indices = np.arange(weights.shape[0])
        indices = np.array(indices, dtype=np.intp)
        if indices.size != weights.shape[0]:
            raise InvalidDataError('One source index is needed per node')
        indices.setflags(write=False)
        object.__setattr__(self, 'indices', indices)

    @property
    def size(self):
        return self.weights.shape[0]

    def binarized(self):
        """ Same graph with every non-zero weight replaced by 1 """
        return AdjacencyMatrix(
            weights=(self.weights != 0).astype(np.float64),
            config=self.config,
            indices=self.indices,
        )

    def neighbor_mask(self):
        return self.weights != 0


@dataclass(frozen=True, eq=False)
class PropagationMatrix(object):
    """ Normalized adjacency used by message passing layers """

    weights: np.ndarray
    normalization: str

    @property
    def size(self):
        return self.weights.shape[0]


def _check_rows(features):
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] < 2:
        raise InvalidDataError('Pairwise similarity needs at least two rows')
    return features


def pairwise_cosine(features):
    """ Cosine similarity of every pair of rows

    Rows of zero norm have similarity 0 to every other row. The diagonal is
    1.
    """
    features = _check_rows(features)
    sim = cosine_similarity(features)
    sim = (sim + sim.T) / 2.0
    np.fill_diagonal(sim, 1.0)
    return np.clip(sim, -1.0, 1.0)


def _offdiag_minmax(matrix, scaling='global'):
    n = matrix.shape[0]
    off = ~np.eye(n, dtype=bool)
    if scaling == 'column':
        masked = np.where(off, matrix, np.nan)
        low = np.nanmin(masked, axis=0, keepdims=True)
        high = np.nanmax(masked, axis=0, keepdims=True)
        span = high - low
        flat = span == 0
        scaled = np.where(flat, 0.0, (matrix - low) / np.where(flat, 1, span))
        if flat.any():
            _logger.warning('%d column(s) hold equal distances only',
                            int(flat.sum()))
        return (scaled + scaled.T) / 2.0
    values = matrix[off]
    low, high = values.min(), values.max()
    if high == low:
        return None
    return (matrix - low) / (high - low)


def pairwise_euclidean_similarity(features, scaling='global'):
    """ One minus the min-max scaled Euclidean distance of every pair

    Distances are scaled over all off-diagonal entries. When every pair is
    equally far apart the scaling is degenerate and every pair gets
    similarity 1.
    """
    features = _check_rows(features)
    distances = squareform(pdist(features, metric='euclidean'))
    scaled = _offdiag_minmax(distances, scaling)
    if scaled is None:
        _logger.warning('All pairwise distances are equal, every pair is '
                        'treated as fully similar')
        sim = np.ones_like(distances)
    else:
        sim = 1.0 - np.clip(scaled, 0.0, 1.0)
    np.fill_diagonal(sim, 1.0)
    return sim


def similarity_matrix(features, config):
    """ Similarity in [0, 1] per ``config.metric``

    Cosine values below 0 carry no affinity and are clipped to 0.
    """
    if config.metric == 'cosine':
        return np.clip(pairwise_cosine(features), 0.0, 1.0)
    return pairwise_euclidean_similarity(features, config.scaling)


def build_adjacency(similarity, config, indices=None):
    """ Threshold a similarity matrix into an adjacency matrix

    Entries with similarity at or above ``config.threshold`` survive, with
    their similarity as weight or with weight 1 in binary mode. The diagonal
    is set to 1 afterwards.

    :rtype: AdjacencyMatrix
    """
    similarity = np.asarray(similarity, dtype=np.float64)
    keep = similarity >= config.threshold
    if config.mode == 'binary':
        weights = keep.astype(np.float64)
    else:
        weights = np.where(keep, similarity, 0.0)
    weights = np.maximum(weights, weights.T)
    np.fill_diagonal(weights, 1.0)
    return AdjacencyMatrix(weights=weights, config=config, indices=indices)


def build_graph(table, config, indices=None):
    """ Similarity graph over ``indices`` rows of ``table`` (all by default)

    With the training rows as ``indices`` no test row enters the graph.

    :raises InvalidDataError: when fewer than two rows are selected
    :rtype: AdjacencyMatrix
    """
    features = getattr(table, 'features', table)
    if indices is None:
        indices = np.arange(features.shape[0])
    indices = np.asarray(indices, dtype=np.intp)
    if indices.size < 2:
        raise InvalidDataError('A graph needs at least two rows')
    if indices.min() < 0 or indices.max() >= features.shape[0]:
        raise InvalidDataError('Graph row indices out of range')
    similarity = similarity_matrix(features[indices], config)
    adjacency = build_adjacency(similarity, config, indices=indices)
    _logger.debug('Built %s graph over %d rows, %d edges', config.code,
                  adjacency.size, graph_stats(adjacency).edges)
    return adjacency


def normalize(adjacency, kind='symmetric'):
    """ Row-mean ``D^-1 A`` or symmetric ``D^-1/2 A D^-1/2`` propagation

    ``D`` is the diagonal of row sums, positive thanks to the self-loops.
    :rtype: PropagationMatrix
    """
    if kind not in NORMALIZATIONS:
        raise InvalidConfigError('Unknown normalization %r' % kind)
    weights = getattr(adjacency, 'weights', adjacency)
    degree = weights.sum(axis=1)
    if np.any(degree <= 0):
        raise InvalidDataError('Every row needs a positive weight sum')
    if kind == 'row_mean':
        out = weights / degree[:, None]
    else:
        inv_sqrt = 1.0 / np.sqrt(degree)
        out = inv_sqrt[:, None] * weights * inv_sqrt[None, :]
    out.setflags(write=False)
    return PropagationMatrix(weights=out, normalization=kind)


def graph_stats(adjacency):
    """ Node, edge, density and degree figures of a graph
    :rtype: GraphStats
    """
    weights = adjacency.weights
    n = weights.shape[0]
    nonzero = weights != 0
    np.fill_diagonal(nonzero, False)
    degree = nonzero.sum(axis=1)
    edges = int(nonzero.sum() // 2)
    pairs = n * (n - 1) / 2.0
    return GraphStats(
        nodes=n,
        edges=edges,
        density=edges / pairs if pairs else 0.0,
        min_degree=int(degree.min()),
        mean_degree=float(degree.mean()),
        max_degree=int(degree.max()),
        isolated=int((degree == 0).sum()),
    )


def stats_json(adjacency):
    """ Single-line JSON record of :func:`graph_stats` and the config """
    record = graph_stats(adjacency)._asdict()
    if adjacency.config is not None:
        record.update(adjacency.config.as_dict())
    return json.dumps(record, sort_keys=True)


def _header(adjacency):
    config = adjacency.config or SimilarityConfig()
    return '# n=%d metric=%s threshold=%s mode=%s' % (
        adjacency.size, config.metric, repr(config.threshold), config.mode,
    )


def export_edge_list(adjacency, path):
    """ Upper triangle edges as ``src,dst,weight`` after a header line

    Self-loops are omitted.
    """
    from ..unit.csv_adapter import CsvAdapter
    rows, cols = np.nonzero(np.triu(adjacency.weights, k=1))
    lines = [_header(adjacency), 'src,dst,weight']
    lines.extend(
        '%d,%d,%s' % (p, q, repr(float(adjacency.weights[p, q])))
        for p, q in zip(rows, cols)
    )
    return CsvAdapter().write_text(path, '\n'.join(lines) + '\n')


def export_dense(adjacency, path):
    """ Full weight matrix as CSV, for small graphs """
    from ..unit.csv_adapter import CsvAdapter
    lines = [_header(adjacency)]
    lines.extend(
        ','.join(repr(float(v)) for v in row) for row in adjacency.weights
    )
    return CsvAdapter().write_text(path, '\n'.join(lines) + '\n')
