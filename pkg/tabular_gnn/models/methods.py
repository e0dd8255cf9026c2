# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Method runners fit one method on one fold and predict its test rows.

Runners register on the ``benchmark`` backend under their method name. A
runner only ever reads the labels of train and validation rows; it hands
test-row predictions back and never sees the test score.
"""

import logging
from collections import namedtuple
from dataclasses import dataclass, replace

import numpy as np

from ..backend import benchmark
from ..exception import GraphConfigMismatchError, InvalidConfigError
from ..unit.trainer import (positions_of,
                            predict_inductive,
                            train_supervised,
                            train_unsupervised,
                            )
from .baseline import (C_GRID,
                       MLP_HIDDEN,
                       PENALTIES,
                       LRModel,
                       LRParams,
                       MLPModel,
                       MLPParams,
                       )
from .dataset import DataTable
from .gat import GATModel, GATParams
from .gate import GATEModel, GATEParams
from .gcn import GCNModel, GCNParams
from .graph import NORMALIZATIONS, build_graph
from .metrics import weighted_f1

_logger = logging.getLogger(__name__)

FoldFit = namedtuple(
    'FoldFit',
    'predictions val_f1 epochs_ran graph_nodes detail',
)


@dataclass(frozen=True)
class ModelConfig(object):
    """ Architecture options; ``None`` picks the method default

    :param hidden: Hidden layer widths
    :param heads: Heads of hidden attention layers
    :param output_heads: Heads of the output attention layer
    :param embedding_dim: GATE embedding width
    :param structure_weight: GATE neighbor-similarity weight
    :param normalization: GCN propagation, ``symmetric`` or ``row_mean``
    :param penalty: Logistic regression penalty; with ``c`` unset as well
        the penalty and C grid is searched on validation F1
    :param c: Logistic regression inverse regularization strength
    """

    hidden: tuple = None
    heads: int = 4
    output_heads: int = 1
    embedding_dim: int = 32
    structure_weight: float = 1.0
    normalization: str = 'symmetric'
    penalty: str = None
    c: float = None

    def __post_init__(self):
        if self.hidden is not None:
            object.__setattr__(self, 'hidden',
                               tuple(int(h) for h in self.hidden))
        if self.normalization not in NORMALIZATIONS:
            raise InvalidConfigError(
                'Unknown normalization %r' % self.normalization,
            )
        if self.penalty is not None and self.penalty not in PENALTIES:
            raise InvalidConfigError('Unknown penalty %r' % self.penalty)
        if self.c is not None and self.c <= 0:
            raise InvalidConfigError('C must be positive')
        if self.heads < 1 or self.output_heads < 1:
            raise InvalidConfigError('Heads must be >= 1')
        if self.embedding_dim < 1:
            raise InvalidConfigError('embedding_dim must be >= 1')

    def lr_grid(self):
        """ ``(penalty, c)`` pairs to try, in selection order """
        penalties = (self.penalty,) if self.penalty else PENALTIES
        strengths = (self.c,) if self.c else C_GRID
        return [(p, c) for p in penalties for c in strengths]


class MethodRunner(object):
    """ Fit one method on the train rows of a split

    :param table: Min-max scaled :class:`DataTable`
    :param model_config: :class:`ModelConfig`
    :param train_config: :class:`TrainConfig` seeded for this fold
    :param graph_config: :class:`SimilarityConfig` for graph methods
    """

    _method_name = None
    graph_input = False

    def __init__(self, table, model_config, train_config, graph_config=None):
        self.table = table
        self.model_config = model_config
        self.train_config = train_config
        self.graph_config = graph_config

    def run(self, split):
        """ Fit on ``split`` and predict its test rows
        :rtype: FoldFit
        """
        raise NotImplementedError

    def _score(self, rows, predictions):
        return weighted_f1(self.table.labels[rows], predictions,
                           self.table.class_count)


@benchmark
class LRRunner(MethodRunner):
    """ Logistic regression, with the penalty and C chosen per fold """

    _method_name = 'lr'

    def _fit_one(self, split, penalty, c):
        model = LRModel(LRParams.initialize(
            self.table.n_features, self.table.class_count,
            penalty=penalty, c=c,
        ))
        result = train_supervised(model, self.table, split,
                                  self.train_config)
        val_pred = predict_inductive(model, self.table, None,
                                     split.validation)
        return model, result, self._score(split.validation, val_pred)

    def run(self, split):
        best = None
        for penalty, c in self.model_config.lr_grid():
            model, result, val_f1 = self._fit_one(split, penalty, c)
            _logger.debug('lr penalty=%s C=%s val F1 %.4f', penalty, c,
                          val_f1)
            if best is None or val_f1 > best[2]:
                best = (model, result, val_f1, penalty, c)
        model, result, val_f1, penalty, c = best
        return FoldFit(
            predictions=predict_inductive(model, self.table, None,
                                          split.test),
            val_f1=val_f1,
            epochs_ran=result.epochs_ran,
            graph_nodes=0,
            detail={'penalty': penalty, 'c': c},
        )


@benchmark
class MLPRunner(MethodRunner):
    """ Perceptron with the fixed 256-128-64 hidden layers """

    _method_name = 'mlp'

    def run(self, split):
        params = MLPParams.initialize(
            self.table.n_features, self.table.class_count,
            hidden=self.model_config.hidden or MLP_HIDDEN,
            seed=self.train_config.seed,
        )
        model = MLPModel(params)
        result = train_supervised(model, self.table, split,
                                  self.train_config)
        val_pred = predict_inductive(model, self.table, None,
                                     split.validation)
        return FoldFit(
            predictions=predict_inductive(model, self.table, None,
                                          split.test),
            val_f1=self._score(split.validation, val_pred),
            epochs_ran=result.epochs_ran,
            graph_nodes=0,
            detail={},
        )


class GraphRunner(MethodRunner):
    """ Inductive training on a graph without test rows

    The training graph holds train and validation rows (train rows only
    when ``validation_in_graph`` is off); test rows join only in the graph
    built over every row at inference.
    """

    graph_input = True

    def __init__(self, table, model_config, train_config, graph_config=None):
        if graph_config is None:
            raise InvalidConfigError(
                '%s needs a similarity configuration' % self._method_name,
            )
        super(GraphRunner, self).__init__(table, model_config, train_config,
                                          graph_config)

    def _new_model(self):
        raise NotImplementedError

    def _training_graphs(self, split):
        config = self.graph_config
        if self.train_config.validation_in_graph:
            graph = build_graph(self.table, config, split.training_rows())
            return graph, None
        graph = build_graph(self.table, config, np.sort(split.train))
        return graph, build_graph(self.table, config, split.training_rows())

    def _validation_predictions(self, model, graph, split):
        context = model.prepare(graph)
        logits = model.forward(context,
                               self.table.features[graph.indices]).value
        positions = positions_of(graph.indices, split.validation)
        return np.argmax(logits[positions], axis=1)

    def run(self, split):
        model = self._new_model()
        graph, validation_graph = self._training_graphs(split)
        result = train_supervised(model, self.table, split,
                                  self.train_config, graph=graph,
                                  validation_graph=validation_graph)
        val_pred = self._validation_predictions(
            model, validation_graph or graph, split,
        )
        return FoldFit(
            predictions=predict_inductive(model, self.table,
                                          self.graph_config, split.test),
            val_f1=self._score(split.validation, val_pred),
            epochs_ran=result.epochs_ran,
            graph_nodes=graph.size,
            detail={},
        )


@benchmark
class GCNRunner(GraphRunner):

    _method_name = 'gcn'

    def _new_model(self):
        params = GCNParams.initialize(
            self.table.n_features, self.table.class_count,
            hidden=self.model_config.hidden or (64,),
            seed=self.train_config.seed,
        )
        return GCNModel(params,
                        normalization=self.model_config.normalization)


@benchmark
class GATRunner(GraphRunner):
    """ Attention classifier; weighted graphs are binarized first """

    _method_name = 'gat'

    def _new_model(self):
        params = GATParams.initialize(
            self.table.n_features, self.table.class_count,
            hidden=self.model_config.hidden or (64,),
            heads=self.model_config.heads,
            output_heads=self.model_config.output_heads,
            seed=self.train_config.seed,
        )
        return GATModel(params)

    def _training_graphs(self, split):
        graph, validation_graph = super(GATRunner, self)._training_graphs(
            split,
        )
        if validation_graph is not None:
            validation_graph = validation_graph.binarized()
        return graph.binarized(), validation_graph


@benchmark
class GATERunner(GraphRunner):
    """ Attention autoencoder plus logistic regression on its embeddings

    The encoder trains without labels on a graph over the nine non-test
    folds. Train and validation embeddings come from that graph, test
    embeddings from the graph over every row. The downstream logistic
    regression sees train embeddings and stops on validation embeddings.
    """

    _method_name = 'gate'

    def _new_model(self):
        params = GATEParams.initialize(
            self.table.n_features,
            hidden=self.model_config.hidden or (64,),
            embedding_dim=self.model_config.embedding_dim,
            heads=1,
            seed=self.train_config.seed,
        )
        return GATEModel(params,
                         structure_weight=self.model_config.structure_weight)

    def _embeddings(self, model, split):
        rows = split.training_rows()
        assert not np.isin(split.test, rows).any(), \
            'Test rows leaked into the autoencoder graph'
        graph = build_graph(self.table, self.graph_config, rows).binarized()
        result = train_unsupervised(model, graph,
                                    self.table.features[graph.indices],
                                    self.train_config)
        if model.trained_graph_config != self.graph_config:
            raise GraphConfigMismatchError(
                'Autoencoder trained on %r' % (model.trained_graph_config,),
            )
        full = build_graph(self.table, self.graph_config).binarized()
        embeddings = model.embed(model.prepare(full), self.table.features)
        embeddings[graph.indices] = model.embed(
            model.prepare(graph), self.table.features[graph.indices],
        )
        return embeddings, result, graph

    def run(self, split):
        model = self._new_model()
        embeddings, result, graph = self._embeddings(model, split)
        embedded = DataTable(
            features=embeddings,
            labels=self.table.labels,
            feature_names=['z%d' % i for i in range(embeddings.shape[1])],
            class_count=self.table.class_count,
            name=self.table.name,
            class_names=self.table.class_names,
        )
        downstream = LRRunner(
            embedded, self.model_config,
            replace(self.train_config, validation_in_graph=True),
        )
        fit = downstream.run(split)
        return fit._replace(
            epochs_ran=result.epochs_ran,
            graph_nodes=graph.size,
            detail=dict(fit.detail, downstream_epochs=fit.epochs_ran),
        )


def get_runner(method):
    """ Runner class registered for ``method`` """
    return benchmark.get_class(MethodRunner, method)


def method_names():
    return benchmark.method_names(MethodRunner)
