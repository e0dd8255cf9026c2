# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Trainers for the benchmark models.

A trainer owns one model and its optimizer state for the length of a run.
Every epoch records the training loss and the monitored loss, keeps a
snapshot of the parameters behind the best monitored loss, and stops once
the monitored loss has not improved for ``patience`` epochs. Supervised
runs monitor the validation loss, unsupervised runs the training loss.
"""

import logging
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from ..exception import (FailedFoldError,
                         GraphConfigMismatchError,
                         InvalidConfigError,
                         )
from ..models import tensor
from ..models.graph import build_graph
from .csv_adapter import CsvAdapter

_logger = logging.getLogger(__name__)

OPTIMIZERS = ('adam', 'sgd')
DEFAULT_PATIENCE = 100

HistoryRecord = namedtuple('HistoryRecord', 'epoch train_loss val_loss')


@dataclass(frozen=True)
class TrainConfig(object):
    """ Optimization settings shared by every neural model

    ``batch_size`` applies to feature-only models; graph models train on
    the full graph every epoch. ``patience`` defaults to 100 epochs, capped
    by ``max_epochs``.
    """

    max_epochs: int = 1000
    patience: int = None
    learning_rate: float = 0.001
    batch_size: int = 64
    seed: int = 0
    optimizer: str = 'adam'
    validation_in_graph: bool = True
    min_delta: float = 0.0

    def __post_init__(self):
        if self.max_epochs < 1:
            raise InvalidConfigError('max_epochs must be >= 1')
        if self.patience is None:
            object.__setattr__(self, 'patience',
                               min(DEFAULT_PATIENCE, self.max_epochs))
        if not 1 <= self.patience <= self.max_epochs:
            raise InvalidConfigError('patience must lie in [1, max_epochs]')
        if self.learning_rate <= 0:
            raise InvalidConfigError('learning_rate must be positive')
        if self.batch_size < 1:
            raise InvalidConfigError('batch_size must be >= 1')
        if self.optimizer not in OPTIMIZERS:
            raise InvalidConfigError(
                'Unknown optimizer %r' % self.optimizer,
            )


@dataclass
class TrainResult(object):
    """ Outcome of a training run; ``best_epoch`` is 1-based """

    best_params: dict
    best_epoch: int
    history: list = field(default_factory=list)
    stopped_early: bool = False

    @property
    def epochs_ran(self):
        return len(self.history)

    @property
    def best_loss(self):
        record = self.history[self.best_epoch - 1]
        if record.val_loss is None:
            return record.train_loss
        return record.val_loss

    def export_history(self, path):
        """ Write ``epoch,train_loss,val_loss`` rows """
        return CsvAdapter().write_records(
            path,
            (record._asdict() for record in self.history),
            columns=list(HistoryRecord._fields),
        )

    def save_checkpoint(self, path):
        tensor.save_params(self.best_params, path)


class EarlyStopping(object):
    """ Patience counter over a monitored loss

    :param patience: Epochs without improvement before stopping
    :param min_delta: Improvement needed to reset the counter
    """

    def __init__(self, patience, min_delta=0.0):
        self.patience = patience
        self.min_delta = min_delta
        self.best = None
        self.best_epoch = None
        self.best_snapshot = None
        self.wait = 0
        self.stopped = False

    def update(self, epoch, loss, params):
        """ Record the monitored ``loss`` of ``epoch``
        :return: True when training must stop
        """
        if self.best is None or loss < self.best - self.min_delta:
            self.best = loss
            self.best_epoch = epoch
            self.best_snapshot = params.snapshot()
            self.wait = 0
            return False
        self.wait += 1
        if self.wait >= self.patience:
            self.stopped = True
        return self.stopped


class AdamState(object):
    """ First and second moment estimates, keyed by parameter name """

    def __init__(self, params):
        self.step = 0
        self.m = {p.name: np.zeros_like(p.value) for p in params}
        self.v = {p.name: np.zeros_like(p.value) for p in params}


def adam_step(params, grads, state, lr=0.001, beta1=0.9, beta2=0.999,
              epsilon=1e-8):
    """ One bias-corrected Adam update, in place
    :param params: Parameters to update
    :param grads: Gradient per parameter, ``None`` counts as zero
    :type state: AdamState
    :return: ``(params, state)``
    """
    params = list(params)
    state.step += 1
    correction1 = 1.0 - beta1 ** state.step
    correction2 = 1.0 - beta2 ** state.step
    for param, grad in zip(params, grads):
        if grad is None:
            grad = np.zeros_like(param.value)
        m = state.m[param.name]
        v = state.v[param.name]
        m *= beta1
        m += (1.0 - beta1) * grad
        v *= beta2
        v += (1.0 - beta2) * grad * grad
        param.value -= lr * (m / correction1) / (
            np.sqrt(v / correction2) + epsilon
        )
    return params, state


def sgd_step(params, grads, lr=0.001):
    params = list(params)
    for param, grad in zip(params, grads):
        if grad is not None:
            param.value -= lr * grad
    return params


def positions_of(indices, rows):
    """ Positions of source ``rows`` among graph node ``indices`` """
    indices = np.asarray(indices)
    order = np.argsort(indices, kind='stable')
    slots = np.searchsorted(indices, rows, sorter=order)
    found = order[np.minimum(slots, indices.size - 1)]
    assert np.array_equal(indices[found], rows), \
        'Rows are missing from the graph'
    return found


class Trainer(object):
    """ Base trainer: the epoch loop, early stopping and optimizer steps """

    def __init__(self, model, config):
        """
        :param model: :class:`tabular_gnn.models.layers.Model`
        :type config: TrainConfig
        """
        self.model = model
        self.config = config
        self.params = list(model.params)
        self.optimizer_state = AdamState(self.params)
        self.rng = np.random.RandomState(config.seed)

    def _before_train(self):
        """ Hook called once before the first epoch """

    def _epoch(self, epoch, stopper):
        """ Run one epoch
        :return: ``(train_loss, monitored_loss, val_loss or None, stop)``
        """
        raise NotImplementedError

    def _after_train(self, result):
        """ Hook called with the finished :class:`TrainResult` """

    def _step(self, loss):
        self.model.params.zero_grad()
        tensor.backward(loss)
        grads = [p.grad for p in self.params]
        if self.config.optimizer == 'adam':
            adam_step(self.params, grads, self.optimizer_state,
                      lr=self.config.learning_rate)
        else:
            sgd_step(self.params, grads, lr=self.config.learning_rate)

    @staticmethod
    def _check_finite(epoch, *losses):
        for loss in losses:
            if loss is not None and not np.isfinite(loss):
                raise FailedFoldError(
                    'Non-finite loss at epoch %d' % epoch, epoch=epoch,
                )

    def run(self):
        """ Train until ``max_epochs`` or early stopping
        :rtype: TrainResult
        """
        self._before_train()
        stopper = EarlyStopping(self.config.patience, self.config.min_delta)
        history = []
        for epoch in range(1, self.config.max_epochs + 1):
            train_loss, val_loss, stop = self._epoch(epoch, stopper)
            history.append(HistoryRecord(epoch, train_loss, val_loss))
            _logger.debug('epoch %d train %s val %s', epoch, train_loss,
                          val_loss)
            if stop:
                break
        self.model.params.restore(stopper.best_snapshot)
        result = TrainResult(
            best_params=stopper.best_snapshot,
            best_epoch=stopper.best_epoch,
            history=history,
            stopped_early=stopper.stopped,
        )
        _logger.debug('Trained %d epochs, best epoch %d', result.epochs_ran,
                      result.best_epoch)
        self._after_train(result)
        return result


class SupervisedTrainer(Trainer):
    """ Cross-entropy on train rows, early stopping on validation rows

    Feature-only models train in shuffled mini-batches. Graph models train
    full-batch on a graph built from train and validation rows only; the
    loss reads train rows, the monitored loss validation rows.
    """

    def __init__(self, model, config, table, split, graph=None,
                 validation_graph=None):
        super(SupervisedTrainer, self).__init__(model, config)
        self.table = table
        self.split = split
        self.graph = graph
        self.validation_graph = validation_graph

    def _before_train(self):
        split = self.split
        labels = self.table.labels
        self.train_labels = labels[split.train]
        self.val_labels = labels[split.validation]
        if hasattr(self.model, 'penalty_rows'):
            self.model.penalty_rows = len(split.train)
        if not self.model.graph_input:
            self.train_features = self.table.features[split.train]
            self.val_features = self.table.features[split.validation]
            return
        if self.graph is None:
            raise InvalidConfigError('A graph model needs a training graph')
        expected = split.training_rows() if self.config.validation_in_graph \
            else np.sort(split.train)
        assert not np.isin(split.test, self.graph.indices).any(), \
            'Test rows leaked into the training graph'
        assert self.graph.size == expected.size and np.array_equal(
            np.sort(self.graph.indices), expected,
        ), 'Training graph does not hold exactly the training rows'
        self.context = self.model.prepare(self.graph)
        self.graph_features = self.table.features[self.graph.indices]
        self.train_pos = positions_of(self.graph.indices, split.train)
        if self.config.validation_in_graph:
            self.val_pos = positions_of(self.graph.indices,
                                        split.validation)
            return
        if self.validation_graph is None:
            raise InvalidConfigError(
                'A validation graph is needed when validation rows stay '
                'out of the training graph'
            )
        assert not np.isin(split.test,
                           self.validation_graph.indices).any(), \
            'Test rows leaked into the validation graph'
        self.val_context = self.model.prepare(self.validation_graph)
        self.val_graph_features = \
            self.table.features[self.validation_graph.indices]
        self.val_pos = positions_of(self.validation_graph.indices,
                                    split.validation)

    def _after_train(self, result):
        if self.model.graph_input:
            self.model.trained_graph_config = self.graph.config

    def _loss(self, logits, labels):
        loss = tensor.cross_entropy(logits, labels)
        penalty = self.model.penalty()
        if penalty is not None:
            loss = tensor.add(loss, penalty)
        return loss

    @staticmethod
    def _plain_loss(logits, labels):
        logits = tensor.Node(np.asarray(logits, dtype=np.float64))
        return tensor.cross_entropy(logits, labels).item()

    def _epoch(self, epoch, stopper):
        if self.model.graph_input:
            return self._graph_epoch(epoch, stopper)
        return self._batch_epoch(epoch, stopper)

    def _graph_epoch(self, epoch, stopper):
        logits = self.model.forward(self.context, self.graph_features)
        loss = self._loss(tensor.take_rows(logits, self.train_pos),
                          self.train_labels)
        if self.config.validation_in_graph:
            val_logits = logits.value[self.val_pos]
        else:
            val_logits = self.model.forward(
                self.val_context, self.val_graph_features,
            ).value[self.val_pos]
        train_loss = loss.item()
        val_loss = self._plain_loss(val_logits, self.val_labels)
        self._check_finite(epoch, train_loss, val_loss)
        stop = stopper.update(epoch, val_loss, self.model.params)
        if not stop:
            self._step(loss)
        return train_loss, val_loss, stop

    def _batch_epoch(self, epoch, stopper):
        rows = self.train_features.shape[0]
        order = self.rng.permutation(rows)
        losses = []
        for start in range(0, rows, self.config.batch_size):
            batch = order[start:start + self.config.batch_size]
            logits = self.model.forward(None, self.train_features[batch])
            loss = self._loss(logits, self.train_labels[batch])
            losses.append(loss.item())
            self._check_finite(epoch, losses[-1])
            self._step(loss)
        train_loss = float(np.mean(losses))
        val_logits = self.model.forward(None, self.val_features).value
        val_loss = self._plain_loss(val_logits, self.val_labels)
        self._check_finite(epoch, val_loss)
        stop = stopper.update(epoch, val_loss, self.model.params)
        return train_loss, val_loss, stop


class UnsupervisedTrainer(Trainer):
    """ Full-batch autoencoder training monitored on the training loss """

    def __init__(self, model, config, graph, features):
        super(UnsupervisedTrainer, self).__init__(model, config)
        self.graph = graph
        self.features = np.asarray(features, dtype=np.float64)

    def _before_train(self):
        self.context = self.model.prepare(self.graph)

    def _after_train(self, result):
        self.model.trained_graph_config = self.graph.config

    def _epoch(self, epoch, stopper):
        loss = self.model.loss(self.context, self.features)
        train_loss = loss.item()
        self._check_finite(epoch, train_loss)
        stop = stopper.update(epoch, train_loss, self.model.params)
        if not stop:
            self._step(loss)
        return train_loss, None, stop


def train_supervised(model, table, split, config, graph=None,
                     validation_graph=None):
    """ Train a classifier on ``split.train`` rows
    :param graph: Training graph for graph models, over train and
        validation rows (train rows only without ``validation_in_graph``)
    :param validation_graph: Graph used for the validation loss when
        validation rows are kept out of the training graph
    :rtype: TrainResult
    """
    trainer = SupervisedTrainer(model, config, table, split, graph=graph,
                                validation_graph=validation_graph)
    return trainer.run()


def train_unsupervised(model, graph, features, config):
    """ Train an autoencoder on ``features`` of the ``graph`` nodes
    :rtype: TrainResult
    """
    return UnsupervisedTrainer(model, config, graph, features).run()


def predict_logits(model, context, features):
    return model.forward(context, features).value


def predict_inductive(model, table, config, test_indices, graph=None):
    """ Predicted labels of ``test_indices`` rows

    Graph models run on a graph over every row, built with the
    configuration seen in training. Ties go to the lowest class index.

    :raises GraphConfigMismatchError: on a configuration mismatch
    :rtype: numpy.ndarray
    """
    test_indices = np.asarray(test_indices, dtype=np.intp)
    if not model.graph_input:
        logits = predict_logits(model, None, table.features[test_indices])
        return np.argmax(logits, axis=1)
    if config != model.trained_graph_config:
        raise GraphConfigMismatchError(
            'Inference graph %r differs from training graph %r' % (
                config, model.trained_graph_config,
            )
        )
    if graph is None:
        graph = build_graph(table, config)
    elif graph.config != config:
        raise GraphConfigMismatchError(
            'Inference graph was built with %r' % (graph.config,),
        )
    context = model.prepare(graph)
    logits = predict_logits(model, context, table.features[graph.indices])
    positions = positions_of(graph.indices, test_indices)
    return np.argmax(logits[positions], axis=1)
