# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

import logging
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from ..exception import InvalidConfigError, ShapeMismatchError
from . import tensor

_logger = logging.getLogger(__name__)

HEAD_MERGES = ('concat', 'average')


@dataclass(frozen=True)
class LayerSpec(object):
    """ Shape and non-linearity of one layer

    Attention layers run ``heads`` heads; ``concat`` merges them side by
    side so the layer emits ``heads * out_dim`` columns.
    """

    in_dim: int
    out_dim: int
    activation: str = 'identity'
    heads: int = 1
    head_merge: str = 'concat'

    def __post_init__(self):
        if self.in_dim < 1 or self.out_dim < 1 or self.heads < 1:
            raise InvalidConfigError('Layer sizes and heads must be >= 1')
        if self.activation not in tensor.ACTIVATIONS:
            raise InvalidConfigError(
                'Unknown activation %r' % self.activation,
            )
        if self.head_merge not in HEAD_MERGES:
            raise InvalidConfigError(
                'Unknown head merge %r' % self.head_merge,
            )

    @property
    def output_dim(self):
        if self.head_merge == 'concat':
            return self.heads * self.out_dim
        return self.out_dim


def chain(dims, hidden_activation, heads=1, output_heads=1):
    """ Layer specs for the dimension chain ``dims``

    Hidden layers use ``hidden_activation`` and concatenate their heads, the
    last layer is linear and averages its heads.
    """
    specs = []
    in_dim = dims[0]
    for i, out_dim in enumerate(dims[1:]):
        last = i == len(dims) - 2
        spec = LayerSpec(
            in_dim=in_dim,
            out_dim=out_dim,
            activation='identity' if last else hidden_activation,
            heads=output_heads if last else heads,
            head_merge='average' if last else 'concat',
        )
        specs.append(spec)
        in_dim = spec.output_dim
    return specs


def glorot(rng, rows, cols):
    """ Uniform in ``±sqrt(6 / (fan_in + fan_out))`` """
    limit = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-limit, limit, size=(rows, cols))


class ParamSet(object):
    """ Ordered, uniquely named parameters of one model """

    def __init__(self):
        self._params = OrderedDict()

    def __iter__(self):
        return iter(self._params.values())

    def __len__(self):
        return len(self._params)

    def __getitem__(self, name):
        return self._params[name]

    def __contains__(self, name):
        return name in self._params

    def add(self, name, value):
        if name in self._params:
            raise InvalidConfigError('Duplicate parameter name %r' % name)
        param = tensor.Parameter(value, name)
        self._params[name] = param
        return param

    def names(self):
        return list(self._params)

    def zero_grad(self):
        for param in self:
            param.zero_grad()

    def snapshot(self):
        """ Copy of every parameter value, keyed by name
        :rtype: collections.OrderedDict
        """
        return OrderedDict(
            (name, param.value.copy()) for name, param in self._params.items()
        )

    def restore(self, snapshot):
        """ Load values captured by :meth:`snapshot` """
        for name, value in snapshot.items():
            param = self._params[name]
            if param.value.shape != value.shape:
                raise ShapeMismatchError(
                    '%s: snapshot %s vs parameter %s' % (
                        name, value.shape, param.value.shape,
                    )
                )
            param.value[...] = value

    def save(self, path):
        tensor.save_params(self.snapshot(), path)

    def load(self, path):
        self.restore(tensor.load_params(path))


class Model(object):
    """ A parameter set with its forward computation

    ``graph_input`` names what :meth:`prepare` expects: ``None`` for
    feature-only models, else an :class:`AdjacencyMatrix`.
    """

    graph_input = False

    def __init__(self, params):
        self.params = params
        self.trained_graph_config = None

    def prepare(self, adjacency):
        """ Turn an adjacency matrix into what :meth:`forward` consumes """
        return None

    def forward(self, context, features):
        raise NotImplementedError

    def penalty(self):
        """ Regularization term added to the training loss, or ``None`` """
        return None


def check_features(features, in_dim):
    features = tensor.as_node(features)
    if features.cols != in_dim:
        raise ShapeMismatchError(
            'Features have %d columns, the model expects %d' % (
                features.cols, in_dim,
            )
        )
    return features
