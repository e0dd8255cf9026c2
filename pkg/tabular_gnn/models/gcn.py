# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

import numpy as np

from ..exception import ShapeMismatchError
from . import tensor
from .graph import normalize
from .layers import Model, ParamSet, chain, check_features, glorot


class GCNParams(ParamSet):
    """ Weight matrices ``W^l`` of a graph convolution stack """

    def __init__(self, specs):
        super(GCNParams, self).__init__()
        self.specs = list(specs)
        for prev, spec in zip(self.specs, self.specs[1:]):
            if prev.output_dim != spec.in_dim:
                raise ShapeMismatchError(
                    'Layer output %d does not feed input %d' % (
                        prev.output_dim, spec.in_dim,
                    )
                )

    @classmethod
    def initialize(cls, in_dim, classes, hidden=(64,), activation='relu',
                   seed=0):
        """ Glorot-initialized stack ``in_dim -> hidden... -> classes`` """
        rng = np.random.RandomState(seed)
        params = cls(chain([in_dim] + list(hidden) + [classes], activation))
        for i, spec in enumerate(params.specs):
            params.add('gcn%d.W' % i, glorot(rng, spec.in_dim, spec.out_dim))
        return params

    def weights(self):
        return [self['gcn%d.W' % i] for i in range(len(self.specs))]


def gcn_forward(propagation, features, params):
    """ ``H^{l+1} = σ(P · H^l · W^l)``, the last layer without σ
    :param propagation: :class:`PropagationMatrix` over the N nodes
    :param features: N×d features
    :param params: :class:`GCNParams`
    :rtype: :class:`Node` of N×K logits
    """
    weights = getattr(propagation, 'weights', propagation)
    hidden = check_features(features, params.specs[0].in_dim)
    if weights.shape != (hidden.rows, hidden.rows):
        raise ShapeMismatchError(
            'Propagation %s for %d nodes' % (weights.shape, hidden.rows),
        )
    prop = tensor.constant(weights, name='propagation')
    for spec, weight in zip(params.specs, params.weights()):
        # P·(H·W) keeps the N×N product on the narrower side
        hidden = tensor.matmul(prop, tensor.matmul(hidden, weight))
        hidden = tensor.activation(hidden, spec.activation)
    return hidden


class GCNModel(Model):
    """ Graph convolution classifier over a normalized adjacency """

    graph_input = True

    def __init__(self, params, normalization='symmetric'):
        super(GCNModel, self).__init__(params)
        self.normalization = normalization

    def prepare(self, adjacency):
        return normalize(adjacency, self.normalization)

    def forward(self, context, features):
        return gcn_forward(context, features, self.params)
