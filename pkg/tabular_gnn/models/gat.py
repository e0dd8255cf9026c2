# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Graph attention layers.

For a head with weight ``W`` and attention vector ``a = [a_src ‖ a_dst]``
the score of the edge ``p -> q`` is
``leaky_relu(a_src · W h_p + a_dst · W h_q)`` with slope 0.2, normalized by
a softmax over the neighbors of ``p`` (self-loop included). Non-neighbors
get attention exactly 0.
"""

import numpy as np

from ..exception import InvalidDataError, ShapeMismatchError
from . import tensor
from .layers import Model, ParamSet, chain, check_features, glorot

ATTENTION_SLOPE = 0.2


def neighbor_mask(adjacency):
    """ Boolean N×N mask of non-zero adjacency weights """
    weights = getattr(adjacency, 'weights', adjacency)
    mask = np.asarray(weights) != 0
    if mask.ndim != 2 or mask.shape[0] != mask.shape[1]:
        raise ShapeMismatchError('An adjacency mask must be square')
    if not mask.any(axis=1).all():
        raise InvalidDataError('A node has no neighbor, not even itself')
    return mask


def _attention_head(hidden, mask, weight, attention, slope):
    projected = tensor.matmul(hidden, weight)
    width = weight.cols
    if attention.shape != (2 * width, 1):
        raise ShapeMismatchError(
            'Attention vector must be %dx1, got %dx%d' % (
                2 * width, attention.rows, attention.cols,
            )
        )
    src = tensor.matmul(projected,
                        tensor.take_rows(attention, np.arange(width)))
    dst = tensor.matmul(projected,
                        tensor.take_rows(attention,
                                         np.arange(width, 2 * width)))
    scores = tensor.activation(tensor.add_outer(src, dst), 'leaky_relu',
                               slope=slope)
    return tensor.softmax_rows(scores, mask), projected


def gat_attention(hidden, adjacency, weight, attention,
                  slope=ATTENTION_SLOPE):
    """ N×N attention coefficients of one head
    :param hidden: N×d embeddings
    :param adjacency: Adjacency (non-zero entries are neighbors) or mask
    :param weight: d×d' head weight
    :param attention: 2d'×1 attention vector
    :rtype: :class:`Node`
    """
    hidden = tensor.as_node(hidden)
    weight = tensor.as_node(weight)
    mask = neighbor_mask(adjacency)
    if mask.shape[0] != hidden.rows:
        raise ShapeMismatchError(
            'Mask for %d nodes, embeddings for %d' % (mask.shape[0],
                                                      hidden.rows),
        )
    if weight.rows != hidden.cols:
        raise ShapeMismatchError(
            'Weight expects %d columns, got %d' % (weight.rows, hidden.cols),
        )
    alpha, _ = _attention_head(hidden, mask, weight,
                               tensor.as_node(attention), slope)
    return alpha


def attention_layer(hidden, mask, spec, heads, slope=ATTENTION_SLOPE):
    """ One multi-head attention layer
    :param heads: List of ``(W, a)`` parameter pairs
    """
    outputs = []
    for weight, attention in heads:
        alpha, projected = _attention_head(hidden, mask, weight, attention,
                                           slope)
        outputs.append(tensor.matmul(alpha, projected))
    if len(outputs) == 1:
        merged = outputs[0]
    elif spec.head_merge == 'concat':
        merged = tensor.concat_cols(outputs)
    else:
        total = outputs[0]
        for out in outputs[1:]:
            total = tensor.add(total, out)
        merged = tensor.scale(total, 1.0 / len(outputs))
    return tensor.activation(merged, spec.activation)


class AttentionParams(ParamSet):
    """ Per layer and head, a weight ``W`` and an attention vector ``a`` """

    prefix = 'gat'

    def __init__(self, specs):
        super(AttentionParams, self).__init__()
        self.specs = list(specs)
        for prev, spec in zip(self.specs, self.specs[1:]):
            if prev.output_dim != spec.in_dim:
                raise ShapeMismatchError(
                    'Layer output %d does not feed input %d' % (
                        prev.output_dim, spec.in_dim,
                    )
                )

    def _add_layer(self, rng, index, spec, prefix=None):
        prefix = prefix or self.prefix
        for head in range(spec.heads):
            name = '%s%d.h%d' % (prefix, index, head)
            self.add(name + '.W', glorot(rng, spec.in_dim, spec.out_dim))
            self.add(name + '.a', glorot(rng, 2 * spec.out_dim, 1))

    def heads(self, index, prefix=None):
        prefix = prefix or self.prefix
        spec = self.layer_specs(prefix)[index]
        return [
            (self['%s%d.h%d.W' % (prefix, index, h)],
             self['%s%d.h%d.a' % (prefix, index, h)])
            for h in range(spec.heads)
        ]

    def layer_specs(self, prefix=None):
        return self.specs


class GATParams(AttentionParams):

    @classmethod
    def initialize(cls, in_dim, classes, hidden=(64,), heads=4,
                   output_heads=1, activation='elu', seed=0):
        """ Multi-head stack ``in_dim -> hidden... -> classes`` """
        rng = np.random.RandomState(seed)
        specs = chain([in_dim] + list(hidden) + [classes], activation,
                      heads=heads, output_heads=output_heads)
        params = cls(specs)
        for i, spec in enumerate(specs):
            params._add_layer(rng, i, spec)
        return params


def run_attention_stack(mask, features, params, prefix=None):
    hidden = features
    for i, spec in enumerate(params.layer_specs(prefix)):
        hidden = attention_layer(hidden, mask, spec, params.heads(i, prefix))
    return hidden


def gat_forward(adjacency, features, params):
    """ Logits of a graph attention stack
    :param adjacency: Binary adjacency (or its boolean mask)
    :rtype: :class:`Node` of N×K logits
    """
    mask = neighbor_mask(adjacency)
    hidden = check_features(features, params.specs[0].in_dim)
    if mask.shape[0] != hidden.rows:
        raise ShapeMismatchError(
            'Mask for %d nodes, features for %d' % (mask.shape[0],
                                                    hidden.rows),
        )
    return run_attention_stack(mask, hidden, params)


class GATModel(Model):
    """ Graph attention classifier over a binarized adjacency """

    graph_input = True

    def prepare(self, adjacency):
        return neighbor_mask(adjacency)

    def forward(self, context, features):
        return gat_forward(context, features, self.params)
