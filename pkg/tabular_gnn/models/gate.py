# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Graph attention autoencoder.

An attention encoder maps node features to embeddings ``Z`` and a mirrored
attention decoder maps ``Z`` back to features. Training minimizes feature
reconstruction error while pulling the embeddings of neighbors together.
"""

import numpy as np

from ..exception import ShapeMismatchError
from . import tensor
from .gat import AttentionParams, neighbor_mask, run_attention_stack
from .layers import Model, chain, check_features

ENCODER = 'enc'
DECODER = 'dec'


class GATEParams(AttentionParams):
    """ Encoder ``d -> ... -> embedding_dim`` and its mirror decoder """

    def __init__(self, encoder_specs, decoder_specs):
        super(GATEParams, self).__init__(encoder_specs)
        self.decoder_specs = list(decoder_specs)
        if self.decoder_specs[-1].output_dim != self.specs[0].in_dim:
            raise ShapeMismatchError(
                'Decoder emits %d columns for %d input features' % (
                    self.decoder_specs[-1].output_dim, self.specs[0].in_dim,
                )
            )

    @property
    def embedding_dim(self):
        return self.specs[-1].output_dim

    def layer_specs(self, prefix=None):
        if prefix == DECODER:
            return self.decoder_specs
        return self.specs

    @classmethod
    def initialize(cls, in_dim, hidden=(64,), embedding_dim=32, heads=1,
                   activation='elu', seed=0):
        rng = np.random.RandomState(seed)
        dims = [in_dim] + list(hidden) + [embedding_dim]
        encoder = chain(dims, activation, heads=heads, output_heads=heads)
        decoder = chain(dims[::-1], activation, heads=heads,
                        output_heads=heads)
        params = cls(encoder, decoder)
        for i, spec in enumerate(encoder):
            params._add_layer(rng, i, spec, ENCODER)
        for i, spec in enumerate(decoder):
            params._add_layer(rng, i, spec, DECODER)
        return params


def encode(adjacency, features, params):
    mask = neighbor_mask(adjacency)
    hidden = check_features(features, params.specs[0].in_dim)
    if mask.shape[0] != hidden.rows:
        raise ShapeMismatchError(
            'Mask for %d nodes, features for %d' % (mask.shape[0],
                                                    hidden.rows),
        )
    return run_attention_stack(mask, hidden, params, ENCODER)


def gate_forward(adjacency, features, params):
    """ Embeddings and reconstruction of the node features
    :rtype: tuple of (:class:`Node` N×embedding_dim, :class:`Node` N×d)
    """
    embeddings = encode(adjacency, features, params)
    mask = neighbor_mask(adjacency)
    reconstruction = run_attention_stack(mask, embeddings, params, DECODER)
    return embeddings, reconstruction


def gate_loss(features, reconstruction, embeddings, adjacency,
              structure_weight=1.0):
    """ ``mse(X̂, X) - λ · mean over edges p≠q of log σ(z_p · z_q)``

    Without off-diagonal edges the structure term is 0.
    """
    target = np.asarray(getattr(features, 'value', features),
                        dtype=np.float64)
    loss = tensor.mse(reconstruction, target)
    if not structure_weight:
        return loss
    edges = neighbor_mask(adjacency).astype(np.float64)
    np.fill_diagonal(edges, 0.0)
    if not edges.any():
        return loss
    affinity = tensor.matmul(embeddings, tensor.transpose(embeddings))
    structure = tensor.masked_mean(
        tensor.activation(affinity, 'log_sigmoid'), edges,
    )
    return tensor.subtract(loss, tensor.scale(structure, structure_weight))


class GATEModel(Model):
    """ Attention autoencoder trained without labels """

    graph_input = True

    def __init__(self, params, structure_weight=1.0):
        super(GATEModel, self).__init__(params)
        self.structure_weight = structure_weight

    def prepare(self, adjacency):
        return neighbor_mask(adjacency)

    def forward(self, context, features):
        return gate_forward(context, features, self.params)

    def loss(self, context, features):
        embeddings, reconstruction = self.forward(context, features)
        return gate_loss(features, reconstruction, embeddings, context,
                         self.structure_weight)

    def embed(self, context, features):
        """ Frozen embeddings as a plain matrix """
        return encode(context, features, self.params).value.copy()
