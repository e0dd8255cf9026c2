# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

import numpy as np

from tabular_gnn.exception import ShapeMismatchError
from tabular_gnn.models import gate, tensor
from tabular_gnn.models.layers import LayerSpec

from ..common import SetUpTabularBase


def log_sigmoid(x):
    return -np.log1p(np.exp(-x))


class TestGATE(SetUpTabularBase):

    def setUp(self):
        super(TestGATE, self).setUp()
        self.features = self.rng.rand(10, 4)
        self.adjacency = (self.rng.rand(10, 10) > 0.6).astype(float)
        self.adjacency = np.maximum(self.adjacency, self.adjacency.T)
        np.fill_diagonal(self.adjacency, 1.0)

    def test_shapes(self):
        """ It should emit N×embedding_dim and N×d outputs """
        params = gate.GATEParams.initialize(4, hidden=(6,), embedding_dim=3)
        embeddings, reconstruction = gate.gate_forward(
            self.adjacency, self.features, params,
        )
        self.assertEqual(embeddings.shape, (10, 3))
        self.assertEqual(reconstruction.shape, (10, 4))
        self.assertEqual(params.embedding_dim, 3)

    def test_identity_reconstruction(self):
        """ It should reconstruct X with identity maps on self-loops """
        params = gate.GATEParams.initialize(4, hidden=(), embedding_dim=4)
        params['enc0.h0.W'].value[...] = np.eye(4)
        params['dec0.h0.W'].value[...] = np.eye(4)
        embeddings, reconstruction = gate.gate_forward(
            np.eye(10), self.features, params,
        )
        self.assertMatrixAlmostEqual(embeddings, self.features, tol=1e-12)
        self.assertMatrixAlmostEqual(reconstruction, self.features,
                                     tol=1e-12)

    def test_decoder_must_mirror(self):
        """ It should refuse a decoder not returning d columns """
        with self.assertRaises(ShapeMismatchError):
            gate.GATEParams([LayerSpec(4, 2)], [LayerSpec(2, 3)])

    def test_loss_perfect_reconstruction(self):
        """ It should give 0 for a perfect reconstruction without structure
        """
        loss = gate.gate_loss(self.features, self.features,
                              np.zeros((10, 2)), self.adjacency,
                              structure_weight=0.0)
        self.assertEqual(loss.item(), 0.0)

    def test_loss_hand_value(self):
        """ It should match the hand-computed value on a 3-node path """
        path = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1]], dtype=float)
        embeddings = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        features = np.zeros((3, 2))
        reconstruction = np.full((3, 2), 0.5)
        structure = (2 * log_sigmoid(1.0) + 2 * log_sigmoid(0.0)) / 4.0
        loss = gate.gate_loss(features, reconstruction, embeddings, path,
                              structure_weight=2.0)
        self.assertAlmostEqual(loss.item(), 0.25 - 2.0 * structure,
                               places=8)

    def test_loss_no_edges(self):
        """ It should drop the structure term without off-diagonal edges """
        loss = gate.gate_loss(np.zeros((3, 2)), np.ones((3, 2)),
                              np.ones((3, 2)), np.eye(3))
        self.assertEqual(loss.item(), 1.0)

    def test_loss_orthogonal_neighbors(self):
        """ It should rise as neighbor embeddings drift apart """
        pair = np.ones((2, 2))
        close = gate.gate_loss(np.zeros((2, 1)), np.zeros((2, 1)),
                               [[1.0, 0.0], [1.0, 0.0]], pair).item()
        orthogonal = gate.gate_loss(np.zeros((2, 1)), np.zeros((2, 1)),
                                    [[1.0, 0.0], [0.0, 1.0]], pair).item()
        self.assertAlmostEqual(orthogonal, np.log(2.0), places=12)
        self.assertLess(close, orthogonal)

    def test_gradient(self):
        """ It should pass the gradient check through the loss """
        params = gate.GATEParams.initialize(4, hidden=(3,), embedding_dim=2)
        model = gate.GATEModel(params, structure_weight=0.5)
        context = model.prepare(self.adjacency)
        error = tensor.grad_check(
            lambda: model.loss(context, self.features), params,
        )
        self.assertLessEqual(error, 1e-3)

    def test_step_reduces_loss(self):
        """ It should lower the loss after one small gradient step """
        params = gate.GATEParams.initialize(4, hidden=(6,), embedding_dim=3,
                                            seed=5)
        model = gate.GATEModel(params)
        context = model.prepare(self.adjacency)
        before = model.loss(context, self.features)
        params.zero_grad()
        tensor.backward(before)
        for param in params:
            param.value -= 1e-3 * param.grad
        after = model.loss(context, self.features)
        self.assertLess(after.item(), before.item())

    def test_embed_plain_matrix(self):
        """ It should return the embeddings as a detached matrix """
        params = gate.GATEParams.initialize(4, hidden=(), embedding_dim=2)
        model = gate.GATEModel(params)
        embeddings = model.embed(model.prepare(self.adjacency),
                                 self.features)
        self.assertIsInstance(embeddings, np.ndarray)
        self.assertEqual(embeddings.shape, (10, 2))
