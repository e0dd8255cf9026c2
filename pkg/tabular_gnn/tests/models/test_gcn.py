# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

import numpy as np

from tabular_gnn.exception import ShapeMismatchError
from tabular_gnn.models import gcn, tensor
from tabular_gnn.models.graph import AdjacencyMatrix, normalize

from ..common import SetUpTabularBase

# two triangles joined by the edge 2-3
TWO_CLUSTERS = np.array([
    [1, 1, 1, 0, 0, 0],
    [1, 1, 1, 0, 0, 0],
    [1, 1, 1, 1, 0, 0],
    [0, 0, 1, 1, 1, 1],
    [0, 0, 0, 1, 1, 1],
    [0, 0, 0, 1, 1, 1],
], dtype=float)

PATH = np.array([
    [1, 1, 0, 0],
    [1, 1, 1, 0],
    [0, 1, 1, 1],
    [0, 0, 1, 1],
], dtype=float)


class TestGCN(SetUpTabularBase):

    def setUp(self):
        super(TestGCN, self).setUp()
        self.features = self.rng.randn(6, 3)

    def _params(self, hidden=(), classes=2):
        return gcn.GCNParams.initialize(3, classes, hidden=hidden, seed=1)

    def test_identity_propagation_linear(self):
        """ It should reduce to X·W without message passing """
        params = self._params()
        out = gcn.gcn_forward(np.eye(6), self.features, params)
        self.assertMatrixAlmostEqual(
            out, self.features.dot(params['gcn0.W'].value), tol=1e-12,
        )

    def test_identical_connected_nodes(self):
        """ It should give identical logits to identical connected nodes """
        features = np.array([[0.2, 0.4, 0.1], [0.2, 0.4, 0.1]])
        prop = normalize(np.ones((2, 2)))
        out = gcn.gcn_forward(prop, features, self._params(hidden=(4,)))
        self.assertMatrixAlmostEqual(out.value[0], out.value[1], tol=1e-12)

    def test_two_cluster_oracle(self):
        """ It should match a direct computation of two layers """
        params = self._params(hidden=(4,))
        prop = normalize(TWO_CLUSTERS, 'symmetric').weights
        w0 = params['gcn0.W'].value
        w1 = params['gcn1.W'].value
        hidden = np.maximum(prop.dot(self.features).dot(w0), 0.0)
        expect = prop.dot(hidden).dot(w1)
        out = gcn.gcn_forward(normalize(TWO_CLUSTERS), self.features, params)
        self.assertMatrixAlmostEqual(out, expect, tol=1e-10)

    def test_locality_one_layer(self):
        """ It should ignore a non-neighbor in a single layer """
        params = self._params()
        prop = normalize(TWO_CLUSTERS)
        before = gcn.gcn_forward(prop, self.features, params).value
        changed = self.features.copy()
        changed[5] += 10.0
        after = gcn.gcn_forward(prop, changed, params).value
        self.assertMatrixAlmostEqual(after[0], before[0], tol=1e-12)
        self.assertFalse(np.allclose(after[4], before[4]))

    def test_locality_two_layers(self):
        """ It should ignore nodes three hops away after two layers """
        features = self.rng.randn(4, 3)
        params = self._params(hidden=(4,))
        prop = normalize(PATH)
        before = gcn.gcn_forward(prop, features, params).value
        changed = features.copy()
        changed[3] -= 5.0
        after = gcn.gcn_forward(prop, changed, params).value
        self.assertMatrixAlmostEqual(after[0], before[0], tol=1e-12)

    def test_permutation_equivariance(self):
        """ It should permute logits with the nodes """
        params = self._params(hidden=(4,))
        order = self.rng.permutation(6)
        out = gcn.gcn_forward(normalize(TWO_CLUSTERS), self.features,
                              params).value
        permuted = gcn.gcn_forward(
            normalize(TWO_CLUSTERS[np.ix_(order, order)]),
            self.features[order], params,
        ).value
        self.assertMatrixAlmostEqual(permuted, out[order], tol=1e-8)

    def test_propagation_size_mismatch(self):
        """ It should refuse a propagation of another size """
        with self.assertRaises(ShapeMismatchError):
            gcn.gcn_forward(np.eye(5), self.features, self._params())

    def test_feature_width_mismatch(self):
        """ It should refuse features of another width """
        with self.assertRaises(ShapeMismatchError):
            gcn.gcn_forward(np.eye(6), np.ones((6, 2)), self._params())

    def test_layer_chain_mismatch(self):
        """ It should refuse layers that do not feed each other """
        from tabular_gnn.models.layers import LayerSpec
        with self.assertRaises(ShapeMismatchError):
            gcn.GCNParams([LayerSpec(3, 4), LayerSpec(5, 2)])

    def test_end_to_end_gradient(self):
        """ It should pass the gradient check through two layers """
        params = self._params(hidden=(4,))
        prop = normalize(TWO_CLUSTERS)
        labels = [0, 0, 0, 1, 1, 1]
        error = tensor.grad_check(
            lambda: tensor.cross_entropy(
                gcn.gcn_forward(prop, self.features, params), labels,
            ),
            params,
        )
        self.assertLessEqual(error, 1e-3)

    def test_model_prepare(self):
        """ It should normalize the adjacency per its normalization """
        model = gcn.GCNModel(self._params(), normalization='row_mean')
        context = model.prepare(AdjacencyMatrix(TWO_CLUSTERS))
        self.assertEqual(context.normalization, 'row_mean')
        self.assertTrue(model.graph_input)
