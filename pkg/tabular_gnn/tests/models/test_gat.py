# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

import numpy as np

from tabular_gnn.exception import InvalidDataError, ShapeMismatchError
from tabular_gnn.models import gat, gcn, tensor
from tabular_gnn.models.graph import normalize

from ..common import SetUpTabularBase

STAR = np.array([
    [1, 1, 1],
    [1, 1, 0],
    [1, 0, 1],
], dtype=float)

RING = np.array([
    [1, 1, 0, 0, 1],
    [1, 1, 1, 0, 0],
    [0, 1, 1, 1, 0],
    [0, 0, 1, 1, 1],
    [1, 0, 0, 1, 1],
], dtype=float)


def leaky(x):
    return np.where(x > 0, x, 0.2 * x)


def softmax(x):
    x = np.exp(x - np.max(x))
    return x / x.sum()


class TestGATAttention(SetUpTabularBase):

    def test_self_loop_only(self):
        """ It should give a lone node attention 1 on itself """
        alpha = gat.gat_attention(self.rng.randn(2, 2), np.eye(2),
                                  self.rng.randn(2, 3), self.rng.randn(6, 1))
        self.assertMatrixAlmostEqual(alpha, np.eye(2))

    def test_identical_pair(self):
        """ It should split attention evenly between identical nodes """
        features = np.array([[0.3, 0.6], [0.3, 0.6]])
        alpha = gat.gat_attention(features, np.ones((2, 2)),
                                  self.rng.randn(2, 3), self.rng.randn(6, 1))
        self.assertMatrixAlmostEqual(alpha, np.full((2, 2), 0.5), tol=1e-12)

    def test_star_oracle(self):
        """ It should match the hand-computed softmax on a star """
        hidden = np.array([[1.0], [2.0], [3.0]])
        weight = np.array([[1.0]])
        attention = np.array([[-1.0], [0.5]])
        alpha = gat.gat_attention(hidden, STAR, weight, attention).value
        center = softmax(leaky(-1.0 + 0.5 * np.array([1.0, 2.0, 3.0])))
        leaf = softmax(leaky(-2.0 + 0.5 * np.array([1.0, 2.0])))
        self.assertMatrixAlmostEqual(alpha[0], center, tol=1e-8)
        self.assertMatrixAlmostEqual(alpha[1, :2], leaf, tol=1e-8)
        self.assertEqual(alpha[1, 2], 0.0)

    def test_rows_sum_to_one(self):
        """ It should normalize every row over the neighbors only """
        alpha = gat.gat_attention(self.rng.randn(5, 3), RING,
                                  self.rng.randn(3, 4),
                                  self.rng.randn(8, 1)).value
        self.assertMatrixAlmostEqual(alpha.sum(axis=1), np.ones(5), tol=1e-9)
        self.assertTrue(np.all(alpha[RING == 0] == 0.0))

    def test_attention_vector_shape(self):
        """ It should refuse an attention vector of the wrong length """
        with self.assertRaises(ShapeMismatchError):
            gat.gat_attention(self.rng.randn(3, 2), STAR,
                              self.rng.randn(2, 3), self.rng.randn(4, 1))

    def test_node_without_neighbor(self):
        """ It should refuse a row without any neighbor """
        adjacency = np.eye(3)
        adjacency[2, 2] = 0.0
        with self.assertRaises(InvalidDataError):
            gat.neighbor_mask(adjacency)


class TestGATForward(SetUpTabularBase):

    def setUp(self):
        super(TestGATForward, self).setUp()
        self.features = self.rng.randn(5, 3)

    def test_uniform_attention_is_row_mean_gcn(self):
        """ It should reduce to a row-mean graph convolution on 20 seeded
        graphs """
        for seed in range(20):
            with self.subTest(seed=seed):
                rng = np.random.RandomState(seed)
                n = rng.randint(3, 11)
                upper = np.triu(rng.rand(n, n) < 0.4, 1)
                adjacency = (upper | upper.T).astype(float)
                np.fill_diagonal(adjacency, 1.0)
                features = rng.randn(n, 3)
                params = gat.GATParams.initialize(3, 2, hidden=(),
                                                  seed=seed)
                params['gat0.h0.a'].value[...] = 0.0
                gcn_params = gcn.GCNParams.initialize(3, 2, hidden=(),
                                                      seed=0)
                gcn_params['gcn0.W'].value[...] = \
                    params['gat0.h0.W'].value
                expect = gcn.gcn_forward(normalize(adjacency, 'row_mean'),
                                         features, gcn_params)
                out = gat.gat_forward(adjacency, features, params)
                self.assertMatrixAlmostEqual(out, expect, tol=1e-8)

    def test_two_node_oracle(self):
        """ It should match a hand computation on two nodes """
        params = gat.GATParams.initialize(1, 1, hidden=(), seed=0)
        params['gat0.h0.W'].value[...] = 2.0
        params['gat0.h0.a'].value[...] = [[1.0], [1.0]]
        features = np.array([[1.0], [0.0]])
        # scores: leaky(2x_p + 2x_q) -> row 0 [4, 2], row 1 [2, 0]
        row0 = softmax(np.array([4.0, 2.0]))
        row1 = softmax(np.array([2.0, 0.0]))
        expect = [[row0.dot([2.0, 0.0])], [row1.dot([2.0, 0.0])]]
        out = gat.gat_forward(np.ones((2, 2)), features, params)
        self.assertMatrixAlmostEqual(out, expect, tol=1e-12)

    def test_output_shape(self):
        """ It should emit N×K logits through concatenated heads """
        params = gat.GATParams.initialize(3, 4, hidden=(8,), heads=3)
        self.assertEqual(params.specs[0].output_dim, 24)
        out = gat.gat_forward(RING, self.features, params)
        self.assertEqual(out.shape, (5, 4))

    def test_permutation_equivariance(self):
        """ It should permute logits with the nodes """
        params = gat.GATParams.initialize(3, 2, hidden=(4,), heads=2)
        order = self.rng.permutation(5)
        out = gat.gat_forward(RING, self.features, params).value
        permuted = gat.gat_forward(RING[np.ix_(order, order)],
                                   self.features[order], params).value
        self.assertMatrixAlmostEqual(permuted, out[order], tol=1e-8)

    def test_gradient(self):
        """ It should pass the gradient check through two layers """
        params = gat.GATParams.initialize(3, 2, hidden=(3,), heads=2)
        error = tensor.grad_check(
            lambda: tensor.cross_entropy(
                gat.gat_forward(RING, self.features, params),
                [0, 1, 0, 1, 1],
            ),
            params,
        )
        self.assertLessEqual(error, 1e-3)

    def test_mask_size_mismatch(self):
        """ It should refuse a mask for another node count """
        params = gat.GATParams.initialize(3, 2, hidden=())
        with self.assertRaises(ShapeMismatchError):
            gat.gat_forward(STAR, self.features, params)

    def test_model_binarizes(self):
        """ It should prepare a boolean neighbor mask """
        model = gat.GATModel(gat.GATParams.initialize(3, 2, hidden=()))
        mask = model.prepare(RING * 0.4)
        self.assertEqual(mask.dtype, np.bool_)
        self.assertTrue(np.array_equal(mask, RING != 0))
