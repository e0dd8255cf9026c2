# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

from dataclasses import replace

import mock
import numpy as np

from tabular_gnn.exception import InvalidConfigError
from tabular_gnn.models import methods
from tabular_gnn.models.graph import SimilarityConfig

from ..common import EndTestException, SetUpTabularBase


class TestModelConfig(SetUpTabularBase):

    def test_lr_grid_full(self):
        """ It should search every penalty and C, l1 first """
        grid = methods.ModelConfig().lr_grid()
        self.assertEqual(len(grid), 12)
        self.assertEqual(grid[0], ('l1', 0.01))
        self.assertEqual(grid[-1], ('l2', 5.0))

    def test_lr_grid_fixed(self):
        """ It should only try the configured penalty and C """
        grid = methods.ModelConfig(penalty='l2', c=0.5).lr_grid()
        self.assertEqual(grid, [('l2', 0.5)])

    def test_unknown_normalization(self):
        """ It should refuse an unknown normalization """
        with self.assertRaises(InvalidConfigError):
            methods.ModelConfig(normalization='left')

    def test_hidden_tuple(self):
        """ It should store hidden widths as a tuple of ints """
        config = methods.ModelConfig(hidden=['8', 4])
        self.assertEqual(config.hidden, (8, 4))


class TestRegistry(SetUpTabularBase):

    def test_method_names(self):
        """ It should register the five methods """
        self.assertEqual(methods.method_names(),
                         ['gat', 'gate', 'gcn', 'lr', 'mlp'])

    def test_get_runner(self):
        """ It should return the runner of a method """
        self.assertIs(methods.get_runner('gcn'), methods.GCNRunner)

    def test_get_runner_unknown(self):
        """ It should raise for an unregistered method """
        with self.assertRaises(InvalidConfigError):
            methods.get_runner('tabnet')


class RunnerCase(SetUpTabularBase):

    def setUp(self):
        super(RunnerCase, self).setUp()
        self.model_config = methods.ModelConfig(hidden=(6,), heads=2,
                                                embedding_dim=3,
                                                penalty='l2', c=1.0)
        self.graph_config = SimilarityConfig(threshold=0.5)

    def _runner(self, cls, **kwargs):
        return cls(self.synthetic, self.model_config,
                   kwargs.pop('train', self.train_config),
                   kwargs.pop('graph', self.graph_config))

    def assertFit(self, fit):
        self.assertEqual(fit.predictions.shape, self.split.test.shape)
        self.assertTrue(np.all((fit.predictions >= 0) &
                               (fit.predictions < 2)))
        self.assertTrue(0.0 <= fit.val_f1 <= 1.0)
        self.assertGreaterEqual(fit.epochs_ran, 1)


class TestFeatureRunners(RunnerCase):

    def test_lr_run(self):
        """ It should fit logistic regression and report its grid cell """
        fit = self._runner(methods.LRRunner, graph=None).run(self.split)
        self.assertFit(fit)
        self.assertEqual(fit.detail, {'penalty': 'l2', 'c': 1.0})
        self.assertEqual(fit.graph_nodes, 0)

    def test_lr_selects_first_best(self):
        """ It should keep the first cell among equal validation scores """
        runner = methods.LRRunner(self.synthetic, methods.ModelConfig(),
                                  self.train_config)
        model = mock.MagicMock()
        result = mock.MagicMock(epochs_ran=3)
        with mock.patch.object(runner, '_fit_one') as fit_one, \
                mock.patch.object(methods, 'predict_inductive') as predict:
            fit_one.return_value = (model, result, 0.5)
            predict.return_value = np.zeros(self.split.test.size)
            fit = runner.run(self.split)
        self.assertEqual(fit_one.call_count, 12)
        self.assertEqual(fit.detail, {'penalty': 'l1', 'c': 0.01})

    def test_mlp_run(self):
        """ It should fit the perceptron with the configured widths """
        fit = self._runner(methods.MLPRunner, graph=None).run(self.split)
        self.assertFit(fit)

    def test_mlp_default_architecture(self):
        """ It should default to the 256-128-64 hidden layers """
        runner = methods.MLPRunner(self.synthetic, methods.ModelConfig(),
                                   self.train_config)
        with mock.patch.object(methods, 'MLPParams') as params, \
                mock.patch.object(methods, 'train_supervised'), \
                mock.patch.object(methods, 'predict_inductive') as predict:
            params.initialize.side_effect = EndTestException
            with self.assertRaises(EndTestException):
                runner.run(self.split)
        self.assertEqual(params.initialize.call_args[1]['hidden'],
                         (256, 128, 64))
        predict.assert_not_called()


class TestGraphRunners(RunnerCase):

    def test_graph_runner_needs_config(self):
        """ It should refuse a graph method without a similarity config """
        with self.assertRaises(InvalidConfigError):
            methods.GCNRunner(self.synthetic, self.model_config,
                              self.train_config)

    def test_gcn_run(self):
        """ It should train on the nine non-test folds """
        fit = self._runner(methods.GCNRunner).run(self.split)
        self.assertFit(fit)
        self.assertEqual(fit.graph_nodes,
                         self.split.training_rows().size)

    def test_gcn_validation_out_of_graph(self):
        """ It should train on train rows only when asked to """
        train = replace(self.train_config, validation_in_graph=False)
        fit = self._runner(methods.GCNRunner, train=train).run(self.split)
        self.assertFit(fit)
        self.assertEqual(fit.graph_nodes, self.split.train.size)

    def test_training_graph_has_no_test_row(self):
        """ It should keep test rows out of the training graph """
        graph, validation = self._runner(methods.GCNRunner)\
            ._training_graphs(self.split)
        self.assertIsNone(validation)
        self.assertFalse(np.isin(self.split.test, graph.indices).any())

    def test_gat_binarizes(self):
        """ It should train attention on binary graphs """
        graph, _ = self._runner(methods.GATRunner)\
            ._training_graphs(self.split)
        self.assertTrue(np.all(np.isin(graph.weights, [0.0, 1.0])))

    def test_gat_run(self):
        """ It should fit the attention classifier """
        self.assertFit(self._runner(methods.GATRunner).run(self.split))

    def test_gate_run(self):
        """ It should fit the autoencoder and its downstream regression """
        fit = self._runner(methods.GATERunner).run(self.split)
        self.assertFit(fit)
        self.assertIn('downstream_epochs', fit.detail)
        self.assertEqual(fit.detail['penalty'], 'l2')
        self.assertEqual(fit.graph_nodes,
                         self.split.training_rows().size)
