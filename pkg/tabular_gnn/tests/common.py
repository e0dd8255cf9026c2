# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Helpers usable in the tests
"""

import shutil
import tempfile
import unittest
from contextlib import contextmanager

import mock
import numpy as np

from tabular_gnn.models.dataset import (DataTable,
                                        SyntheticSpec,
                                        generate_synthetic,
                                        scale_features,
                                        split_for_test_fold,
                                        stratified_kfold,
                                        )
from tabular_gnn.unit.trainer import TrainConfig


@contextmanager
def mock_runner(method_runner):
    """ Mock the ``run`` of a method runner class for testing """
    with mock.patch.object(method_runner, 'run') as run:
        yield run


class EndTestException(Exception):
    """ It is a dummy Exception used to stop tests """
    pass


class SetUpTabularBase(unittest.TestCase):
    """ Base class - small seeded tables, folds and a quick train config """

    def setUp(self):
        super(SetUpTabularBase, self).setUp()
        self.rng = np.random.RandomState(1234)
        self.synthetic = scale_features(generate_synthetic(SyntheticSpec(
            samples=40, features=3, classes=2, seed=3,
        )))
        self.plan = stratified_kfold(self.synthetic, k=10, seed=0)
        self.split = split_for_test_fold(self.plan, 0)
        self.train_config = TrainConfig(max_epochs=30, patience=10,
                                        learning_rate=0.01, batch_size=16,
                                        seed=0)

    def new_temp_dir(self):
        path = tempfile.mkdtemp(prefix='tabular-gnn-')
        self.addCleanup(shutil.rmtree, path, ignore_errors=True)
        return path

    def new_table(self, features, labels, class_count=None, name='toy'):
        features = np.asarray(features, dtype=np.float64)
        labels = np.asarray(labels)
        return DataTable(
            features=features,
            labels=labels,
            feature_names=['f%d' % i for i in range(features.shape[1])],
            class_count=class_count or int(labels.max()) + 1,
            name=name,
        )

    def separable_table(self, rows_per_class=10):
        """ Two well separated 2D clusters, already in [0, 1] """
        first = self.rng.uniform(0.0, 0.2, size=(rows_per_class, 2))
        second = self.rng.uniform(0.8, 1.0, size=(rows_per_class, 2))
        features = np.vstack([first, second])
        labels = np.array([0] * rows_per_class + [1] * rows_per_class)
        return self.new_table(features, labels, name='separable')

    def assertMatrixAlmostEqual(self, first, second, tol=1e-8):
        first = np.asarray(getattr(first, 'value', first))
        second = np.asarray(getattr(second, 'value', second))
        self.assertEqual(first.shape, second.shape)
        self.assertTrue(
            np.allclose(first, second, atol=tol, rtol=0),
            'Max deviation %s' % np.max(np.abs(first - second)),
        )
