# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

import unittest

from tabular_gnn.backend import Backend, benchmark
from tabular_gnn.exception import InvalidConfigError
from tabular_gnn.models.methods import GCNRunner, MethodRunner


class Unit(object):
    _method_name = None


class TestBackend(unittest.TestCase):

    def setUp(self):
        super(TestBackend, self).setUp()
        self.backend = Backend('test')

    def test_decorator_registers(self):
        """ It should register and return the decorated class """

        @self.backend
        class Runner(Unit):
            _method_name = 'gcn'

        self.assertEqual(self.backend.get_class(Unit, 'gcn'), Runner)

    def test_requires_method_name(self):
        """ It should refuse a unit without a method name """
        with self.assertRaises(InvalidConfigError):
            self.backend.register_class(Unit)

    def test_multiple_names(self):
        """ It should serve every name of a tuple of method names """

        @self.backend
        class Runner(Unit):
            _method_name = ('mlp', 'lr')

        self.assertEqual(self.backend.method_names(Unit), ['lr', 'mlp'])
        self.assertEqual(self.backend.get_class(Unit, 'lr'), Runner)

    def test_base_class_filter(self):
        """ It should ignore units of another base class """

        @self.backend
        class Runner(Unit):
            _method_name = 'gat'

        with self.assertRaises(InvalidConfigError):
            self.backend.get_class(MethodRunner, 'gat')

    def test_unknown_name(self):
        """ It should raise for an unregistered method name """
        with self.assertRaises(InvalidConfigError):
            self.backend.get_class(Unit, 'tabnet')

    def test_repr(self):
        """ It should show the backend name """
        self.assertEqual(repr(self.backend), "<Backend 'test'>")

    def test_benchmark_backend(self):
        """ It should hold the method runners on the shared backend """
        self.assertIs(benchmark.get_class(MethodRunner, 'gcn'), GCNRunner)
