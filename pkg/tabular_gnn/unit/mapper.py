# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Record mappers turn benchmark results into flat rows for the exporter.

A mapper lists ``direct`` mappings, ``(source, target)`` pairs where the
source is a record key or a modifier, and ``@mapping`` methods returning a
dict of target values. ``columns`` fixes the order of the output row.
"""

from collections import OrderedDict


def mapping(func):
    """ Declare a method of a :class:`Mapper` as a mapping method """
    func.is_mapping = True
    return func


def rounded(field, digits=4):
    """ A modifier intended to be used on the ``direct`` mappings.
    Round a float value, keeping ``None`` as is
    Example::
        direct = [(rounded('source', 4), 'target')]
    :param field: name of the source field in the record
    :param digits: number of decimals kept
    """

    def modifier(self, record, to_attr):
        value = record.get(field)
        if value is None:
            return None
        return round(float(value), digits)
    return modifier


def graph_field(name):
    """ A modifier intended to be used on the ``direct`` mappings.
    Read ``name`` from the similarity config of the record spec, empty for
    feature-only methods
    Example::
        direct = [(graph_field('threshold'), 'threshold')]
    :param name: attribute of :class:`SimilarityConfig`
    """

    def modifier(self, record, to_attr):
        graph = record['spec'].graph
        if graph is None:
            return ''
        return getattr(graph, name)
    return modifier


class Mapper(object):
    """ Base mapper: applies ``direct`` mappings, then mapping methods """

    direct = []
    columns = []

    def _mapping_methods(self):
        for name in sorted(dir(self.__class__)):
            method = getattr(self.__class__, name)
            if getattr(method, 'is_mapping', False):
                yield getattr(self, name)

    def map_record(self, record):
        """ Map a source record
        :param record: Source values
        :type record: dict
        :rtype: collections.OrderedDict
        """
        values = {}
        for source, target in self.direct:
            if callable(source):
                values[target] = source(self, record, target)
            else:
                values[target] = record.get(source)
        for method in self._mapping_methods():
            values.update(method(record) or {})
        if not self.columns:
            return OrderedDict(sorted(values.items()))
        return OrderedDict((column, values.get(column))
                           for column in self.columns)

    def map_records(self, records):
        return [self.map_record(record) for record in records]


class FoldRecordMapper(Mapper):
    """ One row per fold of one method; source keys ``dataset``, ``spec``
    and ``outcome``
    """

    columns = ['dataset', 'method', 'label', 'metric', 'threshold', 'mode',
               'fold', 'f1', 'val_f1', 'epochs_ran', 'wall_time_ms',
               'graph_nodes', 'status', 'error']
    direct = [
        ('dataset', 'dataset'),
        (graph_field('metric'), 'metric'),
        (graph_field('threshold'), 'threshold'),
        (graph_field('mode'), 'mode'),
    ]

    @mapping
    def method(self, record):
        spec = record['spec']
        return {'method': spec.key, 'label': spec.label}

    @mapping
    def outcome(self, record):
        outcome = record['outcome']
        return {
            'fold': outcome.fold,
            'f1': outcome.f1,
            'val_f1': outcome.val_f1,
            'epochs_ran': outcome.epochs_ran,
            'wall_time_ms': round(outcome.wall_time_ms, 3),
            'graph_nodes': outcome.graph_nodes,
            'status': 'failed' if outcome.failed else 'ok',
            'error': outcome.error or '',
        }


class SummaryRecordMapper(Mapper):
    """ One row per method report; source keys ``report`` and ``spec`` """

    columns = ['dataset', 'method', 'label', 'metric', 'threshold', 'mode',
               'mean', 'std', 'val_mean', 'successes', 'failures']
    direct = [
        (graph_field('metric'), 'metric'),
        (graph_field('threshold'), 'threshold'),
        (graph_field('mode'), 'mode'),
        (rounded('mean'), 'mean'),
        (rounded('std'), 'std'),
        (rounded('val_mean'), 'val_mean'),
    ]

    @mapping
    def report(self, record):
        report = record['report']
        return {
            'dataset': report.dataset,
            'method': report.spec.key,
            'label': report.label,
            'successes': len(report.successes),
            'failures': ' '.join(str(f) for f in report.failures),
        }


class GridRecordMapper(SummaryRecordMapper):
    """ Summary row of one grid cell, flagged when it was selected """

    columns = SummaryRecordMapper.columns + ['selected']

    @mapping
    def selected(self, record):
        return {'selected': int(bool(record.get('selected')))}


class SignificanceRecordMapper(Mapper):
    """ One row per method and baseline; source key ``comparison`` """

    columns = ['dataset', 'method', 'baseline', 'statistic', 'p_value',
               'n_effective', 'mean_difference', 'significant',
               'degenerate']
    direct = [
        ('dataset', 'dataset'),
        ('significant', 'significant'),
    ]

    @mapping
    def comparison(self, record):
        comparison = record['comparison']
        return {
            'method': comparison.method_a,
            'baseline': comparison.method_b,
            'statistic': comparison.statistic,
            'p_value': round(comparison.p_value, 4),
            'n_effective': comparison.n_effective,
            'mean_difference': round(comparison.mean_difference, 4),
            'degenerate': int(comparison.degenerate),
        }
