# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Run directories: writing benchmark results and reading them back.

A run directory holds ``manifest.json``, ``fold_plan.csv``,
``folds.jsonl``, ``folds.csv``, ``summary.csv``, ``significance.csv`` and,
when a grid was searched, ``grid.csv``. Every file is written atomically.
"""

import logging
import os
from collections import OrderedDict

from ..exception import InvalidDataError
from ..models.dataset import export_fold_plan
from .csv_adapter import CsvAdapter
from .mapper import (FoldRecordMapper,
                     GridRecordMapper,
                     SignificanceRecordMapper,
                     SummaryRecordMapper,
                     )

_logger = logging.getLogger(__name__)

try:
    import pandas as pd
except ImportError:
    _logger.warning('Cannot import pandas')

MANIFEST = 'manifest.json'
FOLD_PLAN = 'fold_plan.csv'
FOLDS_JSON = 'folds.jsonl'
FOLDS_CSV = 'folds.csv'
GRID = 'grid.csv'
SUMMARY = 'summary.csv'
SIGNIFICANCE = 'significance.csv'

# one marker per baseline, in baseline order
MARKERS = ('*', '+', '#')
FLOAT_FORMAT = '%.4f'


def _summary_source(report, selected=None):
    return {
        'report': report,
        'spec': report.spec,
        'mean': report.mean,
        'std': report.std,
        'val_mean': report.mean_val_f1,
        'selected': selected,
    }


class RunExporter(object):
    """ Write a :class:`BenchmarkRun` into a run directory """

    def __init__(self, run_dir, adapter=None):
        self.run_dir = run_dir
        self.adapter = adapter or CsvAdapter()

    def _path(self, name):
        return os.path.join(self.run_dir, name)

    def fold_records(self, run):
        mapper = FoldRecordMapper()
        return [
            mapper.map_record({
                'dataset': run.dataset,
                'spec': report.spec,
                'outcome': outcome,
            })
            for report in run.reports
            for outcome in report.outcomes
        ]

    def summary_records(self, run):
        mapper = SummaryRecordMapper()
        return [mapper.map_record(_summary_source(report))
                for report in run.reports if report.successes]

    def grid_records(self, run):
        mapper = GridRecordMapper()
        selected = set(id(report) for report in run.reports)
        records = []
        for reports in run.grids.values():
            for report in reports:
                records.append(mapper.map_record(
                    _summary_source(report, id(report) in selected),
                ))
        return records

    def significance_records(self, run):
        mapper = SignificanceRecordMapper()
        matrix = run.significance
        return [
            mapper.map_record({
                'dataset': run.dataset,
                'comparison': comparison,
                'significant': int(comparison.significant(matrix.alpha)),
            })
            for comparison in matrix.comparisons
        ]

    def export(self, run, plan=None):
        """ Write every artifact of ``run``
        :return: Path of the run directory
        """
        adapter = self.adapter
        adapter.write_json(self._path(MANIFEST), run.manifest)
        if plan is not None:
            export_fold_plan(plan, self._path(FOLD_PLAN))
        folds = self.fold_records(run)
        adapter.write_json_lines(self._path(FOLDS_JSON), folds)
        adapter.write_records(self._path(FOLDS_CSV), folds,
                              FoldRecordMapper.columns)
        adapter.write_records(self._path(SUMMARY),
                              self.summary_records(run),
                              SummaryRecordMapper.columns,
                              float_format=FLOAT_FORMAT)
        adapter.write_records(self._path(SIGNIFICANCE),
                              self.significance_records(run),
                              SignificanceRecordMapper.columns,
                              float_format=FLOAT_FORMAT)
        if run.grids:
            adapter.write_records(self._path(GRID), self.grid_records(run),
                                  GridRecordMapper.columns,
                                  float_format=FLOAT_FORMAT)
        _logger.info('Wrote run %s to %s', run.dataset, self.run_dir)
        return self.run_dir


class RunReader(object):
    """ Read the summary and significance tables of a run directory """

    def __init__(self, run_dir, adapter=None):
        self.run_dir = run_dir
        self.adapter = adapter or CsvAdapter()

    def _require(self, name):
        path = os.path.join(self.run_dir, name)
        if not os.path.isfile(path):
            raise InvalidDataError(
                '%s is not a run directory: %s is missing' % (
                    self.run_dir, name,
                )
            )
        return path

    def summary(self):
        frame = self.adapter.read(self._require(SUMMARY))
        missing = set(SummaryRecordMapper.columns) - set(frame.columns)
        if missing:
            raise InvalidDataError(
                '%s lacks columns %s' % (self.run_dir, sorted(missing)),
            )
        return frame

    def significance(self):
        path = self._require(SIGNIFICANCE)
        try:
            return self.adapter.read(path)
        except InvalidDataError:
            # a run without baselines writes a header only
            return pd.DataFrame(columns=SignificanceRecordMapper.columns)

    def manifest(self):
        return self.adapter.read_json(self._require(MANIFEST))


def format_cell(mean, std, markers=''):
    """ ``0.972 (0.030)`` followed by significance markers """
    return '%.3f (%.3f)%s' % (mean, std, markers)


def consolidate(run_dirs):
    """ Merge run summaries into one methods × datasets table

    Each cell reads ``mean (std)`` plus one marker per baseline the method
    differs from significantly: ``*`` for the first baseline, ``+`` for the
    second, ``#`` for the third.

    :rtype: :class:`pandas.DataFrame`
    """
    if not run_dirs:
        raise InvalidDataError('Need at least one run directory')
    cells = OrderedDict()
    datasets = []
    for run_dir in run_dirs:
        reader = RunReader(run_dir)
        summary = reader.summary()
        significance = reader.significance()
        baselines = list(OrderedDict.fromkeys(
            str(b) for b in significance.get('baseline', [])
        ))[:len(MARKERS)]
        for _, row in summary.iterrows():
            dataset = str(row['dataset'])
            if dataset not in datasets:
                datasets.append(dataset)
            method = str(row['method'])
            marks = ''
            for marker, baseline in zip(MARKERS, baselines):
                if baseline == method:
                    continue
                hit = significance[
                    (significance['method'].astype(str) == method) &
                    (significance['baseline'].astype(str) == baseline)
                ]
                if len(hit) and int(hit['significant'].iloc[0]):
                    marks += marker
            cells.setdefault(method, OrderedDict())[dataset] = format_cell(
                float(row['mean']), float(row['std']), marks,
            )
    frame = pd.DataFrame.from_dict(cells, orient='index', columns=datasets)
    frame.index.name = 'method'
    return frame.fillna('-').reset_index()
