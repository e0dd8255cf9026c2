# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Cross-validation, graph hyperparameter grids and paired method comparison.

Every (method, grid cell, fold) is an independent task whose randomness is
derived from the run seed and the fold id, so a pooled run returns the
same reports as a sequential one.
"""

import logging
import time
from collections import OrderedDict
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ..exception import (BenchmarkException,
                         FailedFoldError,
                         InvalidConfigError,
                         InvalidDataError,
                         MismatchedFoldPlanError,
                         NoSuccessfulFoldError,
                         )
from ..unit.batch_runner import get_batch_runner
from ..unit.trainer import TrainConfig
from .dataset import fold_plan_hash, scale_features, split_for_test_fold
from .graph import MODES, SimilarityConfig
from .methods import ModelConfig, get_runner
from .metrics import weighted_f1, wilcoxon_signed_rank

_logger = logging.getLogger(__name__)

# thresholds 0.0, 0.1, ..., 1.0
GRID_THRESHOLDS = tuple(float(t) for t in np.round(np.linspace(0, 1, 11), 1))
ALPHA = 0.05


def fold_seed(seed, fold):
    """ Seed of one fold, derived from the run seed """
    sequence = np.random.SeedSequence([int(seed), int(fold)])
    return int(sequence.generate_state(1)[0])


@dataclass(frozen=True)
class MethodSpec(object):
    """ One method with its graph, architecture and training settings

    Graph methods require a :class:`SimilarityConfig`, feature-only methods
    forbid one.
    """

    method: str
    graph: SimilarityConfig = None
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    name: str = None

    def __post_init__(self):
        runner = get_runner(self.method)
        if runner.graph_input and self.graph is None:
            raise InvalidConfigError(
                '%s needs a similarity configuration' % self.method,
            )
        if not runner.graph_input and self.graph is not None:
            raise InvalidConfigError(
                '%s does not take a similarity configuration' % self.method,
            )

    @property
    def graph_method(self):
        return self.graph is not None

    @property
    def label(self):
        """ ``LR``, ``MLP`` or ``GCN_CB`` style method label """
        if self.graph is None:
            return self.method.upper()
        return '%s_%s' % (self.method.upper(), self.graph.code)

    @property
    def key(self):
        """ Name given in the run configuration, else the label """
        return self.name or self.label

    def with_graph(self, graph):
        return replace(self, graph=graph)

    def as_dict(self):
        record = OrderedDict([
            ('method', self.method),
            ('label', self.label),
            ('graph', self.graph.as_dict() if self.graph else None),
            ('model', asdict(self.model)),
            ('train', asdict(self.train)),
        ])
        return record


@dataclass(frozen=True)
class FoldOutcome(object):
    """ Result of one test fold; ``f1`` is ``None`` for a failed fold """

    fold: int
    f1: float = None
    val_f1: float = None
    epochs_ran: int = 0
    wall_time_ms: float = 0.0
    graph_nodes: int = 0
    error: str = None
    detail: dict = field(default_factory=dict)

    @property
    def failed(self):
        return self.f1 is None


@dataclass
class CVReport(object):
    """ Outcomes of every test fold of one method

    Mean and standard deviation run over successful folds only.
    """

    spec: MethodSpec
    outcomes: list
    plan_hash: str
    dataset: str = 'dataset'

    @property
    def label(self):
        return self.spec.label

    @property
    def successes(self):
        return [o for o in self.outcomes if not o.failed]

    @property
    def per_fold_f1(self):
        return [o.f1 for o in self.successes]

    @property
    def failures(self):
        return [o.fold for o in self.outcomes if o.failed]

    @property
    def mean(self):
        scores = self.per_fold_f1
        return float(np.mean(scores)) if scores else None

    @property
    def std(self):
        scores = self.per_fold_f1
        return float(np.std(scores)) if scores else None

    @property
    def mean_val_f1(self):
        scores = [o.val_f1 for o in self.successes]
        return float(np.mean(scores)) if scores else None

    def scores_by_fold(self):
        """ Test F1 keyed by fold id, successful folds only """
        return OrderedDict((o.fold, o.f1) for o in self.successes)


def run_fold(spec, table, plan, fold, seed):
    """ Fit and score ``spec`` on one test fold

    Features are min-max scaled with ranges fitted on the train and
    validation rows of the fold. Failures raised by training become failed
    outcomes.

    :rtype: FoldOutcome
    """
    split = split_for_test_fold(plan, fold)
    train = replace(spec.train, seed=fold_seed(seed, fold))
    start = time.perf_counter()
    scaled = scale_features(table, split.training_rows())
    runner = get_runner(spec.method)(scaled, spec.model, train, spec.graph)
    try:
        fit = runner.run(split)
    except FailedFoldError as e:
        _logger.warning('%s fold %d failed: %s', spec.label, fold, e)
        return FoldOutcome(
            fold=fold,
            epochs_ran=e.epoch or 0,
            wall_time_ms=(time.perf_counter() - start) * 1000.0,
            error=str(e),
        )
    wall_time_ms = (time.perf_counter() - start) * 1000.0
    # test labels are read here only, after the runner returned
    f1 = weighted_f1(table.labels[split.test], fit.predictions,
                     table.class_count)
    _logger.info('%s on %s fold %d: F1 %.4f (%d epochs)', spec.label,
                 table.name, fold, f1, fit.epochs_ran)
    return FoldOutcome(
        fold=fold,
        f1=f1,
        val_f1=fit.val_f1,
        epochs_ran=fit.epochs_ran,
        wall_time_ms=wall_time_ms,
        graph_nodes=fit.graph_nodes,
        detail=fit.detail,
    )


def _check_plan(table, plan):
    if plan.assignments.size != table.n_samples:
        raise InvalidDataError(
            'Fold plan covers %d rows, %s has %d' % (
                plan.assignments.size, table.name, table.n_samples,
            )
        )


def evaluate_specs(specs, table, plan, seed=0, jobs=1):
    """ Run every fold of every spec as one batch of tasks
    :return: One :class:`CVReport` per spec, failed folds included
    :rtype: list
    """
    _check_plan(table, plan)
    specs = list(specs)
    tasks = [
        (run_fold, (spec, table, plan, fold, seed))
        for spec in specs
        for fold in range(plan.k)
    ]
    outcomes = get_batch_runner(jobs, len(tasks)).run(tasks)
    plan_hash = fold_plan_hash(plan)
    reports = []
    for i, spec in enumerate(specs):
        reports.append(CVReport(
            spec=spec,
            outcomes=list(outcomes[i * plan.k:(i + 1) * plan.k]),
            plan_hash=plan_hash,
            dataset=table.name,
        ))
    return reports


def cross_validate(spec, table, plan, seed=0, jobs=1):
    """ Score ``spec`` on each test fold of ``plan``
    :rtype: CVReport
    :raises NoSuccessfulFoldError: when every fold failed
    """
    report = evaluate_specs([spec], table, plan, seed=seed, jobs=jobs)[0]
    if not report.successes:
        raise NoSuccessfulFoldError(
            'Every fold of %s on %s failed' % (spec.label, table.name),
        )
    return report


@dataclass(frozen=True)
class GridPlan(object):
    """ Graph hyperparameters searched for one graph method """

    metrics: tuple = ('cosine',)
    thresholds: tuple = GRID_THRESHOLDS
    modes: tuple = MODES

    def __post_init__(self):
        if not (self.metrics and self.thresholds and self.modes):
            raise InvalidConfigError('A grid needs at least one cell')
        object.__setattr__(self, 'metrics', tuple(self.metrics))
        object.__setattr__(self, 'thresholds',
                           tuple(float(t) for t in self.thresholds))
        object.__setattr__(self, 'modes', tuple(self.modes))

    def cells(self, scaling='global'):
        """ Similarity configurations in selection order
        :rtype: list
        """
        return [
            SimilarityConfig(metric=metric, threshold=threshold, mode=mode,
                             scaling=scaling)
            for metric in self.metrics
            for mode in self.modes
            for threshold in self.thresholds
        ]

    def __len__(self):
        return len(self.metrics) * len(self.thresholds) * len(self.modes)


@dataclass
class GridResult(object):
    """ Every grid cell of one method and the cell selected on validation
    """

    best: CVReport
    reports: list

    @property
    def best_spec(self):
        return self.best.spec


def select_best(reports):
    """ Report with the highest mean validation F1; ties keep grid order """
    best = None
    for report in reports:
        score = report.mean_val_f1
        if score is None:
            continue
        if best is None or score > best.mean_val_f1:
            best = report
    return best


def grid_search_graph(spec, table, plan, grid=None, seed=0, jobs=1):
    """ Cross-validate ``spec`` on every cell of ``grid``

    The cell with the best mean validation-fold F1 is selected, test
    scores never take part in the choice.

    :rtype: GridResult
    :raises InvalidConfigError: for a feature-only method
    :raises NoSuccessfulFoldError: when every cell failed on every fold
    """
    if not spec.graph_method:
        raise InvalidConfigError(
            'Graph grid search needs a graph method, got %s' % spec.method,
        )
    grid = grid or GridPlan(metrics=(spec.graph.metric,))
    specs = [spec.with_graph(cell)
             for cell in grid.cells(spec.graph.scaling)]
    reports = evaluate_specs(specs, table, plan, seed=seed, jobs=jobs)
    best = select_best(reports)
    if best is None:
        raise NoSuccessfulFoldError(
            'Every grid cell of %s on %s failed' % (spec.method, table.name),
        )
    _logger.info('%s on %s: best cell %s threshold %s (val F1 %.4f)',
                 spec.method, table.name, best.spec.graph.code,
                 best.spec.graph.threshold, best.mean_val_f1)
    return GridResult(best=best, reports=reports)


@dataclass
class SignificanceMatrix(object):
    """ Wilcoxon comparisons of every method against every baseline """

    comparisons: list
    alpha: float = ALPHA

    def get(self, method, baseline):
        for comparison in self.comparisons:
            if (comparison.method_a, comparison.method_b) == (method,
                                                              baseline):
                return comparison
        raise KeyError((method, baseline))

    def marked(self, method, baseline):
        return self.get(method, baseline).significant(self.alpha)

    def baselines(self):
        return list(OrderedDict.fromkeys(c.method_b
                                         for c in self.comparisons))


def paired_scores(report_a, report_b):
    """ Test F1 of both reports on folds where both succeeded """
    a = report_a.scores_by_fold()
    b = report_b.scores_by_fold()
    folds = [fold for fold in a if fold in b]
    return [a[f] for f in folds], [b[f] for f in folds]


def compare_methods(reports, baselines, alpha=ALPHA, method='auto'):
    """ Paired Wilcoxon test of each report against each baseline

    :param reports: :class:`CVReport` list sharing one fold plan
    :param baselines: Baseline keys (or labels) among ``reports``
    :rtype: SignificanceMatrix
    :raises MismatchedFoldPlanError: when reports use different plans
    """
    reports = list(reports)
    hashes = set(report.plan_hash for report in reports)
    if len(hashes) > 1:
        raise MismatchedFoldPlanError(
            'Reports were built on %d different fold plans' % len(hashes),
        )
    by_key = OrderedDict()
    for report in reports:
        by_key.setdefault(report.spec.key, report)
        by_key.setdefault(report.label, report)
    comparisons = []
    for baseline in baselines:
        if baseline not in by_key:
            raise InvalidConfigError('Unknown baseline %r' % baseline)
        base_report = by_key[baseline]
        for report in reports:
            a, b = paired_scores(report, base_report)
            comparisons.append(wilcoxon_signed_rank(
                a, b, method=method,
                name_a=report.spec.key, name_b=base_report.spec.key,
            ))
    return SignificanceMatrix(comparisons=comparisons, alpha=alpha)


@dataclass
class BenchmarkRun(object):
    """ Everything one benchmark run produced, ready for export """

    dataset: str
    reports: list
    grids: dict
    significance: SignificanceMatrix
    manifest: dict
    errors: dict = field(default_factory=dict)

    @property
    def failed(self):
        return not any(report.successes for report in self.reports)


def run_benchmark(table, plan, plans, baselines=(), seed=0, jobs=None,
                  manifest=None):
    """ Cross-validate each method plan and compare against the baselines

    :param plans: ``(MethodSpec, GridPlan or None)`` pairs; graph methods
        with a grid report their selected cell
    :param jobs: Worker count; ``None`` or 0 runs each method on the
        physical cores, capped by its fold count times its grid size
    :rtype: BenchmarkRun
    """
    reports, grids, errors = [], OrderedDict(), OrderedDict()
    for spec, grid in plans:
        try:
            if grid is not None and spec.graph_method:
                result = grid_search_graph(spec, table, plan, grid=grid,
                                           seed=seed, jobs=jobs)
                grids[spec.key] = result.reports
                report = result.best
            else:
                report = evaluate_specs([spec], table, plan, seed=seed,
                                        jobs=jobs)[0]
        except BenchmarkException as e:
            _logger.warning('%s failed on %s: %s', spec.key, table.name, e)
            errors[spec.key] = str(e)
            continue
        reports.append(report)
    usable = [r for r in reports if r.successes]
    keys = set(r.spec.key for r in usable) | set(r.label for r in usable)
    baselines = [b for b in baselines if b in keys]
    significance = compare_methods(usable, baselines) if usable \
        else SignificanceMatrix(comparisons=[])
    return BenchmarkRun(
        dataset=table.name,
        reports=reports,
        grids=grids,
        significance=significance,
        manifest=manifest or {},
        errors=errors,
    )
