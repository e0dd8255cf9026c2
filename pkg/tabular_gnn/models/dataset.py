# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Tabular datasets: ingestion, scaling, fold plans and the synthetic set.
"""

import hashlib
import logging
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from ..exception import InvalidConfigError, InvalidDataError

_logger = logging.getLogger(__name__)

try:
    from scipy.spatial.distance import pdist
    from sklearn.datasets import make_blobs
    from sklearn.model_selection import KFold, StratifiedKFold
    from sklearn.preprocessing import MinMaxScaler
except ImportError:
    _logger.warning('Cannot import scikit-learn')

FOLD_COUNT = 10
VALIDATION_FOLDS = 2


def _frozen(array, dtype):
    array = np.array(array, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DataTable(object):
    """ N×d feature matrix with integer class labels in ``[0, K)`` """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple
    class_count: int
    name: str = 'dataset'
    class_names: tuple = field(default=())

    def __post_init__(self):
        features = _frozen(self.features, np.float64)
        labels = _frozen(self.labels, np.intp)
        if features.ndim != 2 or features.shape[0] < 1 or \
                features.shape[1] < 1:
            raise InvalidDataError('A table needs N >= 1 rows and d >= 1 '
                                   'feature columns')
        if labels.ndim != 1 or labels.size != features.shape[0]:
            raise InvalidDataError(
                'Got %d labels for %d rows' % (labels.size,
                                               features.shape[0]),
            )
        if not np.all(np.isfinite(features)):
            raise InvalidDataError('Features must be finite')
        if self.class_count < 2:
            raise InvalidDataError(
                'class_count < 2: %s has %d class(es)' % (
                    self.name, self.class_count,
                )
            )
        if labels.min() < 0 or labels.max() >= self.class_count:
            raise InvalidDataError(
                'Labels must lie in [0, %d)' % self.class_count,
            )
        if len(self.feature_names) != features.shape[1]:
            raise InvalidDataError('One feature name is needed per column')
        missing = set(range(self.class_count)) - set(labels.tolist())
        if missing:
            raise InvalidDataError(
                'Classes %s have zero samples' % sorted(missing),
            )
        object.__setattr__(self, 'features', features)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'feature_names', tuple(self.feature_names))
        object.__setattr__(self, 'class_names', tuple(self.class_names))

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def class_counts(self):
        return np.bincount(self.labels, minlength=self.class_count)

    def with_features(self, features):
        """ Return a copy of the table holding ``features`` instead """
        return DataTable(
            features=features,
            labels=self.labels,
            feature_names=self.feature_names,
            class_count=self.class_count,
            name=self.name,
            class_names=self.class_names,
        )

    def subset(self, indices):
        """ Rows ``indices`` as a new table, keeping ``class_count``

        Classes absent from the subset are allowed here, the class count of
        the source table is what models are sized with.
        """
        indices = np.asarray(indices, dtype=np.intp)
        table = object.__new__(DataTable)
        for name, value in (
            ('features', _frozen(self.features[indices], np.float64)),
            ('labels', _frozen(self.labels[indices], np.intp)),
            ('feature_names', self.feature_names),
            ('class_count', self.class_count),
            ('name', self.name),
            ('class_names', self.class_names),
        ):
            object.__setattr__(table, name, value)
        return table


DatasetSummary = namedtuple(
    'DatasetSummary',
    'name samples features classes class_counts fs_ratio',
)


@dataclass(frozen=True)
class FoldPlan(object):
    """ Fold id in ``[0, k)`` for every row, plus the seed that drew it """

    assignments: np.ndarray
    seed: int
    k: int = FOLD_COUNT

    def __post_init__(self):
        assignments = _frozen(self.assignments, np.intp)
        if assignments.ndim != 1 or assignments.size == 0:
            raise InvalidDataError('A fold plan needs one fold id per row')
        if assignments.min() < 0 or assignments.max() >= self.k:
            raise InvalidDataError(
                'Fold ids must lie in [0, %d)' % self.k,
            )
        object.__setattr__(self, 'assignments', assignments)

    def fold_indices(self, fold):
        return np.flatnonzero(self.assignments == fold)

    def hash(self):
        return fold_plan_hash(self)


@dataclass(frozen=True)
class SplitIndices(object):
    """ Train, validation and test row indices of one test fold """

    train: np.ndarray
    validation: np.ndarray
    test: np.ndarray
    test_fold: int = 0

    def training_rows(self):
        """ Rows visible during training: train and validation, sorted """
        return np.sort(np.concatenate([self.train, self.validation]))


@dataclass(frozen=True)
class SyntheticSpec(object):
    """ Equal-size isotropic Gaussian clusters """

    samples: int = 200
    features: int = 5
    classes: int = 4
    cluster_mean_separation: float = 6.0
    cluster_stddev: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.classes < 2 or self.samples < self.classes:
            raise InvalidConfigError('Need at least two non-empty classes')
        if self.samples % self.classes:
            raise InvalidConfigError(
                'samples (%d) must be divisible by classes (%d)' % (
                    self.samples, self.classes,
                )
            )
        if self.features < 1:
            raise InvalidConfigError('Need at least one feature')
        if self.cluster_mean_separation < 0 or self.cluster_stddev < 0:
            raise InvalidConfigError('Separation and stddev must be >= 0')


def load_csv(path, label_column, name=None):
    """ Read a header-first, comma separated numeric table

    :param path: Path of the CSV file
    :param label_column: Name of the label column, or its integer position
    :param name: Name of the table, defaults to the file stem
    :rtype: DataTable
    :raises InvalidDataError: on a missing file, an absent label column, an
        unparseable or empty cell, or fewer than two classes
    """
    from ..unit.csv_adapter import CsvAdapter
    frame = CsvAdapter().read(path)
    if isinstance(label_column, int) or (
            isinstance(label_column, str) and label_column.isdigit() and
            label_column not in frame.columns):
        position = int(label_column)
        if not 0 <= position < len(frame.columns):
            raise InvalidDataError(
                '%s: label column %d is absent' % (path, position),
            )
        label_column = frame.columns[position]
    if label_column not in frame.columns:
        raise InvalidDataError(
            '%s: label column %r is absent' % (path, label_column),
        )
    feature_frame = frame.drop(columns=[label_column])
    if feature_frame.shape[1] == 0:
        raise InvalidDataError('%s holds no feature column' % path)
    features = CsvAdapter.to_numeric(feature_frame, path)
    raw_labels = frame[label_column]
    if raw_labels.isna().any():
        row = int(np.flatnonzero(raw_labels.isna().to_numpy())[0])
        raise InvalidDataError(
            '%s: row %d has an empty label' % (path, row + 1),
        )
    codes, uniques = CsvAdapter.encode_labels(raw_labels)
    if name is None:
        name = CsvAdapter.stem(path)
    table = DataTable(
        features=features,
        labels=codes,
        feature_names=[str(c) for c in feature_frame.columns],
        class_count=len(uniques),
        name=name,
        class_names=[str(u) for u in uniques],
    )
    _logger.info('Loaded %s: N=%d d=%d K=%d', name, table.n_samples,
                 table.n_features, table.class_count)
    return table


def scale_features(table, rows=None):
    """ Min-max scale every feature column to [0, 1]

    Columns constant on the fitted rows map those rows to 0.

    :param rows: Row indices the column ranges are fitted on, every row
        when ``None``. The fitted ranges are applied to every row and
        values outside them are clipped, so rows left out of the fit never
        move the scaled values of the fitted rows.
    :raises InvalidDataError: when fewer than two rows are fitted
    """
    fitted = table.features
    if rows is not None:
        fitted = fitted[np.asarray(rows, dtype=np.intp)]
    if fitted.shape[0] < 2:
        raise InvalidDataError('Scaling needs at least two rows')
    scaler = MinMaxScaler().fit(fitted)
    scaled = scaler.transform(table.features)
    return table.with_features(np.clip(scaled, 0.0, 1.0))


def summarize(table):
    """ Size, class balance and feature-to-sample ratio of a table
    :rtype: DatasetSummary
    """
    return DatasetSummary(
        name=table.name,
        samples=table.n_samples,
        features=table.n_features,
        classes=table.class_count,
        class_counts=tuple(int(c) for c in table.class_counts()),
        fs_ratio=table.n_features / float(table.n_samples),
    )


def content_hash(table):
    """ SHA-256 of features, labels and feature names """
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(table.features).tobytes())
    digest.update(np.ascontiguousarray(table.labels, dtype=np.int64)
                  .tobytes())
    digest.update('\x1f'.join(table.feature_names).encode('utf-8'))
    return digest.hexdigest()


def fold_plan_hash(plan):
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(plan.assignments, dtype=np.int64)
                  .tobytes())
    digest.update(('%d:%d' % (plan.seed, plan.k)).encode('ascii'))
    return digest.hexdigest()


def stratified_kfold(table, k=FOLD_COUNT, seed=0):
    """ Assign every row to one of ``k`` folds

    Per-class fold counts differ by at most one. When a class holds fewer
    than ``k`` rows, the plan falls back to size-balanced shuffled folds.

    :raises InvalidDataError: when ``k`` exceeds the row count
    :rtype: FoldPlan
    """
    if k > table.n_samples:
        raise InvalidDataError(
            'Cannot split %d rows into %d folds' % (table.n_samples, k),
        )
    if k < 2:
        raise InvalidDataError('Need at least two folds')
    assignments = np.empty(table.n_samples, dtype=np.intp)
    if table.class_counts().min() >= k:
        splitter = StratifiedKFold(n_splits=k, shuffle=True,
                                   random_state=seed)
        splits = splitter.split(table.features, table.labels)
    else:
        _logger.warning(
            '%s: a class has fewer than %d rows, folds are not stratified',
            table.name, k,
        )
        splitter = KFold(n_splits=k, shuffle=True, random_state=seed)
        splits = splitter.split(table.features)
    for fold, (_, test_index) in enumerate(splits):
        assignments[test_index] = fold
    return FoldPlan(assignments=assignments, seed=seed, k=k)


def split_for_test_fold(plan, test_fold):
    """ Test fold, the two next folds (cyclic) for validation, rest to train
    :rtype: SplitIndices
    """
    if not 0 <= test_fold < plan.k:
        raise InvalidDataError(
            'test_fold %r outside [0, %d)' % (test_fold, plan.k),
        )
    validation_folds = [(test_fold + i) % plan.k
                        for i in range(1, VALIDATION_FOLDS + 1)]
    folds = plan.assignments
    return SplitIndices(
        train=np.flatnonzero(~np.isin(folds,
                                      [test_fold] + validation_folds)),
        validation=np.flatnonzero(np.isin(folds, validation_folds)),
        test=np.flatnonzero(folds == test_fold),
        test_fold=test_fold,
    )


def _cluster_means(spec, rng):
    if spec.cluster_mean_separation == 0:
        return np.zeros((spec.classes, spec.features))
    radius = spec.cluster_mean_separation * spec.classes
    for _ in range(10000):
        means = rng.uniform(-radius, radius,
                            size=(spec.classes, spec.features))
        if pdist(means).min() >= spec.cluster_mean_separation:
            return means
    raise InvalidConfigError(
        'Cannot place %d means %.3f apart in %d dimensions' % (
            spec.classes, spec.cluster_mean_separation, spec.features,
        )
    )


def generate_synthetic(spec=None):
    """ Isotropic Gaussian clusters, one per class, of equal size
    :type spec: SyntheticSpec
    :rtype: DataTable
    """
    spec = spec or SyntheticSpec()
    rng = np.random.RandomState(spec.seed)
    means = _cluster_means(spec, rng)
    per_class = spec.samples // spec.classes
    features, labels = make_blobs(
        n_samples=[per_class] * spec.classes,
        n_features=spec.features,
        centers=means,
        cluster_std=spec.cluster_stddev,
        shuffle=True,
        random_state=rng,
    )
    return DataTable(
        features=features,
        labels=labels,
        feature_names=['f%d' % i for i in range(spec.features)],
        class_count=spec.classes,
        name='synthetic',
        class_names=[str(i) for i in range(spec.classes)],
    )


def export_fold_plan(plan, path):
    """ Write ``row_index,fold_id`` rows after a ``# seed=<n>`` line """
    from ..unit.csv_adapter import CsvAdapter
    lines = ['# seed=%d' % plan.seed, 'row_index,fold_id']
    lines.extend('%d,%d' % (row, fold)
                 for row, fold in enumerate(plan.assignments))
    CsvAdapter().write_text(path, '\n'.join(lines) + '\n')


def import_fold_plan(path, k=FOLD_COUNT):
    """ Read a fold plan written by :func:`export_fold_plan`
    :rtype: FoldPlan
    """
    from ..unit.csv_adapter import CsvAdapter
    adapter = CsvAdapter()
    first = adapter.read_first_line(path)
    if not first.startswith('# seed='):
        raise InvalidDataError('%s lacks the "# seed=" line' % path)
    try:
        seed = int(first[len('# seed='):])
    except ValueError:
        raise InvalidDataError('%s has a malformed seed line' % path)
    frame = adapter.read(path, comment='#')
    if list(frame.columns) != ['row_index', 'fold_id']:
        raise InvalidDataError(
            '%s must have columns row_index,fold_id' % path,
        )
    rows = frame['row_index'].to_numpy(dtype=np.intp)
    if sorted(rows.tolist()) != list(range(rows.size)):
        raise InvalidDataError('%s does not cover rows 0..N-1' % path)
    assignments = np.empty(rows.size, dtype=np.intp)
    assignments[rows] = frame['fold_id'].to_numpy(dtype=np.intp)
    return FoldPlan(assignments=assignments, seed=seed, k=k)
