# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Scores and paired significance tests for cross-validated methods.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..exception import InvalidDataError, ShapeMismatchError

_logger = logging.getLogger(__name__)

try:
    from scipy.stats import norm, rankdata
    from sklearn.metrics import f1_score
except ImportError:
    _logger.warning('Cannot import scipy / scikit-learn')

# largest effective sample size tested by enumerating every sign vector
EXACT_LIMIT = 12
# enumeration holds 2^n sign vectors in memory
EXACT_MAX = 20
MIN_EFFECTIVE = 5
WILCOXON_METHODS = ('auto', 'exact', 'approx')
# float slack when comparing rank sums built from average ranks
_TIE_EPSILON = 1e-9


def weighted_f1(y_true, y_pred, class_count):
    """ Per-class F1 averaged with weights equal to true-class support

    A class with support but no true positive scores 0; a class without
    support carries weight 0.

    :param y_true: True labels in ``[0, class_count)``
    :param y_pred: Predicted labels in ``[0, class_count)``
    :rtype: float
    :raises InvalidDataError: on empty input or out-of-range labels
    """
    y_true = np.asarray(y_true, dtype=np.intp).ravel()
    y_pred = np.asarray(y_pred, dtype=np.intp).ravel()
    if y_true.size != y_pred.size:
        raise ShapeMismatchError(
            'Got %d predictions for %d labels' % (y_pred.size, y_true.size),
        )
    if y_true.size == 0:
        raise InvalidDataError('Cannot score empty label vectors')
    for labels in (y_true, y_pred):
        if labels.min() < 0 or labels.max() >= class_count:
            raise InvalidDataError(
                'Labels must lie in [0, %d)' % class_count,
            )
    score = f1_score(y_true, y_pred, labels=list(range(class_count)),
                     average='weighted', zero_division=0)
    return float(min(max(score, 0.0), 1.0))


@dataclass(frozen=True)
class ComparisonResult(object):
    """ Two-sided Wilcoxon signed-rank test of paired fold scores

    ``statistic`` is ``min(W+, W-)``. ``mean_difference`` is the mean of
    ``a - b`` over the paired scores and carries the direction.
    """

    method_a: str
    method_b: str
    statistic: float
    p_value: float
    n_effective: int
    degenerate: bool = False
    mean_difference: float = 0.0

    def significant(self, alpha=0.05):
        return not self.degenerate and self.p_value < alpha


def signed_ranks(differences):
    """ Average ranks of ``|differences|`` after dropping zeros
    :rtype: tuple of (ranks, signs) as numpy arrays
    """
    differences = np.asarray(differences, dtype=np.float64)
    nonzero = differences[differences != 0]
    return rankdata(np.abs(nonzero)), np.sign(nonzero)


def exact_p_value(ranks, positive_sum):
    """ Two-sided p-value by enumerating all ``2^n`` sign assignments

    Every assignment is equally likely under the null hypothesis; the
    p-value is the share whose positive rank sum lies at least as far from
    the null mean as ``positive_sum``.
    """
    ranks = np.asarray(ranks, dtype=np.float64)
    n = ranks.size
    if n > EXACT_MAX:
        raise InvalidDataError(
            'Exact enumeration is limited to %d pairs, got %d' % (
                EXACT_MAX, n,
            )
        )
    codes = np.arange(2 ** n)[:, None]
    signs = (codes >> np.arange(n)[None, :]) & 1
    sums = signs.dot(ranks)
    center = ranks.sum() / 2.0
    observed = abs(positive_sum - center)
    extreme = np.abs(sums - center) >= observed - _TIE_EPSILON
    return float(extreme.mean())


def normal_p_value(ranks, positive_sum):
    """ Two-sided normal approximation with tie and continuity corrections
    """
    ranks = np.asarray(ranks, dtype=np.float64)
    n = ranks.size
    mean = n * (n + 1) / 4.0
    _, ties = np.unique(ranks, return_counts=True)
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - \
        np.sum(ties ** 3 - ties) / 48.0
    if variance <= 0:
        return 1.0
    deviation = max(abs(positive_sum - mean) - 0.5, 0.0)
    return float(min(1.0, 2.0 * norm.sf(deviation / np.sqrt(variance))))


def wilcoxon_signed_rank(a, b, method='auto', name_a='a', name_b='b'):
    """ Paired two-sided Wilcoxon signed-rank test of ``a`` against ``b``

    Zero differences are dropped; with fewer than five remaining pairs the
    result is degenerate with p = 1.

    :param method: ``exact`` enumerates sign vectors, ``approx`` uses the
        normal approximation, ``auto`` enumerates up to 12 pairs. Above
        20 pairs ``exact`` falls back to the normal approximation.
    :rtype: ComparisonResult
    :raises ShapeMismatchError: when ``a`` and ``b`` differ in length
    """
    if method not in WILCOXON_METHODS:
        raise InvalidDataError('Unknown Wilcoxon method %r' % method)
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size != b.size:
        raise ShapeMismatchError(
            'Paired samples differ in length: %d vs %d' % (a.size, b.size),
        )
    differences = a - b
    mean_difference = float(differences.mean()) if differences.size \
        else 0.0
    ranks, signs = signed_ranks(differences)
    n = ranks.size
    positive_sum = float(ranks[signs > 0].sum())
    negative_sum = float(ranks[signs < 0].sum())
    statistic = min(positive_sum, negative_sum)
    if n < MIN_EFFECTIVE:
        _logger.debug('%s vs %s: %d non-zero differences, degenerate',
                      name_a, name_b, n)
        return ComparisonResult(
            method_a=name_a,
            method_b=name_b,
            statistic=statistic,
            p_value=1.0,
            n_effective=n,
            degenerate=True,
            mean_difference=mean_difference,
        )
    if method == 'exact' and n > EXACT_MAX:
        _logger.warning('%s vs %s: %d pairs exceed exact enumeration, '
                        'using the normal approximation', name_a, name_b, n)
        method = 'approx'
    if method == 'exact' or (method == 'auto' and n <= EXACT_LIMIT):
        p_value = exact_p_value(ranks, positive_sum)
    else:
        p_value = normal_p_value(ranks, positive_sum)
    return ComparisonResult(
        method_a=name_a,
        method_b=name_b,
        statistic=statistic,
        p_value=min(max(p_value, 0.0), 1.0),
        n_effective=n,
        mean_difference=mean_difference,
    )
