# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

import itertools

import numpy as np

from tabular_gnn.exception import InvalidDataError, ShapeMismatchError
from tabular_gnn.models import metrics

from ..common import SetUpTabularBase


def confusion_f1(y_true, y_pred, class_count):
    """ Weighted F1 straight from a confusion matrix """
    confusion = np.zeros((class_count, class_count))
    for t, p in zip(y_true, y_pred):
        confusion[t, p] += 1
    support = confusion.sum(axis=1)
    total = 0.0
    for k in range(class_count):
        tp = confusion[k, k]
        predicted = confusion[:, k].sum()
        if support[k] == 0 or tp == 0:
            continue
        precision = tp / predicted
        recall = tp / support[k]
        f1 = 2 * precision * recall / (precision + recall)
        total += f1 * support[k]
    return total / support.sum()


def enumerated_p(differences):
    """ Two-sided signed-rank p-value over every sign vector """
    nonzero = [d for d in differences if d != 0]
    magnitudes = sorted(abs(d) for d in nonzero)
    ranks = {}
    for value in set(magnitudes):
        places = [i + 1 for i, m in enumerate(magnitudes) if m == value]
        ranks[value] = sum(places) / float(len(places))
    rank_list = [ranks[abs(d)] for d in nonzero]
    observed = sum(r for r, d in zip(rank_list, nonzero) if d > 0)
    center = sum(rank_list) / 2.0
    hits = 0
    total = 0
    for signs in itertools.product((0, 1), repeat=len(rank_list)):
        total += 1
        positive = sum(r for r, s in zip(rank_list, signs) if s)
        if abs(positive - center) >= abs(observed - center) - 1e-9:
            hits += 1
    return hits / float(total)


class TestWeightedF1(SetUpTabularBase):

    def test_perfect(self):
        """ It should give 1.0 for perfect predictions """
        self.assertEqual(metrics.weighted_f1([0, 1, 2, 1], [0, 1, 2, 1], 3),
                         1.0)

    def test_hand_value(self):
        """ It should weight class F1 by true-class support """
        score = metrics.weighted_f1([0, 0, 1, 1], [0, 1, 1, 1], 2)
        self.assertAlmostEqual(score, 0.5 * 2 / 3.0 + 0.5 * 0.8)

    def test_single_class_predictions(self):
        """ It should score constant predictions on balanced classes """
        y_true = [0, 1, 2, 3] * 5
        score = metrics.weighted_f1(y_true, [2] * 20, 4)
        self.assertAlmostEqual(score, 0.25 * 2 * 0.25 / 1.25)

    def test_exhaustive_small_inputs(self):
        """ It should match the confusion matrix on every small input """
        for class_count in (2, 3):
            labels = range(class_count)
            for size in (1, 2, 3):
                for y_true in itertools.product(labels, repeat=size):
                    for y_pred in itertools.product(labels, repeat=size):
                        self.assertAlmostEqual(
                            metrics.weighted_f1(y_true, y_pred, class_count),
                            confusion_f1(y_true, y_pred, class_count),
                            places=12,
                        )

    def test_random_length_eight(self):
        """ It should match the confusion matrix on seeded vectors """
        for _ in range(200):
            y_true = self.rng.randint(0, 3, size=8)
            y_pred = self.rng.randint(0, 3, size=8)
            self.assertAlmostEqual(metrics.weighted_f1(y_true, y_pred, 3),
                                   confusion_f1(y_true, y_pred, 3),
                                   places=12)

    def test_empty(self):
        """ It should refuse empty input """
        with self.assertRaises(InvalidDataError):
            metrics.weighted_f1([], [], 2)

    def test_length_mismatch(self):
        """ It should refuse vectors of different lengths """
        with self.assertRaises(ShapeMismatchError):
            metrics.weighted_f1([0, 1], [0], 2)

    def test_label_range(self):
        """ It should refuse a prediction outside the classes """
        with self.assertRaises(InvalidDataError):
            metrics.weighted_f1([0, 1], [0, 2], 2)


class TestWilcoxon(SetUpTabularBase):

    def test_identical_degenerate(self):
        """ It should flag identical scores as degenerate with p = 1 """
        scores = self.rng.rand(10)
        result = metrics.wilcoxon_signed_rank(scores, scores)
        self.assertTrue(result.degenerate)
        self.assertEqual(result.p_value, 1.0)
        self.assertEqual(result.n_effective, 0)
        self.assertFalse(result.significant())

    def test_all_positive(self):
        """ It should give 2/1024 for ten positive distinct differences """
        a = 0.5 + 0.01 * np.arange(1, 11)
        result = metrics.wilcoxon_signed_rank(a, np.full(10, 0.5))
        self.assertAlmostEqual(result.p_value, 2 / 1024.0, places=12)
        self.assertEqual(result.statistic, 0.0)
        self.assertGreater(result.mean_difference, 0)
        self.assertTrue(result.significant(0.05))

    def test_symmetric_differences(self):
        """ It should give p = 1 for mirrored differences """
        differences = np.array([1.0, -1.0, 2.0, -2.0, 3.0, -3.0])
        result = metrics.wilcoxon_signed_rank(differences, np.zeros(6))
        self.assertAlmostEqual(result.p_value, 1.0)

    def test_few_pairs_degenerate(self):
        """ It should be degenerate with fewer than five non-zero pairs """
        result = metrics.wilcoxon_signed_rank([1, 2, 3, 4, 5, 6],
                                              [0, 0, 0, 0, 5, 6])
        self.assertTrue(result.degenerate)
        self.assertEqual(result.n_effective, 4)

    def test_length_mismatch(self):
        """ It should refuse samples of different lengths """
        with self.assertRaises(ShapeMismatchError):
            metrics.wilcoxon_signed_rank([1, 2], [1])

    def test_unknown_method(self):
        """ It should refuse an unknown p-value method """
        with self.assertRaises(InvalidDataError):
            metrics.wilcoxon_signed_rank([1] * 5, [0] * 5, method='perm')

    def test_signed_ranks_ties(self):
        """ It should drop zeros and average tied ranks """
        ranks, signs = metrics.signed_ranks([1.0, -1.0, 0.0, 2.0])
        self.assertEqual(ranks.tolist(), [1.5, 1.5, 3.0])
        self.assertEqual(signs.tolist(), [1.0, -1.0, 1.0])

    def test_exact_matches_enumeration(self):
        """ It should match a full sign enumeration on 100 seeded pairs of
        6 to 12 scores """
        for seed in range(100):
            with self.subTest(seed=seed):
                rng = np.random.RandomState(seed)
                size = 6 + seed % 7
                a = np.round(rng.rand(size), 2)
                b = np.round(rng.rand(size), 2)
                result = metrics.wilcoxon_signed_rank(a, b, method='exact')
                if result.degenerate:
                    continue
                self.assertAlmostEqual(result.p_value,
                                       enumerated_p((a - b).tolist()),
                                       places=12)

    def test_exact_falls_back_above_limit(self):
        """ It should use the normal approximation for exact above 20
        pairs """
        a = np.arange(1, 31, dtype=float)
        result = metrics.wilcoxon_signed_rank(a, np.zeros(30),
                                              method='exact')
        self.assertAlmostEqual(
            result.p_value,
            metrics.normal_p_value(np.arange(1, 31, dtype=float), 465.0),
        )

    def test_exact_p_value_limit(self):
        """ It should refuse to enumerate more than 20 ranks """
        with self.assertRaises(InvalidDataError):
            metrics.exact_p_value(np.arange(1, 22, dtype=float), 0.0)

    def test_normal_close_to_exact(self):
        """ It should keep the normal approximation within 0.01 of the
        enumeration in the tails at n = 12 """
        ranks = np.arange(1, 13, dtype=float)
        for positive_sum in range(0, 79):
            exact = metrics.exact_p_value(ranks, positive_sum)
            if exact > 0.1:
                continue
            self.assertLess(
                abs(metrics.normal_p_value(ranks, positive_sum) - exact),
                0.01,
            )

    def test_auto_uses_normal_above_limit(self):
        """ It should switch to the normal approximation above 12 pairs """
        a = np.arange(1, 16, dtype=float)
        result = metrics.wilcoxon_signed_rank(a, np.zeros(15))
        self.assertAlmostEqual(
            result.p_value,
            metrics.normal_p_value(np.arange(1, 16, dtype=float), 120.0),
        )

    def test_p_value_range(self):
        """ It should keep p-values within [0, 1] """
        for _ in range(20):
            result = metrics.wilcoxon_signed_rank(self.rng.rand(10),
                                                  self.rng.rand(10))
            self.assertTrue(0.0 <= result.p_value <= 1.0)
