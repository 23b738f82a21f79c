"""Lovász hinge: saturated-score Jaccard identity (exhaustive) and gradient."""

import itertools

import numpy as np
import pytest

from gdlayout.lovasz import jaccard_index, lovasz_hinge


def brute_jaccard_loss(pred_bits, true_bits):
    pred = set(i for i, b in enumerate(pred_bits) if b)
    true = set(i for i, b in enumerate(true_bits) if b)
    union = pred | true
    if not union:
        return 0.0  # Jaccard(empty, empty) defined as 1
    return 1.0 - len(pred & true) / len(union)


class TestSaturatedIdentity:
    def test_exhaustive_up_to_n6(self):
        # all label/prediction patterns, scores +/-5: loss == 1 - Jaccard
        for n in range(1, 7):
            for true_bits in itertools.product((0, 1), repeat=n):
                y = np.array(true_bits, dtype=float)
                for pred_bits in itertools.product((0, 1), repeat=n):
                    F = np.array([5.0 if b else -5.0 for b in pred_bits])
                    loss, _ = lovasz_hinge(F, y)
                    expect = brute_jaccard_loss(pred_bits, true_bits)
                    assert abs(loss - expect) < 1e-9, (pred_bits, true_bits)

    def test_margins_at_least_one_give_zero(self):
        F = np.array([5.0, -5.0])
        y = np.array([1.0, 0.0])
        assert lovasz_hinge(F, y)[0] == 0.0

    def test_all_zero_labels_negative_scores(self):
        F = np.array([-2.0, -1.0, -7.0])
        y = np.zeros(3)
        assert lovasz_hinge(F, y)[0] == 0.0

    def test_all_one_labels(self):
        F = np.array([5.0, 5.0])
        y = np.ones(2)
        assert lovasz_hinge(F, y)[0] == 0.0


class TestBasics:
    def test_empty_errors(self):
        with pytest.raises(ValueError):
            lovasz_hinge(np.array([]), np.array([]))

    def test_loss_nonnegative_random(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = rng.integers(1, 12)
            F = rng.normal(size=n) * 2
            y = rng.integers(0, 2, size=n).astype(float)
            loss, grad = lovasz_hinge(F, y)
            assert loss >= 0.0
            assert grad.shape == F.shape

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        checked = 0
        for trial in range(200):
            n = int(rng.integers(2, 9))
            F = rng.normal(size=n) * 0.7
            y = rng.integers(0, 2, size=n).astype(float)
            # stay away from the hinge/clip kinks and sort ties
            if np.any(np.abs(np.abs(F) - 1.0) < 1e-3):
                continue
            s = 2 * y - 1
            e = 1 - np.clip(F, -1, 1) * s
            if np.min(np.abs(np.subtract.outer(e, e))[~np.eye(n, dtype=bool)] if n > 1 else [1]) < 1e-4:
                continue
            loss, grad = lovasz_hinge(F, y)
            h = 1e-6
            for i in range(n):
                Fp, Fm = F.copy(), F.copy()
                Fp[i] += h
                Fm[i] -= h
                fd = (lovasz_hinge(Fp, y)[0] - lovasz_hinge(Fm, y)[0]) / (2 * h)
                assert grad[i] == pytest.approx(fd, abs=1e-5)
            checked += 1
        assert checked >= 100


class TestJaccardIndex:
    def test_identical(self):
        v = np.array([1, 0, 1], dtype=bool)
        assert jaccard_index(v, v) == 1.0

    def test_disjoint(self):
        assert jaccard_index(np.array([1, 0]), np.array([0, 1])) == 0.0

    def test_both_empty(self):
        assert jaccard_index(np.zeros(3), np.zeros(3)) == 1.0
