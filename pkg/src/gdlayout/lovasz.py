"""Jaccard surrogate loss on real-valued scores (Lovász hinge).

Scores are saturated at the unit margin (clamped to [-1, 1]) and the sorted
hinge errors are dotted with the Jaccard-loss increments, halved. On fully
saturated scores this equals 1 - Jaccard(predicted-positive set, true set)
exactly, with Jaccard(empty, empty) = 1; the loss is zero whenever every
margin score*sign is >= 1.
"""

from __future__ import annotations

import numpy as np


def jaccard_index(pred: np.ndarray, truth: np.ndarray) -> float:
    """Exact Jaccard index of two binary indicator vectors; 1 if both empty."""
    pred = np.asarray(pred, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    union = np.count_nonzero(pred | truth)
    if union == 0:
        return 1.0
    return np.count_nonzero(pred & truth) / union


def lovasz_hinge(scores: np.ndarray, labels: np.ndarray):
    """Returns (loss, gradient w.r.t. scores).

    labels are binary {0,1}; all-zero and all-one label vectors are allowed.
    """
    F = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if F.size == 0:
        raise ValueError("lovasz_hinge: empty input")
    if F.shape != y.shape:
        raise ValueError("scores and labels must have the same shape")

    s = 2.0 * y - 1.0
    clipped = np.clip(F, -1.0, 1.0)
    e = 1.0 - clipped * s  # hinge errors in [0, 2]

    order = np.argsort(-e, kind="stable")
    e_sorted = e[order]
    y_sorted = y[order]

    p = y.sum()
    intersect = p - np.cumsum(y_sorted)
    union = p + np.cumsum(1.0 - y_sorted)
    jac = 1.0 - intersect / union
    g = jac.copy()
    g[1:] = jac[1:] - jac[:-1]

    loss = 0.5 * float(np.dot(e_sorted, g))

    grad = np.zeros_like(F)
    inside = (F > -1.0) & (F < 1.0)
    grad[order] = -s[order] * g * 0.5
    grad[~inside] = 0.0
    return loss, grad
