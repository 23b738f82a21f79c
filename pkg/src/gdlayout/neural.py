"""Online-trained neural crossing predictor and the crossing surrogate loss.

The predictor is a small from-scratch MLP, 8 -> 64 -> 64 -> 1:
linear (no bias) -> batch norm -> leaky rectifier (slope 0.01), twice, then
a biased linear layer and a sigmoid. Batch norm keeps running statistics
(momentum 0.9); inference always uses the frozen running statistics, so
predict() is deterministic for fixed parameters.

Inputs are the 8 coordinates of an edge pair, canonicalized before the
network: translate the 4-point centroid to the origin, scale so the largest
point norm is 1, rotate so the first edge's direction lies on the +x axis.
The canonicalization is differentiable almost everywhere and its exact
gradient is part of the crossing-loss gradient.

Parameters train with Adam (step 1e-3, decays 0.9/0.999) on the cross
entropy against exact crossing labels; one step per optimizer iteration.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .criteria import CE_CLAMP, LossValue, _grad_dict
from .geometry import all_crossings
from .graphs import Graph
from .rng import Xoshiro256StarStar

_BN_EPS = 1e-5
_BN_MOMENTUM = 0.9
_LEAKY = 0.01

FORMAT_VERSION = 1


def canonicalize_batch(coords: np.ndarray):
    """Vectorized canonical frame for (B, 8) raw coordinates.

    Returns (features (B, 8), cache); degenerate (all-coincident) rows map to
    zeros and get zero gradients.
    """
    P = np.asarray(coords, dtype=np.float64).reshape(-1, 4, 2)
    B = P.shape[0]
    c = P.mean(axis=1, keepdims=True)
    Q = P - c
    norms = np.hypot(Q[..., 0], Q[..., 1])
    s = norms.max(axis=1)
    degenerate = s < 1e-12
    s_safe = np.where(degenerate, 1.0, s)
    a = np.argmax(norms, axis=1)
    U = Q / s_safe[:, None, None]
    v = P[:, 1] - P[:, 0]
    vn2 = (v * v).sum(axis=1)
    rotate = vn2 >= 1e-24
    theta = np.where(rotate, np.arctan2(v[:, 1], v[:, 0]), 0.0)
    ct, st = np.cos(theta), np.sin(theta)
    # rows of R(-theta) applied to each point
    W = np.empty_like(U)
    W[..., 0] = ct[:, None] * U[..., 0] + st[:, None] * U[..., 1]
    W[..., 1] = -st[:, None] * U[..., 0] + ct[:, None] * U[..., 1]
    W[degenerate] = 0.0
    cache = (Q, U, s_safe, a, v, vn2, ct, st, rotate, degenerate)
    return W.reshape(B, 8), cache


def canonicalize_batch_backward(gW: np.ndarray, cache) -> np.ndarray:
    """Exact gradient of the canonical features w.r.t. the raw inputs."""
    Q, U, s, a, v, vn2, ct, st, rotate, degenerate = cache
    B = Q.shape[0]
    Gw = gW.reshape(B, 4, 2)
    GU = np.empty_like(Gw)
    GU[..., 0] = ct[:, None] * Gw[..., 0] - st[:, None] * Gw[..., 1]
    GU[..., 1] = st[:, None] * Gw[..., 0] + ct[:, None] * Gw[..., 1]
    # dR(-theta)/dtheta rows applied to U
    dRU0 = -st[:, None] * U[..., 0] + ct[:, None] * U[..., 1]
    dRU1 = -ct[:, None] * U[..., 0] - st[:, None] * U[..., 1]
    gtheta = (Gw[..., 0] * dRU0 + Gw[..., 1] * dRU1).sum(axis=1)
    gtheta = np.where(rotate, gtheta, 0.0)
    vn2_safe = np.where(rotate, vn2, 1.0)
    gv = gtheta[:, None] * np.stack([-v[:, 1], v[:, 0]], axis=1) / vn2_safe[:, None]
    GQ = GU / s[:, None, None]
    gs = -(GU * Q).sum(axis=(1, 2)) / (s * s)
    rows = np.arange(B)
    GQ[rows, a] += (gs / s)[:, None] * Q[rows, a]
    GP = GQ - GQ.mean(axis=1, keepdims=True)
    GP[:, 1] += gv
    GP[:, 0] -= gv
    GP[degenerate] = 0.0
    return GP.reshape(B, 8)


def canonicalize(coords8: np.ndarray):
    """Single-pair canonical frame; cache is None for degenerate input."""
    feats, cache = canonicalize_batch(np.asarray(coords8, dtype=np.float64).reshape(1, 8))
    if cache[-1][0]:
        return feats[0], None
    return feats[0], cache


def canonicalize_backward(gW8: np.ndarray, cache) -> np.ndarray:
    if cache is None:
        return np.zeros(8)
    return canonicalize_batch_backward(np.asarray(gW8).reshape(1, 8), cache)[0]


class CrossingPredictor:
    """MLP crossing classifier with batch-normalized hidden layers."""

    def __init__(self, seed: int = 0, hidden: int = 64):
        rng = Xoshiro256StarStar(seed)
        self.hidden = hidden

        def init(fan_in, fan_out):
            scale = math.sqrt(2.0 / fan_in)
            return scale * rng.normal_matrix(fan_in, fan_out)

        self.params = {
            "W1": init(8, hidden),
            "g1": np.ones(hidden),
            "b1": np.zeros(hidden),
            "W2": init(hidden, hidden),
            "g2": np.ones(hidden),
            "b2": np.zeros(hidden),
            "W3": init(hidden, 1),
            "b3": np.zeros(1),
        }
        self.running = {
            "m1": np.zeros(hidden),
            "v1": np.ones(hidden),
            "m2": np.zeros(hidden),
            "v2": np.ones(hidden),
        }
        self.adam_m = {k: np.zeros_like(v) for k, v in self.params.items()}
        self.adam_v = {k: np.zeros_like(v) for k, v in self.params.items()}
        self.adam_t = 0
        self.lr = 1e-3

    # ---- forward -----------------------------------------------------

    def _features(self, coords: np.ndarray):
        coords = np.atleast_2d(np.asarray(coords, dtype=np.float64))
        return canonicalize_batch(coords)

    def _forward_eval(self, feats: np.ndarray):
        p, r = self.params, self.running
        z1 = feats @ p["W1"]
        inv1 = 1.0 / np.sqrt(r["v1"] + _BN_EPS)
        h1 = p["g1"] * (z1 - r["m1"]) * inv1 + p["b1"]
        a1 = np.where(h1 > 0, h1, _LEAKY * h1)
        z2 = a1 @ p["W2"]
        inv2 = 1.0 / np.sqrt(r["v2"] + _BN_EPS)
        h2 = p["g2"] * (z2 - r["m2"]) * inv2 + p["b2"]
        a2 = np.where(h2 > 0, h2, _LEAKY * h2)
        z3 = a2 @ p["W3"] + p["b3"]
        y = 1.0 / (1.0 + np.exp(-z3[:, 0]))
        cache = (feats, inv1, h1, a1, inv2, h2, a2, y)
        return y, cache

    def predict(self, coords8) -> float | np.ndarray:
        """Probability of crossing, inference mode (frozen statistics)."""
        coords = np.asarray(coords8, dtype=np.float64)
        single = coords.ndim == 1
        feats, _ = self._features(coords)
        y, _ = self._forward_eval(feats)
        return float(y[0]) if single else y

    # ---- training ----------------------------------------------------

    def train_step(self, batch) -> float:
        """One Adam step on the mean cross entropy; returns pre-step loss."""
        if isinstance(batch, tuple) and len(batch) == 2:
            coords, labels = batch
        else:
            rows = list(batch)
            if not rows:
                raise ValueError("empty training batch")
            coords = np.stack([np.asarray(r[0], dtype=np.float64) for r in rows])
            labels = np.asarray([r[1] for r in rows], dtype=np.float64)
        coords = np.atleast_2d(np.asarray(coords, dtype=np.float64))
        labels = np.asarray(labels, dtype=np.float64)
        if coords.shape[0] == 0:
            raise ValueError("empty training batch")
        B = coords.shape[0]
        feats, _ = self._features(coords)
        p = self.params

        # forward, batch statistics
        z1 = feats @ p["W1"]
        m1 = z1.mean(axis=0)
        v1 = z1.var(axis=0)
        inv1 = 1.0 / np.sqrt(v1 + _BN_EPS)
        x1 = (z1 - m1) * inv1
        h1 = p["g1"] * x1 + p["b1"]
        a1 = np.where(h1 > 0, h1, _LEAKY * h1)

        z2 = a1 @ p["W2"]
        m2 = z2.mean(axis=0)
        v2 = z2.var(axis=0)
        inv2 = 1.0 / np.sqrt(v2 + _BN_EPS)
        x2 = (z2 - m2) * inv2
        h2 = p["g2"] * x2 + p["b2"]
        a2 = np.where(h2 > 0, h2, _LEAKY * h2)

        z3 = a2 @ p["W3"] + p["b3"]
        y = 1.0 / (1.0 + np.exp(-z3[:, 0]))

        yc = np.clip(y, CE_CLAMP, 1.0 - CE_CLAMP)
        loss = float(np.mean(-labels * np.log(yc) - (1 - labels) * np.log(1 - yc)))

        # backward
        dz3 = ((y - labels) / B)[:, None]
        grads = {
            "W3": a2.T @ dz3,
            "b3": dz3.sum(axis=0),
        }
        da2 = dz3 @ p["W3"].T
        dh2 = da2 * np.where(h2 > 0, 1.0, _LEAKY)
        grads["g2"] = (dh2 * x2).sum(axis=0)
        grads["b2"] = dh2.sum(axis=0)
        dz2 = self._bn_backward(dh2, x2, inv2, p["g2"], B)
        da1 = dz2 @ p["W2"].T
        grads["W2"] = a1.T @ dz2
        dh1 = da1 * np.where(h1 > 0, 1.0, _LEAKY)
        grads["g1"] = (dh1 * x1).sum(axis=0)
        grads["b1"] = dh1.sum(axis=0)
        dz1 = self._bn_backward(dh1, x1, inv1, p["g1"], B)
        grads["W1"] = feats.T @ dz1

        self._adam_step(grads)

        r = self.running
        r["m1"] = _BN_MOMENTUM * r["m1"] + (1 - _BN_MOMENTUM) * m1
        r["v1"] = _BN_MOMENTUM * r["v1"] + (1 - _BN_MOMENTUM) * v1
        r["m2"] = _BN_MOMENTUM * r["m2"] + (1 - _BN_MOMENTUM) * m2
        r["v2"] = _BN_MOMENTUM * r["v2"] + (1 - _BN_MOMENTUM) * v2
        return loss

    @staticmethod
    def _bn_backward(dh, xhat, inv, gamma, B):
        dxhat = dh * gamma
        return (
            inv
            / B
            * (B * dxhat - dxhat.sum(axis=0) - xhat * (dxhat * xhat).sum(axis=0))
        )

    def _adam_step(self, grads):
        self.adam_t += 1
        b1, b2, eps = 0.9, 0.999, 1e-8
        for k, gval in grads.items():
            self.adam_m[k] = b1 * self.adam_m[k] + (1 - b1) * gval
            self.adam_v[k] = b2 * self.adam_v[k] + (1 - b2) * gval * gval
            mhat = self.adam_m[k] / (1 - b1**self.adam_t)
            vhat = self.adam_v[k] / (1 - b2**self.adam_t)
            self.params[k] = self.params[k] - self.lr * mhat / (np.sqrt(vhat) + eps)

    # ---- surrogate loss ------------------------------------------------

    def input_gradients(self, coords: np.ndarray, upstream_dz: np.ndarray) -> np.ndarray:
        """d(loss)/d(raw coords) in inference mode, given d(loss)/d(z3)."""
        feats, canon_cache = self._features(coords)
        p, r = self.params, self.running
        _, cache = self._forward_eval(feats)
        _, inv1, h1, a1, inv2, h2, a2, y = cache
        da2 = upstream_dz.reshape(-1, 1) @ p["W3"].T
        dh2 = da2 * np.where(h2 > 0, 1.0, _LEAKY)
        dz2 = dh2 * p["g2"] * (1.0 / np.sqrt(r["v2"] + _BN_EPS))
        da1 = dz2 @ p["W2"].T
        dh1 = da1 * np.where(h1 > 0, 1.0, _LEAKY)
        dz1 = dh1 * p["g1"] * (1.0 / np.sqrt(r["v1"] + _BN_EPS))
        dfeats = dz1 @ p["W1"].T
        return canonicalize_batch_backward(dfeats, canon_cache)

    # ---- persistence ---------------------------------------------------

    def to_json(self) -> str:
        blob = {
            "version": FORMAT_VERSION,
            "hidden": self.hidden,
            "lr": self.lr,
            "adam_t": self.adam_t,
            "params": {k: v.tolist() for k, v in self.params.items()},
            "running": {k: v.tolist() for k, v in self.running.items()},
            "adam_m": {k: v.tolist() for k, v in self.adam_m.items()},
            "adam_v": {k: v.tolist() for k, v in self.adam_v.items()},
        }
        return json.dumps(blob)

    @classmethod
    def from_json(cls, text: str) -> "CrossingPredictor":
        blob = json.loads(text)
        if blob.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported predictor format version {blob.get('version')}")
        p = cls(seed=0, hidden=blob["hidden"])
        p.lr = blob["lr"]
        p.adam_t = blob["adam_t"]
        p.params = {k: np.asarray(v, dtype=np.float64) for k, v in blob["params"].items()}
        p.running = {k: np.asarray(v, dtype=np.float64) for k, v in blob["running"].items()}
        p.adam_m = {k: np.asarray(v, dtype=np.float64) for k, v in blob["adam_m"].items()}
        p.adam_v = {k: np.asarray(v, dtype=np.float64) for k, v in blob["adam_v"].items()}
        return p


def pair_coords(layout: np.ndarray, pair) -> np.ndarray:
    (i, j), (k, l) = pair
    return np.concatenate([layout[i], layout[j], layout[k], layout[l]])


def crossing_loss(layout: np.ndarray, edge_pair_sample, predictor: CrossingPredictor) -> LossValue:
    """Mean CE(f(pair), 0) over the sample; gradients flow to the 8
    coordinates of each pair through frozen parameters and statistics."""
    pairs = list(edge_pair_sample)
    if not pairs:
        return LossValue(0.0, {})
    idx = np.asarray(
        [(a, b, c, d) for (a, b), (c, d) in pairs], dtype=np.int64
    )
    coords = layout[idx.ravel()].reshape(-1, 8)
    feats, _ = predictor._features(coords)
    y, _ = predictor._forward_eval(feats)
    B = len(pairs)
    yc = np.clip(y, CE_CLAMP, 1.0 - CE_CLAMP)
    value = float(np.mean(-np.log(1.0 - yc)))
    # d/dz of -log(1-sigmoid(z)) is sigmoid(z)
    dz = y / B
    gin = predictor.input_gradients(coords, dz)
    dense = np.zeros_like(layout)
    touched = []
    for r, ((i, j), (k, l)) in enumerate(pairs):
        dense[i] += gin[r, 0:2]
        dense[j] += gin[r, 2:4]
        dense[k] += gin[r, 4:6]
        dense[l] += gin[r, 6:8]
        touched.extend((i, j, k, l))
    return LossValue(value, _grad_dict(np.asarray(touched, dtype=np.int64), dense))


def crossing_count_quality(layout: np.ndarray, g: Graph) -> int:
    return len(all_crossings(layout, g))
