"""The optimization loop: weighted multi-criteria SGD with per-criterion
mini-batch pools, EMA-smoothed patience stopping, optimizer variants and the
quality-safe per-node update.

The loop polls an optional control hook once per iteration (the steering
service plugs in there); pinned nodes have their gradient rows zeroed and
their coordinates restored after every step, which is exactly the documented
pinning semantics.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import criteria as C
from . import kernels, neural, sampling
from .criteria import CriterionConfig
from .geometry import (
    check_layout,
    edge_segments,
    segments_cross_mask,
    segments_properly_cross,
)
from .graphs import DistanceMatrix, Graph
from .rng import Xoshiro256StarStar
from .schedules import as_schedule

TRACE_VERSION = 1


# ---------------------------------------------------------------------------
# EMA and patience
# ---------------------------------------------------------------------------


class EmaAverager:
    """Geometric-weight running mean: (sum_k s^(i-k) L_k) / (sum_k s^(i-k))."""

    def __init__(self, factor: float):
        if not 0.0 < factor < 1.0:
            raise ValueError("ema factor must be in (0, 1)")
        self.factor = factor
        self.num = 0.0
        self.den = 0.0

    def update(self, loss: float) -> float:
        self.num = self.factor * self.num + loss
        self.den = self.factor * self.den + 1.0
        return self.num / self.den

    @staticmethod
    def recompute(losses, factor: float):
        """EMA series from raw losses (trace verification)."""
        ema = EmaAverager(factor)
        return [ema.update(x) for x in losses]


def ema_update(prev_num: float, prev_den: float, new_loss: float, s_ema: float):
    """One functional EMA step; returns (num, den, ema)."""
    num = s_ema * prev_num + new_loss
    den = s_ema * prev_den + 1.0
    return num, den, num / den


class PatienceController:
    """Decays the learning rate after `patience` non-improving iterations;
    stops once the accumulated decay passes the stop fraction."""

    def __init__(self, patience: int, decay: float = 0.7, stop_fraction: float = 1e-3):
        self.patience = patience
        self.decay = decay
        self.stop_fraction = stop_fraction
        self.best = math.inf
        self.since_improvement = 0
        self.scale = 1.0

    def update(self, ema_loss: float) -> str:
        """Returns 'continue', 'decay_lr' or 'stop'."""
        if ema_loss < self.best:
            self.best = ema_loss
            self.since_improvement = 0
            return "continue"
        self.since_improvement += 1
        if self.since_improvement >= self.patience:
            self.since_improvement = 0
            self.scale *= self.decay
            if self.scale < self.stop_fraction:
                return "stop"
            return "decay_lr"
        return "continue"


def default_patience(n_nodes: int, min_sample: int) -> int:
    return max(100, int(n_nodes / min_sample) * 300)


# ---------------------------------------------------------------------------
# Safe update (per-node acceptance, guarded quality never worsens)
# ---------------------------------------------------------------------------


def safe_update(x_prev: np.ndarray, x_new: np.ndarray, g: Graph, quality_fn) -> np.ndarray:
    """Move nodes one at a time to their proposed coordinates, reverting any
    move that strictly worsens quality_fn relative to the starting quality
    (lower is better)."""
    X = x_prev.copy()
    q0 = quality_fn(X)
    for u in range(g.n):
        keep = X[u].copy()
        X[u] = x_new[u]
        if quality_fn(X) > q0:
            X[u] = keep
    qf = quality_fn(X)
    if qf > q0:
        raise AssertionError("safe_update: guarded quality worsened")
    return X


class CrossingGuard:
    """Incremental crossing count for single-node moves: only edges incident
    to the moved node are re-tested against the rest."""

    def __init__(self, g: Graph, layout: np.ndarray):
        self.g = g
        self.enodes = g.edge_array()
        self.segs = edge_segments(layout, g)
        self.incident = [[] for _ in range(g.n)]
        for e, (i, j) in enumerate(g.edges):
            self.incident[i].append(e)
            self.incident[j].append(e)
        self._others_mask = {}
        self.count = self._full_count()

    def _full_count(self) -> int:
        certain, uncertain = kernels.pairs_cross_bruteforce(self.segs, self.enodes)
        cnt = len(certain)
        for i, j in uncertain:
            if self._exact(i, j):
                cnt += 1
        return cnt

    def _exact(self, i: int, j: int) -> bool:
        return segments_properly_cross(
            self.segs[i, 0:2], self.segs[i, 2:4], self.segs[j, 0:2], self.segs[j, 2:4]
        )

    def _incident_count(self, u: int) -> int:
        inc = self.incident[u]
        if not inc:
            return 0
        mask = self._others_mask.get(u)
        if mask is None:
            mask = np.ones(len(self.segs), dtype=bool)
            mask[inc] = False
            self._others_mask[u] = mask
        inc_arr = np.asarray(inc, dtype=np.int64)
        cnt, uncertain = kernels.cross_vs(
            self.segs[inc_arr],
            self.enodes[inc_arr],
            self.segs[mask],
            self.enodes[mask],
        )
        if len(uncertain):
            other_ids = np.nonzero(mask)[0]
            for a, b in uncertain:
                if self._exact(inc_arr[a], other_ids[b]):
                    cnt += 1
        return cnt

    def _place(self, u: int, xy) -> None:
        for e in self.incident[u]:
            if self.enodes[e, 0] == u:
                self.segs[e, 0:2] = xy
            else:
                self.segs[e, 2:4] = xy

    def try_move(self, u: int, xy) -> int:
        """Apply the move and return the resulting total count (call
        reject() to undo)."""
        before = self._incident_count(u)
        self._place(u, xy)
        after = self._incident_count(u)
        return self.count - before + after

    def reject(self, u: int, xy_old) -> None:
        self._place(u, xy_old)


def _safe_update_crossings(x_prev, x_new, g, guard: CrossingGuard) -> np.ndarray:
    X = x_prev.copy()
    q0 = guard.count
    for u in range(g.n):
        candidate = guard.try_move(u, x_new[u])
        if candidate > q0:
            guard.reject(u, x_prev[u])
        else:
            X[u] = x_new[u]
            guard.count = candidate
    if guard.count > q0:
        raise AssertionError("safe_update: guarded crossing count worsened")
    return X


# ---------------------------------------------------------------------------
# Configuration, trace, control
# ---------------------------------------------------------------------------

METHODS = ("plain-sgd", "momentum", "adaptive-moments", "rms-adaptive")


@dataclass
class OptimizerConfig:
    maxiter: int = 20000
    eta: object = 0.5  # constant or callable t -> base learning rate
    method: str = "plain-sgd"
    lr_decay: float = 0.7
    ema_factor: float = 0.5 ** (1 / 100)
    seed: int = 0
    safe_update: object = None  # None, "crossings", or quality_fn(X) -> float
    stop_lr_fraction: float = 1e-3
    patience: int | None = None
    momentum: float = 0.9
    crossing_refresh: int = 10
    quality_every: int | None = None

    def __post_init__(self):
        if self.maxiter < 1:
            raise ValueError("maxiter must be >= 1")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 < self.lr_decay < 1.0:
            raise ValueError("lr decay factor must be in (0, 1)")

    def eta_at(self, t: int) -> float:
        base = self.eta(t) if callable(self.eta) else float(self.eta)
        if base <= 0:
            raise ValueError("learning rate must stay positive")
        return base


@dataclass
class RunTrace:
    kinds: list
    seed: int
    graph: str
    iterations: list = field(default_factory=list)
    losses: dict = field(default_factory=dict)  # kind -> list (nan = inactive)
    weights: dict = field(default_factory=dict)
    lr: list = field(default_factory=list)
    total: list = field(default_factory=list)
    ema: list = field(default_factory=list)
    timestamps: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)  # (iteration, quality dict)

    def __post_init__(self):
        for k in self.kinds:
            self.losses.setdefault(k, [])
            self.weights.setdefault(k, [])

    def record(self, t, losses, weights, lr, total, ema_val):
        self.iterations.append(t)
        for k in self.kinds:
            self.losses[k].append(losses.get(k, math.nan))
            self.weights[k].append(weights.get(k, 0.0))
        self.lr.append(lr)
        self.total.append(total)
        self.ema.append(ema_val)
        self.timestamps.append(time.monotonic())

    def to_csv(self) -> str:
        """Deterministic per-iteration table; timestamps are deliberately
        excluded (they live in the JSON export)."""
        cols = ["iter", "lr", "total", "ema"]
        for k in self.kinds:
            cols.append(f"loss_{k}")
            cols.append(f"weight_{k}")
        lines = [",".join(cols)]
        for r, t in enumerate(self.iterations):
            row = [str(t), repr(self.lr[r]), repr(self.total[r]), repr(self.ema[r])]
            for k in self.kinds:
                v = self.losses[k][r]
                row.append("" if math.isnan(v) else repr(v))
                row.append(repr(self.weights[k][r]))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        import json

        return json.dumps(
            {
                "version": TRACE_VERSION,
                "graph": self.graph,
                "seed": self.seed,
                "kinds": list(self.kinds),
                "iterations": self.iterations,
                "losses": {k: self.losses[k] for k in self.kinds},
                "weights": {k: self.weights[k] for k in self.kinds},
                "lr": self.lr,
                "total": self.total,
                "ema": self.ema,
                "timestamps": self.timestamps,
                "snapshots": self.snapshots,
            }
        )


@dataclass
class LoopState:
    """Mutable view handed to the control hook between iterations."""

    X: np.ndarray
    iteration: int = 0
    weight_overrides: dict = field(default_factory=dict)
    pinned: dict = field(default_factory=dict)
    paused: bool = False
    stop: bool = False
    lr_override: float | None = None
    reset_seed: int | None = None
    last_total: float = math.nan
    last_ema: float = math.nan
    kinds: tuple = ()


class LoopControl:
    """No-op control hook; the steering service subclasses this."""

    def poll(self, state: LoopState) -> None:
        pass

    def after_step(self, state: LoopState) -> None:
        pass

    def idle(self, state: LoopState) -> None:
        pass


def init_layout(n: int, seed: int) -> np.ndarray:
    """Standard-normal coordinates from the package generator."""
    return Xoshiro256StarStar(seed).normal_matrix(n, 2)


# ---------------------------------------------------------------------------
# The loop
# ---------------------------------------------------------------------------


class _CriterionDriver:
    """Per-criterion pool wiring + loss/gradient dispatch."""

    def __init__(self, cfg: CriterionConfig, g: Graph, dist, rng, shared_cross_pool, get_layout):
        self.cfg = cfg
        self.kind = cfg.kind
        self.g = g
        k = cfg.kind
        if k == "ST":
            self.I, self.J, self.D = sampling.stress_items(g, dist)
            self.pool = sampling.IndexPool(len(self.I), rng)
        elif k == "IL":
            self.I, self.J, self.L = sampling.edge_items(g, cfg.ideal_length)
            self.pool = sampling.IndexPool(len(self.I), rng)
        elif k == "NP":
            self.pool = sampling.IndexPool(g.n, rng)
            self.expand_rng = rng.spawn(97)
        elif k in ("CR", "CAM"):
            self.pool = shared_cross_pool
            if k == "CR":
                # predictor training iterates edge pairs; the crossing pool
                # only feeds the surrogate loss
                self.train_pool = None
                n_pairs = g.num_edges * (g.num_edges - 1) // 2
                if 0 < n_pairs <= 500_000:
                    pairs = [
                        (e1, e2)
                        for a, e1 in enumerate(g.edges)
                        for e2 in g.edges[a + 1 :]
                        if not (set(e1) & set(e2))
                    ]
                    if pairs:
                        self.train_pairs = pairs
                        self.train_pool = sampling.IndexPool(len(pairs), rng.spawn(31))
        elif k == "AR":
            self.pool = sampling.IndexPool(g.n, rng)
        elif k == "ANR":
            self.triples = sampling.incident_pair_items(g)
            if len(self.triples) == 0:
                raise ValueError("angular resolution needs a node of degree >= 2")
            self.pool = sampling.IndexPool(len(self.triples), rng)
        elif k == "VR":
            self.I, self.J = sampling.node_pair_items(g)
            self.pool = sampling.IndexPool(len(self.I), rng)
        elif k == "GB":
            self.triples = sampling.gabriel_items(g)
            if len(self.triples) == 0:
                raise ValueError("gabriel criterion needs n >= 3 and an edge")
            self.pool = sampling.IndexPool(len(self.triples), rng)
        self.get_layout = get_layout

    def evaluate(self, X, weight, grad, predictor=None) -> float:
        """Raw (unweighted) sample loss; adds weight * gradient into grad."""
        m = self.cfg.sample_size
        k = self.kind
        if k == "ST":
            idx = self.pool.next_indices(m)
            return kernels.stress_batch(X, self.I[idx], self.J[idx], self.D[idx], grad, weight)
        if k == "IL":
            idx = self.pool.next_indices(m)
            return kernels.edge_len_batch(X, self.I[idx], self.J[idx], self.L[idx], grad, weight)
        if k == "NP":
            seeds = self.pool.next_indices(m)
            sample = sampling.np_subgraph_sample(self.g, seeds, self.cfg.extra_fraction, self.expand_rng)
            lv = C.neighborhood_loss(X, sample)
            self._accumulate(lv, weight, grad)
            return lv.value
        if k == "CR":
            batch = self.pool.next_batch(m)
            if not batch:
                return 0.0
            self._train_predictor(X, batch, predictor)
            lv = neural.crossing_loss(X, batch, predictor)
            self._accumulate(lv, weight, grad)
            return lv.value
        if k == "CAM":
            batch = self.pool.next_batch(m)
            if batch and self.pool.dense_mode:
                crossing = _pairs_cross(X, batch)
                batch = [pr for pr, c in zip(batch, crossing) if c]
            if not batch:
                return 0.0
            lv = C.crossing_angle_loss(X, batch)
            self._accumulate(lv, weight, grad)
            return lv.value
        if k == "AR":
            idx = self.pool.next_indices(m)
            lv = C.aspect_ratio_loss(X, idx, self.cfg.target_ratio)
            self._accumulate(lv, weight, grad)
            return lv.value
        if k == "ANR":
            idx = self.pool.next_indices(m)
            lv = C.angular_resolution_loss(X, self.triples[idx], self.cfg.angular_sensitivity)
            self._accumulate(lv, weight, grad)
            return lv.value
        if k == "VR":
            idx = self.pool.next_indices(m)
            diam = C.layout_diameter(X)
            target = self.cfg.target_resolution or 1.0 / math.sqrt(self.g.n)
            lv = C.vertex_resolution_loss(X, (self.I[idx], self.J[idx]), diam, target)
            self._accumulate(lv, weight, grad)
            return lv.value
        if k == "GB":
            idx = self.pool.next_indices(m)
            lv = C.gabriel_loss(X, self.triples[idx])
            self._accumulate(lv, weight, grad)
            return lv.value
        raise AssertionError(k)

    @staticmethod
    def _accumulate(loss_value, weight, grad):
        for node, vec in loss_value.gradient.items():
            grad[node] += weight * vec

    def _train_predictor(self, X, crossing_batch, predictor):
        """One predictor step per iteration: a mini-batch of edge pairs with
        exact labels, plus the current crossing sample (oversampled toward
        class balance) so the classifier stays sharp when crossings are
        rare."""
        if self.train_pool is not None:
            idx = self.train_pool.next_indices(self.cfg.sample_size)
            pairs = [self.train_pairs[int(i)] for i in idx]
        else:
            pairs = self.pool._random_pairs(self.cfg.sample_size)
        crossing_batch = list(crossing_batch)
        if crossing_batch:
            repeat = max(1, min(8, len(pairs) // (2 * len(crossing_batch))))
            crossing_batch = crossing_batch * repeat
        pairs = pairs + crossing_batch
        if not pairs:
            return
        coords = _pair_coord_matrix(X, pairs)
        labels = _pairs_cross(X, pairs).astype(np.float64)
        predictor.train_step((coords, labels))


def _pair_index_array(pairs) -> np.ndarray:
    return np.asarray(
        [(a, b, c, d) for (a, b), (c, d) in pairs], dtype=np.int64
    ).reshape(-1, 4)


def _pair_coord_matrix(X, pairs) -> np.ndarray:
    idx = _pair_index_array(pairs)
    return X[idx.ravel()].reshape(-1, 8)


def _pairs_cross(X, pairs) -> np.ndarray:
    coords = _pair_coord_matrix(X, pairs)
    return segments_cross_mask(coords[:, 0:4], coords[:, 4:8])


def run_layout(
    g: Graph,
    configs: list[CriterionConfig],
    opt: OptimizerConfig,
    init: np.ndarray,
    control: LoopControl | None = None,
    dist: DistanceMatrix | None = None,
):
    """Algorithm: at each iteration draw one batch per active criterion,
    form the weighted loss, step the layout (optionally through the safe
    update), and stop on maxiter or learning-rate exhaustion.

    Returns (layout, RunTrace).
    """
    if not configs:
        raise ValueError("need at least one criterion")
    kinds = [c.kind for c in configs]
    if len(set(kinds)) != len(kinds):
        raise ValueError("duplicate criterion kinds")
    n = g.n
    X = check_layout(np.array(init, dtype=np.float64, copy=True), n)

    if dist is None and ("ST" in kinds or "NP" in kinds):
        dist = DistanceMatrix(g)  # raises on disconnected input

    schedules = {c.kind: as_schedule(c.weight_schedule) for c in configs}
    rng = Xoshiro256StarStar(opt.seed)

    shared_cross_pool = None
    if "CR" in kinds or "CAM" in kinds:
        shared_cross_pool = sampling.CrossingPool(
            g, lambda: X, rng.spawn(11), refresh_period=opt.crossing_refresh
        )

    drivers = []
    for tag, cfg in enumerate(configs):
        drivers.append(
            _CriterionDriver(cfg, g, dist, rng.spawn(100 + tag), shared_cross_pool, lambda: X)
        )

    predictor = None
    if "CR" in kinds:
        predictor = neural.CrossingPredictor(seed=rng.spawn(7).next_u64() & 0x7FFFFFFF)

    active = [c for c in configs if schedules[c.kind].ever_positive(opt.maxiter)]
    min_sample = min((c.sample_size for c in active), default=32)
    patience = opt.patience if opt.patience is not None else default_patience(n, min_sample)
    controller = PatienceController(patience, opt.lr_decay, opt.stop_lr_fraction)
    ema = EmaAverager(opt.ema_factor)

    velocity = np.zeros_like(X)
    adam_m = np.zeros_like(X)
    adam_v = np.zeros_like(X)
    adam_t = 0
    scratch = np.zeros_like(X)
    delta_buf = np.zeros_like(X)

    guard = None
    quality_fn = None
    if opt.safe_update == "crossings":
        guard = CrossingGuard(g, X)
    elif callable(opt.safe_update):
        quality_fn = opt.safe_update

    state = LoopState(X=X, kinds=tuple(kinds))
    trace = RunTrace(kinds=list(kinds), seed=opt.seed, graph=g.name)
    grad = np.zeros_like(X)

    t = 0
    while t < opt.maxiter:
        if control is not None:
            control.poll(state)
            while state.paused and not state.stop:
                control.idle(state)
                time.sleep(0.002)
                control.poll(state)
        if state.stop:
            break
        if state.reset_seed is not None:
            X[:] = init_layout(n, state.reset_seed)
            velocity[:] = 0.0
            adam_m[:] = 0.0
            adam_v[:] = 0.0
            adam_t = 0
            ema = EmaAverager(opt.ema_factor)
            controller = PatienceController(patience, opt.lr_decay, opt.stop_lr_fraction)
            state.reset_seed = None

        t += 1
        state.iteration = t
        grad[:] = 0.0
        losses = {}
        weights = {}
        total = 0.0
        for cfg, driver in zip(configs, drivers):
            k = cfg.kind
            if k in state.weight_overrides:
                w = float(state.weight_overrides[k])
            else:
                w = schedules[k](t)
            weights[k] = w
            if w <= 0.0:
                continue
            loss_c = driver.evaluate(X, w, grad, predictor)
            if not math.isfinite(loss_c):
                raise RuntimeError(f"non-finite loss from criterion {k} at iteration {t}")
            losses[k] = loss_c
            total += w * loss_c
        if not np.all(np.isfinite(grad)):
            bad = ", ".join(losses)
            raise RuntimeError(
                f"non-finite gradient at iteration {t} (active criteria: {bad})"
            )

        for u in state.pinned:
            grad[u] = 0.0

        base_eta = state.lr_override if state.lr_override is not None else opt.eta_at(t)
        eta = base_eta * controller.scale

        if opt.method == "plain-sgd":
            delta = grad
        elif opt.method == "momentum":
            velocity *= opt.momentum
            velocity += grad
            delta = velocity
        elif opt.method == "adaptive-moments":
            adam_t += 1
            adam_m *= 0.9
            np.multiply(grad, 0.1, out=scratch)
            adam_m += scratch
            adam_v *= 0.999
            np.multiply(grad, grad, out=scratch)
            scratch *= 0.001
            adam_v += scratch
            np.divide(adam_v, 1 - 0.999**adam_t, out=scratch)
            np.sqrt(scratch, out=scratch)
            scratch += 1e-8
            np.divide(adam_m, (1 - 0.9**adam_t) * scratch, out=delta_buf)
            delta = delta_buf
        else:  # rms-adaptive
            adam_v *= 0.9
            np.multiply(grad, grad, out=scratch)
            scratch *= 0.1
            adam_v += scratch
            np.sqrt(adam_v, out=scratch)
            scratch += 1e-8
            np.divide(grad, scratch, out=delta_buf)
            delta = delta_buf

        if guard is not None or quality_fn is not None:
            x_prev = X.copy()
            x_new = X - eta * delta
            if guard is not None:
                X[:] = _safe_update_crossings(x_prev, x_new, g, guard)
            else:
                X[:] = safe_update(x_prev, x_new, g, quality_fn)
        else:
            X -= eta * delta

        for u, xy in state.pinned.items():
            if guard is not None:
                guard.count = guard.try_move(u, np.asarray(xy, dtype=np.float64))
            X[u] = xy

        ema_val = ema.update(total)
        state.last_total = total
        state.last_ema = ema_val
        trace.record(t, losses, weights, eta, total, ema_val)

        if opt.quality_every and t % opt.quality_every == 0:
            from .quality import evaluate_all

            trace.snapshots.append((t, evaluate_all(g, X, dist=dist).as_dict()))

        action = controller.update(ema_val)
        if control is not None:
            control.after_step(state)
        if action == "stop":
            break

    return X, trace
