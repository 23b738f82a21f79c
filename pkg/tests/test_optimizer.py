"""Loop behavior: EMA, patience, safe updates, determinism, invariants."""

import math

import numpy as np
import pytest

import gdlayout as gd
from gdlayout import criteria as C
from gdlayout.criteria import CriterionConfig
from gdlayout.neural import crossing_count_quality
from gdlayout.optimizer import (
    CrossingGuard,
    EmaAverager,
    LoopControl,
    OptimizerConfig,
    PatienceController,
    default_patience,
    init_layout,
    run_layout,
    safe_update,
)
from gdlayout.rng import Xoshiro256StarStar
from gdlayout.schedules import Schedule


class TestEma:
    def test_constant_series(self):
        ema = EmaAverager(0.9)
        for _ in range(50):
            assert ema.update(3.0) == pytest.approx(3.0)

    def test_two_values_closed_form(self):
        ema = EmaAverager(0.5)
        ema.update(4.0)
        assert ema.update(2.0) == pytest.approx((2.0 + 0.5 * 4.0) / 1.5)

    def test_halflife_100(self):
        s = 0.5 ** (1 / 100)
        assert s**100 == pytest.approx(0.5)

    def test_recompute_matches(self):
        rng = Xoshiro256StarStar(1)
        losses = [rng.random() for _ in range(500)]
        ema = EmaAverager(0.5 ** (1 / 100))
        stored = [ema.update(x) for x in losses]
        again = EmaAverager.recompute(losses, 0.5 ** (1 / 100))
        assert np.allclose(stored, again, rtol=0, atol=1e-12)


class TestPatience:
    def test_decreasing_never_decays(self):
        pc = PatienceController(patience=5)
        for k in range(100):
            assert pc.update(100.0 - k) == "continue"

    def test_paper_formula(self):
        assert default_patience(1023, 32) == 9300
        assert default_patience(20, 32) == 100

    def test_flat_series_exactly_one_decay(self):
        pc = PatienceController(patience=10)
        pc.update(1.0)
        actions = [pc.update(1.0) for _ in range(11)]
        assert actions.count("decay_lr") == 1

    def test_stops_after_enough_decays(self):
        pc = PatienceController(patience=1, decay=0.7, stop_fraction=1e-3)
        pc.update(1.0)
        actions = []
        for _ in range(40):
            actions.append(pc.update(1.0))
            if actions[-1] == "stop":
                break
        assert actions[-1] == "stop"
        assert actions.count("decay_lr") == 19  # 0.7^20 < 1e-3


def tiny_graph_and_layout(seed=0):
    g = gd.generate_grid(3, 3)
    return g, init_layout(g.n, seed)


class TestSafeUpdate:
    def test_identity_when_unchanged(self):
        g, X = tiny_graph_and_layout()
        out = safe_update(X, X, g, lambda L: 0.0)
        assert np.array_equal(out, X)

    def test_accepts_all_improving(self):
        g, X = tiny_graph_and_layout()
        target = X * 0.5  # shrinking improves "total spread"
        quality = lambda L: float(np.abs(L).sum())
        out = safe_update(X, target, g, quality)
        assert np.allclose(out, target)

    def test_rejects_worsening_moves(self):
        g, X = tiny_graph_and_layout()
        target = X * 2.0
        quality = lambda L: float(np.abs(L).sum())
        out = safe_update(X, target, g, quality)
        assert np.array_equal(out, X)

    def test_guarded_monotonicity_random_quality(self):
        rng = Xoshiro256StarStar(3)
        g, X = tiny_graph_and_layout(1)
        for trial in range(10):
            Y = X + 0.5 * np.array(
                [[rng.gauss(), rng.gauss()] for _ in range(g.n)]
            )
            quality = lambda L: crossing_count_quality(L, g)
            q0 = quality(X)
            out = safe_update(X, Y, g, quality)
            assert quality(out) <= q0
            X = out


class TestCrossingGuard:
    def test_incremental_matches_full_recount(self):
        rng = Xoshiro256StarStar(7)
        g = gd.generate_grid(3, 4)
        X = init_layout(g.n, 2)
        guard = CrossingGuard(g, X)
        assert guard.count == crossing_count_quality(X, g)
        for step in range(60):
            u = rng.below(g.n)
            move = np.array([rng.gauss(), rng.gauss()])
            new_count = guard.try_move(u, X[u] + move)
            X[u] = X[u] + move
            assert new_count == crossing_count_quality(X, g), f"step {step}"
            guard.count = new_count

    def test_reject_restores(self):
        g = gd.generate_grid(2, 3)
        X = init_layout(g.n, 3)
        guard = CrossingGuard(g, X)
        before = guard.count
        guard.try_move(0, np.array([9.0, 9.0]))
        guard.reject(0, X[0])
        assert guard._incident_count(0) == guard._incident_count(0)
        assert guard.count == before
        assert crossing_count_quality(X, g) == before


def st_configs(weight=1.0):
    return [CriterionConfig(kind="ST", weight_schedule=weight)]


class TestRunLayout:
    def test_zero_weights_leave_layout_unchanged(self):
        g, X0 = tiny_graph_and_layout()
        out, trace = run_layout(
            g,
            st_configs(0.0),
            OptimizerConfig(maxiter=20, seed=0),
            X0,
        )
        assert np.array_equal(out, X0)
        assert all(math.isnan(v) for v in trace.losses["ST"])
        assert all(w == 0.0 for w in trace.weights["ST"])

    def test_stress_path8_converges(self):
        # path of 8 vs independent majorization-quality bound
        g = gd.load_edge_list("\n".join(f"{i} {i+1}" for i in range(7)))
        dist = gd.DistanceMatrix(g)
        X0 = init_layout(g.n, 1)
        opt = OptimizerConfig(
            maxiter=2000, eta=0.1, method="adaptive-moments", seed=1, patience=10**9
        )
        out, _ = run_layout(g, st_configs(), opt, X0, dist=dist)
        assert C.stress_quality(out, dist) < 0.01  # straight line reaches 0

    def test_deterministic_same_seed(self):
        g, X0 = tiny_graph_and_layout()
        opt = OptimizerConfig(maxiter=300, eta=0.05, seed=9)
        out1, tr1 = run_layout(g, st_configs(), opt, X0)
        out2, tr2 = run_layout(g, st_configs(), opt, X0)
        assert np.array_equal(out1, out2)
        assert tr1.to_csv() == tr2.to_csv()

    def test_full_batch_equivalence(self):
        # sample >= pool size + plain SGD: per-iteration loss equals the
        # full objective
        g = gd.generate_grid(2, 3)
        dist = gd.DistanceMatrix(g)
        X0 = init_layout(g.n, 4)
        n_pairs = g.n * (g.n - 1) // 2
        cfgs = [CriterionConfig(kind="ST", sample_size=n_pairs + 5)]
        opt = OptimizerConfig(maxiter=5, eta=0.01, seed=0, patience=10**9)
        _, trace = run_layout(g, cfgs, opt, X0, dist=dist)
        X = X0.copy()
        from gdlayout.sampling import stress_items

        I, J, D = stress_items(g, dist)
        for r in range(5):
            expect = C.stress_loss(X, (I, J, D)).value
            assert trace.losses["ST"][r] == pytest.approx(expect, rel=1e-12)
            lv = C.stress_loss(X, (I, J, D))
            for node, vec in lv.gradient.items():
                X[node] -= 0.01 * vec

    def test_expected_gradient_cosine(self):
        # mean of many sampled stress gradients approximates the full one
        g = gd.generate_grid(4, 4)
        dist = gd.DistanceMatrix(g)
        X = init_layout(g.n, 5)
        from gdlayout.sampling import IndexPool, stress_items

        I, J, D = stress_items(g, dist)
        full = np.zeros_like(X)
        lv = C.stress_loss(X, (I, J, D))
        for node, vec in lv.gradient.items():
            full[node] = vec
        pool = IndexPool(len(I), Xoshiro256StarStar(11))
        acc = np.zeros_like(X)
        for _ in range(10_000):
            idx = pool.next_indices(8)
            lv = C.stress_loss(X, (I[idx], J[idx], D[idx]))
            for node, vec in lv.gradient.items():
                acc[node] += vec
        acc /= 10_000
        cos = float(
            (acc * full).sum() / (np.linalg.norm(acc) * np.linalg.norm(full))
        )
        assert cos > 0.99

    def test_ema_recomputable_from_trace(self):
        g, X0 = tiny_graph_and_layout()
        opt = OptimizerConfig(maxiter=200, eta=0.05, seed=2)
        _, trace = run_layout(g, st_configs(), opt, X0)
        again = EmaAverager.recompute(trace.total, opt.ema_factor)
        assert np.allclose(trace.ema, again, rtol=0, atol=1e-12)

    def test_nan_abort_names_criterion(self):
        g, X0 = tiny_graph_and_layout()
        opt = OptimizerConfig(maxiter=1000, eta=1e280, seed=0)
        with pytest.raises(RuntimeError, match="ST"):
            run_layout(g, st_configs(), opt, X0)

    def test_weight_schedule_gates_sampling(self):
        g, X0 = tiny_graph_and_layout()
        sched = Schedule([(50, 60, 0.0, 1.0)])
        cfgs = [
            CriterionConfig(kind="ST", weight_schedule=1.0),
            CriterionConfig(kind="VR", weight_schedule=sched),
        ]
        opt = OptimizerConfig(maxiter=80, eta=0.02, seed=3, patience=10**9)
        _, trace = run_layout(g, cfgs, opt, X0)
        for r in range(49):
            assert math.isnan(trace.losses["VR"][r])
            assert trace.weights["VR"][r] == 0.0
        assert not math.isnan(trace.losses["VR"][70])

    def test_pinning_equivalence(self):
        # a pinned run is bit-identical to an independent loop that zeroes
        # the node's gradient row and restores its coordinates each step
        g, X0 = tiny_graph_and_layout(6)
        pin_node, pin_pos = 4, (0.25, -0.5)
        eta, T, seed = 0.05, 120, 7

        class PinControl(LoopControl):
            def poll(self, state):
                state.pinned[pin_node] = pin_pos

        opt = OptimizerConfig(maxiter=T, eta=eta, seed=seed, patience=10**9)
        X_start = X0.copy()
        X_start[pin_node] = pin_pos
        out_pinned, _ = run_layout(g, st_configs(), opt, X_start, control=PinControl())
        assert np.array_equal(out_pinned[pin_node], np.array(pin_pos))
        assert not np.array_equal(out_pinned, X_start)

        # manual replication with the same pool stream (drivers derive their
        # generator as seed.spawn(100 + index))
        from gdlayout import kernels
        from gdlayout.sampling import IndexPool, stress_items

        dist = gd.DistanceMatrix(g)
        I, J, D = stress_items(g, dist)
        pool = IndexPool(len(I), Xoshiro256StarStar(seed).spawn(100))
        X = X_start.copy()
        for _ in range(T):
            grad = np.zeros_like(X)
            idx = pool.next_indices(32)
            kernels.stress_batch(X, I[idx], J[idx], D[idx], grad, 1.0)
            grad[pin_node] = 0.0
            X -= eta * grad
            X[pin_node] = pin_pos
        assert np.array_equal(out_pinned, X)

    def test_trace_csv_shape(self):
        g, X0 = tiny_graph_and_layout()
        opt = OptimizerConfig(maxiter=10, eta=0.05, seed=0, patience=10**9)
        _, trace = run_layout(g, st_configs(), opt, X0)
        lines = trace.to_csv().strip().split("\n")
        assert lines[0] == "iter,lr,total,ema,loss_ST,weight_ST"
        assert len(lines) == 11

    def test_safe_update_keeps_planarity(self):
        g = gd.generate_grid(3, 3)
        X0 = np.array([[c, r] for r in range(3) for c in range(3)], dtype=float)
        opt = OptimizerConfig(
            maxiter=150, eta=0.05, seed=1, safe_update="crossings", patience=10**9
        )
        out, _ = run_layout(g, st_configs(), opt, X0)
        assert crossing_count_quality(out, g) == 0

    def test_rejects_duplicate_kinds(self):
        g, X0 = tiny_graph_and_layout()
        with pytest.raises(ValueError):
            run_layout(
                g,
                [CriterionConfig(kind="ST"), CriterionConfig(kind="ST")],
                OptimizerConfig(maxiter=5),
                X0,
            )
