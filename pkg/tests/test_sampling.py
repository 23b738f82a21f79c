"""Pool epoch semantics, determinism, subgraph sampling, crossing pool."""

import numpy as np
import pytest

import gdlayout as gd
from gdlayout.rng import Xoshiro256StarStar
from gdlayout.sampling import (
    CrossingPool,
    IndexPool,
    SamplePool,
    np_subgraph_sample,
    pool_from_items,
)


class TestSamplePool:
    def test_epoch_sizes_2_2_1(self):
        pool = pool_from_items([10, 20, 30, 40, 50], seed=1)
        sizes = [len(pool.next_batch(2)) for _ in range(3)]
        assert sizes == [2, 2, 1]

    def test_same_seed_same_sequence(self):
        a = pool_from_items(list(range(30)), seed=9)
        b = pool_from_items(list(range(30)), seed=9)
        for _ in range(20):
            assert a.next_batch(7) == b.next_batch(7)

    def test_each_item_exactly_once_per_epoch(self):
        items = list(range(100))
        pool = pool_from_items(items, seed=3)
        for _epoch in range(10):
            seen = []
            while len(seen) < 100:
                seen.extend(pool.next_batch(13))
            assert sorted(seen) == items

    def test_full_batch_when_m_exceeds_pool(self):
        pool = pool_from_items([1, 2, 3], seed=0)
        assert sorted(pool.next_batch(10)) == [1, 2, 3]

    def test_empty_items_rejected(self):
        with pytest.raises(ValueError):
            pool_from_items([], seed=0)

    def test_batch_size_validated(self):
        pool = pool_from_items([1], seed=0)
        with pytest.raises(ValueError):
            pool.next_batch(0)


class TestIndexPool:
    def test_coverage_over_epochs(self):
        pool = IndexPool(57, Xoshiro256StarStar(2))
        seen = []
        for _ in range(100):
            seen.extend(pool.next_indices(10).tolist())
            if len(seen) >= 57 * 3:
                break
        assert sorted(seen[:57]) == list(range(57))
        assert sorted(seen[57:114]) == list(range(57))


class TestSubgraphSample:
    def test_whole_graph_when_all_seeds(self):
        g = gd.generate_grid(3, 3)
        sub = np_subgraph_sample(g, range(9), 0.0, Xoshiro256StarStar(0))
        assert len(sub.nodes) == 9

    def test_star_center_seed_covers_star(self):
        g = gd.Graph(5, ((0, 1), (0, 2), (0, 3), (0, 4)))
        sub = np_subgraph_sample(g, [0], 0.0, Xoshiro256StarStar(0))
        assert sorted(sub.nodes.tolist()) == [0, 1, 2, 3, 4]

    def test_grid_corner_two_hop_block(self):
        g = gd.generate_grid(5, 5)
        sub = np_subgraph_sample(g, [0], 0.0, Xoshiro256StarStar(0))
        # corner + 1-hop {1, 5} + 2-hop {2, 6, 10}
        assert sorted(sub.nodes.tolist()) == [0, 1, 2, 5, 6, 10]

    def test_extra_fraction_adds_outsiders(self):
        g = gd.generate_grid(5, 5)
        base = np_subgraph_sample(g, [0], 0.0, Xoshiro256StarStar(1))
        plus = np_subgraph_sample(g, [0], 0.5, Xoshiro256StarStar(1))
        assert len(plus.nodes) == len(base.nodes) + 3  # ceil(0.5 * 6)

    def test_induced_adjacency(self):
        g = gd.generate_grid(3, 3)
        sub = np_subgraph_sample(g, [4], 0.0, Xoshiro256StarStar(0))
        pos = {int(v): a for a, v in enumerate(sub.nodes)}
        for v in sub.nodes:
            for w in g.adjacency[int(v)]:
                if int(w) in pos:
                    assert sub.adj[pos[int(v)], pos[int(w)]]


class TestCrossingPool:
    def test_planar_layout_gives_empty_signal(self):
        g = gd.generate_grid(3, 3)
        X = np.array([[c, r] for r in range(3) for c in range(3)], dtype=float)
        pool = CrossingPool(g, lambda: X, Xoshiro256StarStar(0))
        assert pool.next_batch(8) == []

    def test_k5_five_pairs_per_epoch(self):
        import itertools

        g = gd.Graph(5, tuple(itertools.combinations(range(5), 2)))
        t = np.linspace(0, 2 * np.pi, 5, endpoint=False)
        X = np.stack([np.cos(t), np.sin(t)], axis=1)
        pool = CrossingPool(g, lambda: X, Xoshiro256StarStar(0), refresh_period=10**9)
        seen = []
        while len(seen) < 5:
            seen.extend(pool.next_batch(2))
        assert len(set(seen)) == 5

    def test_refill_tracks_layout_changes(self):
        g = gd.Graph(4, ((0, 1), (2, 3)))
        X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
        pool = CrossingPool(g, lambda: X, Xoshiro256StarStar(0), refresh_period=1)
        assert len(pool.next_batch(5)) == 1
        X[2] = [5.0, 5.0]
        X[3] = [6.0, 6.0]  # uncross
        pool.next_batch(5)  # drains
        assert pool.next_batch(5) == []

    def test_dense_mode_on_many_crossings(self):
        import itertools

        g = gd.Graph(10, tuple(itertools.combinations(range(10), 2)))  # K10
        rng = Xoshiro256StarStar(5)
        X = np.array([[rng.gauss(), rng.gauss()] for _ in range(10)])
        pool = CrossingPool(g, lambda: X, Xoshiro256StarStar(1), dense_factor=0.1)
        assert pool.dense_mode
        batch = pool.next_batch(16)
        assert len(batch) == 16
        for e1, e2 in batch:
            assert not (set(e1) & set(e2))
