"""Mini-batch sources: epoch-shuffled pools with optional refill.

A pool shuffles a permutation of its items once per epoch (Fisher-Yates
driven by the package's fixed-algorithm generator) and yields consecutive
slices, so every item appears exactly once per epoch; the tail batch may be
short. IndexPool yields index arrays into caller-held arrays (the cheap form
used by the optimizer); SamplePool yields the items themselves. The crossing
pool regenerates its items from the current layout instead of reshuffling; a
refill that produces nothing yields the distinct empty-batch signal ([]).
"""

from __future__ import annotations

import numpy as np

from .criteria import SubgraphSample, subgraph_sample_from_nodes
from .geometry import all_crossings
from .graphs import Graph
from .rng import Xoshiro256StarStar


class IndexPool:
    """Epoch-exact shuffled source of indices 0..count-1."""

    def __init__(self, count: int, rng: Xoshiro256StarStar):
        if count < 1:
            raise ValueError("empty pool")
        self.count = count
        self.rng = rng
        self.epoch = 0
        self.cursor = 0
        self._order = np.arange(count)
        self._shuffle()

    def _shuffle(self):
        self.rng.shuffle(self._order)
        self.cursor = 0
        self.epoch += 1

    def next_indices(self, m: int) -> np.ndarray:
        if m < 1:
            raise ValueError("batch size must be >= 1")
        if self.cursor >= self.count:
            self._shuffle()
        end = min(self.cursor + m, self.count)
        batch = self._order[self.cursor : end]
        self.cursor = end
        return batch


class SamplePool:
    """Item-yielding pool over a fixed list."""

    def __init__(self, items, rng: Xoshiro256StarStar):
        self.items = list(items)
        self._pool = IndexPool(len(self.items), rng)

    @property
    def epoch(self) -> int:
        return self._pool.epoch

    def next_batch(self, m: int) -> list:
        return [self.items[k] for k in self._pool.next_indices(m)]


def pool_from_items(items, seed: int) -> SamplePool:
    return SamplePool(items, Xoshiro256StarStar(seed))


def np_subgraph_sample(
    g: Graph, seeds, extra_fraction: float, rng: Xoshiro256StarStar
) -> SubgraphSample:
    """Seed nodes, their 1- and 2-hop neighbourhoods, plus a fraction of
    uniformly drawn outside nodes; returns the induced subgraph."""
    chosen = set(int(v) for v in seeds)
    for v in list(chosen):
        for w in g.adjacency[v]:
            chosen.add(int(w))
            for z in g.adjacency[w]:
                chosen.add(int(z))
    extras = int(np.ceil(extra_fraction * len(chosen)))
    outside = [v for v in range(g.n) if v not in chosen]
    for _ in range(min(extras, len(outside))):
        pick = rng.below(len(outside))
        chosen.add(outside.pop(pick))
    return subgraph_sample_from_nodes(g, chosen)


class CrossingPool:
    """Pool over the current layout's crossing pairs.

    Refills run all_crossings on the then-current layout, at most once per
    `refresh_period` batch draws (stale items are reshuffled in between).
    When a refill finds more than dense_factor * |E| crossings the pool
    switches to dense mode and serves uniformly random non-adjacent edge
    pairs instead (rejection sampling), re-checking the exact count every
    `dense_recheck` draws.
    """

    def __init__(
        self,
        g: Graph,
        get_layout,
        rng: Xoshiro256StarStar,
        refresh_period: int = 10,
        dense_factor: float = 5.0,
        dense_recheck: int = 200,
    ):
        self.g = g
        self.get_layout = get_layout
        self.rng = rng
        self.refresh_period = max(1, refresh_period)
        self.dense_factor = dense_factor
        self.dense_recheck = dense_recheck
        self.dense_mode = False
        self.items: list = []
        self._order = np.arange(0)
        self.cursor = 0
        self.epoch = 0
        self.draws_since_refresh = 0
        self._edges = g.edges
        self._refresh()

    def _refresh(self):
        crossings = all_crossings(self.get_layout(), self.g)
        self.draws_since_refresh = 0
        self.dense_mode = len(crossings) > self.dense_factor * max(1, self.g.num_edges)
        if self.dense_mode:
            self.items = []
            return
        self.items = list(crossings.pairs)
        self._order = np.arange(len(self.items))
        self._reshuffle()

    def _reshuffle(self):
        self.rng.shuffle(self._order)
        self.cursor = 0
        self.epoch += 1

    def _random_pairs(self, m: int) -> list:
        edges = self._edges
        n_edges = len(edges)
        out = []
        attempts = 0
        while len(out) < m and attempts < 50 * m:
            attempts += 1
            a = self.rng.below(n_edges)
            b = self.rng.below(n_edges)
            if a == b:
                continue
            e1, e2 = edges[min(a, b)], edges[max(a, b)]
            if e1[0] in e2 or e1[1] in e2:
                continue
            out.append((e1, e2))
        return out

    def next_batch(self, m: int) -> list:
        if m < 1:
            raise ValueError("batch size must be >= 1")
        self.draws_since_refresh += 1
        if self.dense_mode:
            if self.draws_since_refresh >= self.dense_recheck:
                self._refresh()
            if self.dense_mode:
                return self._random_pairs(m)
        if self.cursor >= len(self.items):
            if self.draws_since_refresh >= self.refresh_period or not self.items:
                self._refresh()
                if self.dense_mode:
                    return self._random_pairs(m)
            else:
                self._reshuffle()
            if not self.items:
                return []
        end = min(self.cursor + m, len(self.items))
        batch = [self.items[k] for k in self._order[self.cursor : end]]
        self.cursor = end
        return batch


def crossing_pool(
    g: Graph, get_layout, seed: int, refresh_period: int = 10
) -> CrossingPool:
    return CrossingPool(g, get_layout, Xoshiro256StarStar(seed), refresh_period)


# ---------------------------------------------------------------------------
# Item builders for the per-criterion pools
# ---------------------------------------------------------------------------


def stress_items(g: Graph, dist) -> tuple:
    """(I, J, D) arrays over all unordered node pairs."""
    n = g.n
    I, J = np.triu_indices(n, k=1)
    D = np.concatenate(
        [dist.row(i)[i + 1 :].astype(np.float64) for i in range(n - 1)]
    )
    return I.astype(np.int64), J.astype(np.int64), D


def node_pair_items(g: Graph) -> tuple:
    I, J = np.triu_indices(g.n, k=1)
    return I.astype(np.int64), J.astype(np.int64)


def edge_items(g: Graph, ideal_length: float = 1.0) -> tuple:
    e = g.edge_array()
    L = np.full(len(e), float(ideal_length))
    return e[:, 0].copy(), e[:, 1].copy(), L


def incident_pair_items(g: Graph) -> np.ndarray:
    """(N, 3) triples (i, j, k) for incident edge pairs (i,j),(j,k)."""
    out = []
    for j in range(g.n):
        neigh = g.adjacency[j]
        for a in range(len(neigh)):
            for b in range(a + 1, len(neigh)):
                out.append((neigh[a], j, neigh[b]))
    return np.asarray(out, dtype=np.int64).reshape(-1, 3)


def gabriel_items(g: Graph) -> np.ndarray:
    """(N, 3) triples (i, j, k): edge (i, j), node k off the edge."""
    out = []
    for i, j in g.edges:
        for k in range(g.n):
            if k != i and k != j:
                out.append((i, j, k))
    return np.asarray(out, dtype=np.int64).reshape(-1, 3)
