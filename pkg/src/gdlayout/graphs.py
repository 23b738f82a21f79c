"""Graph representation, canonical generators, file loaders and hop distances.

Graphs are simple, undirected and immutable: node indices 0..n-1, an edge
list of unordered pairs, and per-node sorted adjacency. Distances are exact
unweighted hop counts (the package treats every input as unweighted).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph

LAZY_APSP_THRESHOLD = 4096


class GraphFormatError(ValueError):
    """Malformed graph input text."""


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple
    name: str = "graph"
    adjacency: tuple = field(init=False, repr=False)

    def __post_init__(self):
        seen = set()
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i},{j}) outside [0,{self.n})")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            adj[i].append(j)
            adj[j].append(i)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def edge_array(self) -> np.ndarray:
        """(m, 2) int array of edges, rows sorted, i < j."""
        if self.num_edges == 0:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(self.edges, dtype=np.int64)

    def to_csr(self) -> sp.csr_matrix:
        e = self.edge_array()
        data = np.ones(2 * len(e), dtype=np.int8)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))


class DistanceMatrix:
    """Exact hop distances; dense for small graphs, per-source cached above
    LAZY_APSP_THRESHOLD nodes to bound memory."""

    def __init__(self, graph: Graph):
        self.n = graph.n
        self._csr = graph.to_csr()
        ncomp, _ = csgraph.connected_components(self._csr, directed=False)
        if graph.n > 0 and ncomp != 1:
            raise ValueError(f"graph is disconnected ({ncomp} components)")
        self._rows: dict[int, np.ndarray] = {}
        if self.n <= LAZY_APSP_THRESHOLD:
            d = csgraph.shortest_path(self._csr, method="D", unweighted=True)
            self._dense = d.astype(np.int32)
        else:
            self._dense = None

    def row(self, i: int) -> np.ndarray:
        if self._dense is not None:
            return self._dense[i]
        cached = self._rows.get(i)
        if cached is None:
            d = csgraph.shortest_path(
                self._csr, method="D", unweighted=True, indices=[i]
            )[0]
            cached = d.astype(np.int32)
            self._rows[i] = cached
        return cached

    def __getitem__(self, ij) -> int:
        i, j = ij
        return int(self.row(i)[j])

    def dense(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense
        return np.stack([self.row(i) for i in range(self.n)])


def all_pairs_shortest_paths(g: Graph) -> DistanceMatrix:
    return DistanceMatrix(g)


def generate_grid(rows: int, cols: int) -> Graph:
    """rows x cols lattice, row-major node indexing."""
    if rows < 1 or cols < 1:
        raise ValueError("grid needs rows >= 1 and cols >= 1")
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                edges.append((i, i + 1))
            if r + 1 < rows:
                edges.append((i, i + cols))
    return Graph(rows * cols, tuple(edges), name=f"grid-{rows}-{cols}")


def generate_balanced_tree(branching: int, depth: int) -> Graph:
    """Balanced tree: root plus `branching` children per node, given depth."""
    if branching < 1:
        raise ValueError("branching must be >= 1")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    edges = []
    frontier = [0]
    next_index = 1
    for _ in range(depth):
        new_frontier = []
        for parent in frontier:
            for _ in range(branching):
                edges.append((parent, next_index))
                new_frontier.append(next_index)
                next_index += 1
        frontier = new_frontier
    return Graph(next_index, tuple(edges), name=f"tree-{branching}-{depth}")


# Skeleton of the regular dodecahedron: outer 5-cycle, two interleaved
# 10-cycles via the middle ring, inner 5-cycle. 20 nodes, 30 edges, 3-regular.
_DODECAHEDRON_EDGES = (
    # outer pentagon 0-4
    (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
    # spokes to upper ring 5-9
    (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
    # middle ring alternates upper (5-9) and lower (10-14) nodes
    (5, 10), (10, 6), (6, 11), (11, 7), (7, 12),
    (12, 8), (8, 13), (13, 9), (9, 14), (14, 5),
    # spokes to inner pentagon 15-19
    (10, 15), (11, 16), (12, 17), (13, 18), (14, 19),
    # inner pentagon
    (15, 16), (16, 17), (17, 18), (18, 19), (19, 15),
)


def generate_dodecahedron() -> Graph:
    return Graph(20, _DODECAHEDRON_EDGES, name="dodecahedron")


GENERATORS = {
    "grid": generate_grid,
    "tree": generate_balanced_tree,
    "dodecahedron": generate_dodecahedron,
}


def _dedupe_edges(raw_edges, context: str):
    """Drop self-loops and duplicates, warning with counts."""
    seen = set()
    edges = []
    self_loops = 0
    duplicates = 0
    for i, j in raw_edges:
        if i == j:
            self_loops += 1
            continue
        key = (min(i, j), max(i, j))
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        edges.append(key)
    if self_loops or duplicates:
        warnings.warn(
            f"{context}: dropped {self_loops} self-loop(s) and "
            f"{duplicates} duplicate edge(s)",
            stacklevel=3,
        )
    return edges


def load_edge_list(text: str, name: str = "edge-list") -> Graph:
    """Parse whitespace-separated integer pairs; '#' starts a comment.

    Labels are compacted to 0..n-1 in increasing numeric order. A
    '# nodes: N' comment (written by save_edge_list) preserves isolated
    nodes across a round trip.
    """
    raw = []
    labels = set()
    declared_n = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)
        comment = stripped[1] if len(stripped) > 1 else ""
        body = stripped[0].strip()
        if comment.strip().startswith("nodes:"):
            try:
                declared_n = int(comment.strip()[len("nodes:"):])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: bad nodes: directive")
        if not body:
            continue
        parts = body.split()
        if len(parts) != 2:
            raise GraphFormatError(
                f"line {lineno}: expected two node labels, got {len(parts)}"
            )
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer node label")
        raw.append((a, b))
        labels.update((a, b))
    index = {lab: k for k, lab in enumerate(sorted(labels))}
    edges = _dedupe_edges(((index[a], index[b]) for a, b in raw), "load_edge_list")
    n = len(index)
    if declared_n is not None:
        if declared_n < n:
            raise GraphFormatError("nodes: directive smaller than label count")
        n = declared_n
    return Graph(n, tuple(edges), name=name)


def save_edge_list(g: Graph) -> str:
    lines = [f"# {g.name}", f"# nodes: {g.n}"]
    lines.extend(f"{i} {j}" for i, j in g.edges)
    return "\n".join(lines) + "\n"


def load_matrix_market(text: str, name: str = "matrix-market") -> Graph:
    """Coordinate-format Matrix Market pattern/real matrix as an undirected
    graph: off-diagonal nonzeros become edges, symmetrized and deduplicated."""
    lines = iter(text.splitlines())
    try:
        header = next(lines)
    except StopIteration:
        raise GraphFormatError("empty matrix market input")
    parts = header.strip().split()
    if len(parts) < 4 or parts[0] != "%%MatrixMarket" or parts[1] != "matrix":
        raise GraphFormatError(f"unsupported header: {header.strip()!r}")
    layout = parts[2]
    if layout != "coordinate":
        raise GraphFormatError(f"unsupported matrix layout {layout!r} (need coordinate)")
    field_kind = parts[3]
    if field_kind not in ("pattern", "real", "integer"):
        raise GraphFormatError(f"unsupported field type {field_kind!r}")

    size_line = None
    for line in lines:
        if line.startswith("%"):
            continue
        size_line = line
        break
    if size_line is None:
        raise GraphFormatError("missing size line")
    dims = size_line.split()
    if len(dims) != 3:
        raise GraphFormatError("size line must be 'rows cols nnz'")
    nrows, ncols, nnz = (int(x) for x in dims)
    n = max(nrows, ncols)

    raw = []
    count = 0
    for line in lines:
        if not line.strip() or line.startswith("%"):
            continue
        entry = line.split()
        r, c = int(entry[0]) - 1, int(entry[1]) - 1
        count += 1
        if r == c:
            continue
        raw.append((r, c))
    if count != nnz:
        raise GraphFormatError(f"expected {nnz} entries, found {count}")
    edges = _dedupe_edges(raw, "load_matrix_market")
    return Graph(n, tuple(edges), name=name)


def bfs_distances(g: Graph, source: int) -> list[int]:
    """Plain list-based BFS; the independent oracle for DistanceMatrix."""
    dist = [-1] * g.n
    dist[source] = 0
    queue = [source]
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        for v in g.adjacency[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist
