"""Graph construction, generators, loaders and hop distances."""

import numpy as np
import pytest

from gdlayout.graphs import (
    DistanceMatrix,
    Graph,
    GraphFormatError,
    bfs_distances,
    generate_balanced_tree,
    generate_dodecahedron,
    generate_grid,
    load_edge_list,
    load_matrix_market,
    save_edge_list,
)
from gdlayout.rng import Xoshiro256StarStar


def random_connected_graph(n, extra_edges, seed):
    rng = Xoshiro256StarStar(seed)
    edges = set()
    for v in range(1, n):
        u = rng.below(v)
        edges.add((u, v))
    for _ in range(extra_edges):
        a, b = rng.below(n), rng.below(n)
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return Graph(n, tuple(edges))


class TestGraphInvariants:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError, match="self-loop"):
            Graph(3, ((0, 0),))

    def test_rejects_duplicate(self):
        with pytest.raises(ValueError, match="duplicate"):
            Graph(3, ((0, 1), (1, 0)))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="outside"):
            Graph(2, ((0, 5),))

    def test_adjacency_is_symmetric_on_random_graphs(self):
        for seed in range(10):
            g = random_connected_graph(20, 15, seed)
            for i in range(g.n):
                for j in g.adjacency[i]:
                    assert i in g.adjacency[j]
                assert list(g.adjacency[i]) == sorted(set(g.adjacency[i]))
                assert i not in g.adjacency[i]


class TestGenerators:
    def test_grid_2x2(self):
        g = generate_grid(2, 2)
        assert g.n == 4 and g.num_edges == 4

    def test_grid_6x10(self):
        g = generate_grid(6, 10)
        assert g.n == 60
        assert g.num_edges == 6 * 9 + 10 * 5  # 104

    def test_grid_12x24(self):
        g = generate_grid(12, 24)
        assert g.n == 288 and g.num_edges == 540

    def test_tree_2_5(self):
        g = generate_balanced_tree(2, 5)
        assert g.n == 63 and g.num_edges == 62

    def test_tree_depth_zero(self):
        g = generate_balanced_tree(2, 0)
        assert g.n == 1 and g.num_edges == 0

    def test_tree_2_6(self):
        g = generate_balanced_tree(2, 6)
        assert g.n == 127 and g.num_edges == 126

    def test_tree_is_connected_acyclic(self):
        g = generate_balanced_tree(3, 4)
        assert g.num_edges == g.n - 1
        assert max(bfs_distances(g, 0)) >= 0  # all reachable
        assert -1 not in bfs_distances(g, 0)

    def test_dodecahedron_counts_and_regularity(self):
        g = generate_dodecahedron()
        assert g.n == 20 and g.num_edges == 30
        assert all(g.degree(i) == 3 for i in range(g.n))

    def test_dodecahedron_has_planar_drawing(self):
        # concentric-pentagon embedding: no crossings
        from gdlayout.geometry import all_crossings

        g = generate_dodecahedron()
        X = np.zeros((20, 2))
        outer = np.pi / 2 + 2 * np.pi * np.arange(5) / 5
        offset = outer + np.pi / 5
        for ring, (radius, angles) in enumerate(
            [(4.0, outer), (2.6, outer), (1.7, offset), (1.0, offset)]
        ):
            for k in range(5):
                X[5 * ring + k] = radius * np.array([np.cos(angles[k]), np.sin(angles[k])])
        assert len(all_crossings(X, g)) == 0

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            generate_grid(0, 3)
        with pytest.raises(ValueError):
            generate_balanced_tree(0, 2)


class TestEdgeListFormat:
    def test_path(self):
        g = load_edge_list("0 1\n1 2")
        assert g.n == 3 and g.num_edges == 2

    def test_self_loop_dropped_with_warning(self):
        with pytest.warns(UserWarning, match="1 self-loop"):
            g = load_edge_list("0 0")
        assert g.n == 1 and g.num_edges == 0

    def test_parse_error_names_line(self):
        with pytest.raises(GraphFormatError, match="line 1"):
            load_edge_list("a b")

    def test_comment_and_label_compaction(self):
        g = load_edge_list("# a comment\n10 30\n30 20\n")
        assert g.n == 3
        assert g.edges == ((0, 2), (1, 2))  # sorted labels 10,20,30 -> 0,1,2

    def test_roundtrip_preserves_edges(self):
        for seed in range(5):
            g = random_connected_graph(12, 8, seed)
            g2 = load_edge_list(save_edge_list(g))
            assert g2.n == g.n
            assert g2.edges == g.edges

    def test_roundtrip_single_node(self):
        g = generate_balanced_tree(2, 0)
        g2 = load_edge_list(save_edge_list(g))
        assert g2.n == 1 and g2.num_edges == 0


class TestMatrixMarket:
    def test_identity_has_no_edges(self):
        text = "%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 1.0\n2 2 1.0\n3 3 1.0\n"
        g = load_matrix_market(text)
        assert g.n == 3 and g.num_edges == 0

    def test_path_from_entries(self):
        text = "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n2 1\n3 2\n"
        g = load_matrix_market(text)
        assert g.n == 3 and g.edges == ((0, 1), (1, 2))

    def test_unsupported_layout_named(self):
        with pytest.raises(GraphFormatError, match="array"):
            load_matrix_market("%%MatrixMarket matrix array real general\n3 3\n")

    def test_symmetrizes_and_dedupes(self):
        text = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 5.0\n2 1 7.0\n"
        with pytest.warns(UserWarning):
            g = load_matrix_market(text)
        assert g.edges == ((0, 1),)

    def test_494_bus_when_available(self):
        import pathlib

        path = pathlib.Path(__file__).parent / "data" / "494_bus.mtx"
        if not path.exists():
            pytest.skip("494-bus matrix not present")
        g = load_matrix_market(path.read_text(), name="494-bus")
        assert g.n == 494


class TestDistances:
    def test_path_distance(self):
        g = load_edge_list("0 1\n1 2")
        d = DistanceMatrix(g)
        assert d[0, 2] == 2

    def test_grid_2x2_max(self):
        d = DistanceMatrix(generate_grid(2, 2))
        assert d.dense().max() == 2

    def test_dodecahedron_diameter_is_5(self):
        g = generate_dodecahedron()
        d = DistanceMatrix(g)
        assert d.dense().max() == 5
        # brute-force BFS from every node agrees
        brute = max(max(bfs_distances(g, s)) for s in range(g.n))
        assert brute == 5

    def test_matches_bfs_oracle_on_random_graphs(self):
        for seed in range(8):
            g = random_connected_graph(30, 20, seed)
            d = DistanceMatrix(g)
            for s in range(0, g.n, 7):
                assert list(d.row(s)) == bfs_distances(g, s)

    def test_disconnected_rejected_with_component_count(self):
        g = Graph(4, ((0, 1), (2, 3)))
        with pytest.raises(ValueError, match="2 components"):
            DistanceMatrix(g)

    def test_invariants_on_random(self):
        g = random_connected_graph(15, 10, 3)
        d = DistanceMatrix(g).dense()
        assert (d == d.T).all()
        assert (np.diag(d) == 0).all()
        off = d[~np.eye(g.n, dtype=bool)]
        assert (off >= 1).all()
