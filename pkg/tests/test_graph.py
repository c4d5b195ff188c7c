import numpy as np
import pytest

from cimbandits.graph import (
    Graph,
    assign_weighted_cascade,
    constant_probs,
    dumps_edge_list,
    load_edge_list,
    max_reach,
    reachable_edges_from,
    reachable_nodes,
)
from helpers import transitive_closure_counts


class TestLoadEdgeList:
    def test_basic_with_probs(self):
        g, probs = load_edge_list("a b 0.5\nb c 0.5")
        assert (g.n, g.m) == (3, 2)
        assert g.labels == ("a", "b", "c")
        assert g.edges == ((0, 1), (1, 2))
        np.testing.assert_array_equal(probs, [0.5, 0.5])

    def test_comment_skipped(self):
        g, probs = load_edge_list("# c\nx y")
        assert (g.n, g.m) == (2, 1)
        assert probs is None

    def test_out_of_range_probability(self):
        with pytest.raises(ValueError, match="range"):
            load_edge_list("a b 1.5")

    def test_mixed_lines(self):
        with pytest.raises(ValueError, match="format"):
            load_edge_list("a b 0.5\nb c")

    def test_too_few_tokens(self):
        with pytest.raises(ValueError, match="parse"):
            load_edge_list("a")

    def test_too_many_tokens(self):
        with pytest.raises(ValueError, match="parse"):
            load_edge_list("a b 0.5 x")

    def test_bad_float(self):
        with pytest.raises(ValueError, match="parse"):
            load_edge_list("a b half")

    def test_crlf_and_blank_lines(self):
        g, probs = load_edge_list("a b 0.25\r\n\r\nb c 0.75\r\n")
        assert g.m == 2
        np.testing.assert_array_equal(probs, [0.25, 0.75])

    def test_first_appearance_order(self):
        g, _ = load_edge_list("z a\na z\nq z")
        assert g.labels == ("z", "a", "q")

    def test_parallel_edges_kept(self):
        g, _ = load_edge_list("a b\na b")
        assert g.m == 2
        assert g.edges == ((0, 1), (0, 1))

    def test_round_trip(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            n = int(rng.integers(2, 8))
            m = int(rng.integers(1, 12))
            lines = [
                f"n{rng.integers(n)} n{rng.integers(n)} {rng.random()!r}"
                for _ in range(m)
            ]
            g, probs = load_edge_list("\n".join(lines))
            g2, probs2 = load_edge_list(dumps_edge_list(g, probs))
            assert g2.edges == g.edges
            assert g2.labels == g.labels
            np.testing.assert_array_equal(probs2, probs)

    def test_round_trip_without_probs(self):
        g, _ = load_edge_list("a b\nb c\nc a")
        g2, probs2 = load_edge_list(dumps_edge_list(g))
        assert g2.edges == g.edges and probs2 is None


class TestWeightedCascade:
    def test_star(self):
        g, _ = load_edge_list("a v\nb v\nc v\nd v")
        np.testing.assert_array_equal(assign_weighted_cascade(g), [0.25] * 4)

    def test_single_edge(self):
        g, _ = load_edge_list("u v")
        np.testing.assert_array_equal(assign_weighted_cascade(g), [1.0])

    def test_parallel_edges_count(self):
        g, _ = load_edge_list("u v\nu v\nw v")
        np.testing.assert_allclose(assign_weighted_cascade(g), [1 / 3] * 3)

    def test_constant_helper(self):
        g, _ = load_edge_list("u v\nv w")
        np.testing.assert_array_equal(constant_probs(g, 0.3), [0.3, 0.3])
        with pytest.raises(ValueError):
            constant_probs(g, 1.3)


class TestMaxReach:
    def test_path(self):
        assert max_reach(Graph(3, [(0, 1), (1, 2)])) == 3

    def test_isolated(self):
        assert max_reach(Graph(3, [])) == 1

    def test_cycle(self):
        assert max_reach(Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])) == 4

    def test_empty(self):
        assert max_reach(Graph(0, [])) == 0

    def test_against_matrix_closure(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            n = int(rng.integers(1, 11))
            m = int(rng.integers(0, 2 * n + 1))
            g = Graph(n, [(int(rng.integers(n)), int(rng.integers(n))) for _ in range(m)])
            assert max_reach(g) == max(transitive_closure_counts(g))
            assert max_reach(g) >= 1


class TestReachableEdges:
    def test_path_from_root(self):
        g, _ = load_edge_list("a b\nb c")
        assert reachable_edges_from(g, {0}) == {0, 1}

    def test_sink_seed(self):
        g, _ = load_edge_list("a b\nb c")
        assert reachable_edges_from(g, {2}) == set()

    def test_diamond_from_middle(self):
        g, _ = load_edge_list("a b\na c\nb d\nc d")
        assert reachable_edges_from(g, {g.node_id("b")}) == {2}

    def test_empty_seed_set(self):
        g, _ = load_edge_list("a b\nb c")
        assert reachable_edges_from(g, set()) == set()

    def test_unknown_node(self):
        g, _ = load_edge_list("a b")
        with pytest.raises(ValueError):
            reachable_edges_from(g, {9})

    def test_monotone_in_seeds(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            n = int(rng.integers(2, 9))
            m = int(rng.integers(1, 14))
            g = Graph(n, [(int(rng.integers(n)), int(rng.integers(n))) for _ in range(m)])
            small = set(int(u) for u in rng.choice(n, size=int(rng.integers(0, n)), replace=False))
            extra = int(rng.integers(n))
            assert reachable_edges_from(g, small) <= reachable_edges_from(g, small | {extra})

    def test_seeds_count_as_reachable(self):
        g, _ = load_edge_list("a b\nc d")
        assert reachable_nodes(g, {0}) == {0, 1}


class TestGraphConstruction:
    def test_rejects_out_of_range_edge(self):
        with pytest.raises(ValueError):
            Graph(2, [(0, 2)])

    def test_adjacency_consistent(self):
        g = Graph(3, [(0, 1), (0, 2), (1, 2), (2, 2)])
        assert g.out_edges[0] == (0, 1)
        assert g.in_edges[2] == (1, 2, 3)
        assert g.in_degree(2) == 3 and g.out_degree(2) == 1
