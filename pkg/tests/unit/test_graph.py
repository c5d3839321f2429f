"""
Unit tests for graphs.graph: construction, edge-list I/O, distances and
resolving predicates.
"""
import pytest
import networkx as nx

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..'))

from graphs.graph import (
    Graph,
    all_pairs_distances,
    first_unresolved_pair,
    graph_stats,
    is_connected,
    is_resolving_set,
    parse_edge_list,
    require_connected,
    resolves,
    write_edge_list,
)
from utils.custom_exceptions import (
    ContractViolation,
    GraphParseError,
    GraphValidationError,
    NotConnectedError,
)


class TestGraphConstruction:
    """Test cases for the Graph value type."""

    def setup_method(self):
        """Set up a path and a cycle."""
        self.p5 = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        self.c6 = Graph.from_networkx(nx.cycle_graph(6))

    def test_counts(self):
        """Test vertex, edge and degree counts."""
        assert self.p5.n == 5
        assert self.p5.m == 4
        assert self.p5.max_degree() == 2
        assert self.c6.m == 6

    def test_duplicate_edges_collapse(self):
        """Test that repeated edges in either orientation are stored once."""
        g = Graph.from_edges(3, [(0, 1), (1, 0), (0, 1), (1, 2)])
        assert g.m == 2
        assert g.edges() == [(0, 1), (1, 2)]

    def test_self_loop_rejected(self):
        """Test that a self-loop raises GraphValidationError."""
        with pytest.raises(GraphValidationError):
            Graph.from_edges(2, [(1, 1)])

    def test_out_of_range_edge_rejected(self):
        """Test that an endpoint outside the vertex range is rejected."""
        with pytest.raises(GraphValidationError):
            Graph.from_edges(2, [(0, 2)])

    def test_networkx_round_trip_keeps_edges(self):
        """Test conversion to networkx and back."""
        back = Graph.from_networkx(self.c6.to_networkx())
        assert back == self.c6

    def test_induced_subgraph_relabels(self):
        """Test that an induced subgraph is relabelled in ascending order."""
        sub, original = self.p5.induced_subgraph([4, 2, 3])
        assert original == (2, 3, 4)
        assert sub.edges() == [(0, 1), (1, 2)]

    def test_canonical_set(self):
        """Test sorting, deduplication and range checks of vertex sets."""
        assert self.p5.canonical_set([3, 1, 3]) == (1, 3)
        with pytest.raises(GraphValidationError):
            self.p5.canonical_set([7])


class TestEdgeListFormat:
    """Test cases for parse_edge_list and write_edge_list."""

    def test_parse_basic(self):
        """Test parsing with comments and blank lines."""
        g = parse_edge_list("# path\n0 1\n\n1 2  # tail comment\n")
        assert g.n == 3
        assert g.edges() == [(0, 1), (1, 2)]

    def test_header_declares_isolated_vertices(self):
        """Test that the 'n' header adds trailing isolated vertices."""
        g = parse_edge_list("n 5\n0 1\n")
        assert g.n == 5
        assert g.m == 1

    def test_header_smaller_than_ids(self):
        """Test that a header below the largest id is an error."""
        with pytest.raises(GraphParseError):
            parse_edge_list("n 2\n0 3\n")

    def test_malformed_token(self):
        """Test that a non-integer id reports its line and token."""
        with pytest.raises(GraphParseError) as info:
            parse_edge_list("0 1\n1 x\n")
        assert info.value.details['line'] == 2
        assert info.value.details['token'] == 'x'

    def test_negative_id(self):
        """Test that negative ids are rejected."""
        with pytest.raises(GraphParseError):
            parse_edge_list("-1 2\n")

    def test_self_loop_line(self):
        """Test that a self-loop line is rejected at parse time."""
        with pytest.raises(GraphParseError):
            parse_edge_list("0 1\n2 2\n")

    def test_wrong_token_count(self):
        """Test that lines must have exactly two endpoints."""
        with pytest.raises(GraphParseError):
            parse_edge_list("0 1 2\n")

    def test_labels(self):
        """Test label remapping by first appearance."""
        g = parse_edge_list("a b\nb c\n", allow_labels=True)
        assert g.labels == ('a', 'b', 'c')
        assert g.edges() == [(0, 1), (1, 2)]

    def test_bytes_input(self):
        """Test that bytes are decoded as UTF-8."""
        assert parse_edge_list(b"0 1\n").m == 1

    def test_invalid_utf8(self):
        """Test that undecodable bytes raise GraphParseError."""
        with pytest.raises(GraphParseError) as info:
            parse_edge_list(b"0 1\n1 \xff\n")
        assert info.value.exit_code == 2

    def test_write_sorted(self):
        """Test that edges are written sorted without a header."""
        g = Graph.from_edges(3, [(2, 1), (1, 0)])
        assert write_edge_list(g) == "0 1\n1 2\n"

    def test_write_header_for_isolated_tail(self):
        """Test that trailing isolated vertices force a header."""
        g = Graph.from_edges(4, [(0, 1)])
        assert write_edge_list(g) == "n 4\n0 1\n"
        assert parse_edge_list(write_edge_list(g)) == g


class TestDistancesAndResolving:
    """Test cases for distances and resolving predicates."""

    def setup_method(self):
        """Set up P5, C6, K3 and a disconnected graph."""
        self.p5 = Graph.from_networkx(nx.path_graph(5))
        self.c6 = Graph.from_networkx(nx.cycle_graph(6))
        self.k3 = Graph.from_networkx(nx.complete_graph(3))
        self.split = Graph.from_edges(4, [(0, 1), (2, 3)])

    def test_path_distances(self):
        """Test BFS distances on a path."""
        d = all_pairs_distances(self.p5)
        assert d.dist(0, 4) == 4
        assert d[(1, 3)] == 2
        assert d.diameter_of([0, 2, 3]) == 3

    def test_unreachable_sentinel(self):
        """Test that unreachable pairs hold the sentinel n."""
        d = all_pairs_distances(self.split)
        assert d.dist(0, 2) == d.sentinel == 4
        assert not d.is_connected()

    def test_distance_matrix_read_only(self):
        """Test that the distance array cannot be written."""
        d = all_pairs_distances(self.p5)
        with pytest.raises(ValueError):
            d.array[0, 1] = 7

    def test_resolves(self):
        """Test the single-vertex resolving predicate."""
        d = all_pairs_distances(self.p5)
        assert resolves(d, 0, 1, 2)
        assert not resolves(d, 2, 1, 3)
        with pytest.raises(ContractViolation):
            resolves(d, 0, 3, 3)

    def test_resolving_sets(self):
        """Test resolving sets on P5, C6 and K3."""
        assert is_resolving_set(self.p5, all_pairs_distances(self.p5), [0])
        assert not is_resolving_set(self.c6, all_pairs_distances(self.c6), [0])
        assert is_resolving_set(self.c6, all_pairs_distances(self.c6), [0, 1])
        assert is_resolving_set(self.k3, all_pairs_distances(self.k3), [0, 1])
        assert not is_resolving_set(self.k3, all_pairs_distances(self.k3), [0])

    def test_empty_set_does_not_resolve(self):
        """Test that the empty set resolves no graph with two or more vertices."""
        assert not is_resolving_set(self.p5, all_pairs_distances(self.p5), [])

    def test_single_vertex_graph(self):
        """Test that K1 is resolved by any set."""
        k1 = Graph.from_edges(1, [])
        assert is_resolving_set(k1, all_pairs_distances(k1), [0])

    def test_disconnected_rejected(self):
        """Test that resolving checks need a connected graph."""
        with pytest.raises(NotConnectedError):
            is_resolving_set(self.split, all_pairs_distances(self.split), [0])
        with pytest.raises(NotConnectedError):
            require_connected(self.split, "test")
        assert not is_connected(self.split)

    def test_first_unresolved_pair(self):
        """Test that the reported pair has the smallest second vertex."""
        d = all_pairs_distances(self.c6)
        assert first_unresolved_pair(d, [0]) == (2, 4)
        assert first_unresolved_pair(d, [0, 1]) is None

    def test_graph_stats_petersen(self):
        """Test degree, diameter and connectivity of the Petersen graph."""
        stats = graph_stats(Graph.from_networkx(nx.petersen_graph()))
        assert stats.to_dict() == {'n': 10, 'm': 15, 'max_degree': 3, 'diameter': 2, 'connected': True}

    def test_graph_stats_disconnected(self):
        """Test that a disconnected graph reports the sentinel diameter."""
        stats = graph_stats(self.split)
        assert not stats.connected
        assert stats.diameter == 4
