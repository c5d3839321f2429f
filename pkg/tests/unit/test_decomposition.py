"""
Unit tests for the decomp package: tree decompositions, the .td format,
nice decompositions, clique trees and the min-fill-in heuristic.
"""
import pytest

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..'))

from decomp.chordal import (
    chordless_cycle,
    clique_tree,
    maximum_cardinality_search,
    perfect_elimination_check,
)
from decomp.heuristic import heuristic_td
from decomp.nice import NiceNode, NiceTreeDecomposition, NodeKind, make_nice
from decomp.td_format import parse_td, write_td
from decomp.tree_decomposition import TreeDecomposition, bag_length, validate_td
from graphs.generators import gen
from graphs.graph import Graph, all_pairs_distances
from utils.config_loader import config_loader
from utils.custom_exceptions import DecompositionError, NotChordalError, TdParseError

P4_TD_TEXT = "c path on four vertices\ns td 3 2 4\nb 1 1 2\nb 2 2 3\nb 3 3 4\n1 2\n2 3\n"


class TestTreeDecomposition:
    """Test cases for TreeDecomposition and validate_td."""

    def setup_method(self):
        """Set up P4 and its path decomposition."""
        self.p4 = gen("path", 4)
        self.td = TreeDecomposition.build(4, [{0, 1}, {1, 2}, {2, 3}], [(1, 0), (1, 2)])

    def test_build_normalises_edges(self):
        """Test that edges are stored as sorted (i, j) with i < j."""
        assert self.td.edges == ((0, 1), (1, 2))
        assert self.td.neighbors() == {0: [1], 1: [0, 2], 2: [1]}

    def test_valid(self):
        """Test width and length of a valid decomposition."""
        report = validate_td(self.p4, self.td)
        assert report.valid
        assert (report.width, report.length) == (1, 1)
        assert report.problems == []

    def test_missing_edge(self):
        """Test that an uncovered edge is reported."""
        td = TreeDecomposition.build(4, [{0, 1}, {2, 3}], [(0, 1)])
        report = validate_td(self.p4, td)
        assert not report.valid
        assert any("edge (1, 2)" in p for p in report.problems)

    def test_disconnected_occurrences(self):
        """Test that a vertex in non-adjacent bags is reported."""
        td = TreeDecomposition.build(4, [{0, 1}, {2, 3}, {1, 2}], [(0, 1), (1, 2)])
        report = validate_td(self.p4, td)
        assert not report.valid
        assert any("vertex 1" in p for p in report.problems)

    def test_not_a_tree(self):
        """Test that a cyclic bag graph is reported."""
        td = TreeDecomposition.build(4, [{0, 1}, {1, 2}, {2, 3}], [(0, 1), (1, 2), (0, 2)])
        assert "bag graph is not a tree" in validate_td(self.p4, td).problems

    def test_vertex_out_of_range(self):
        """Test that a bag naming a missing vertex raises."""
        td = TreeDecomposition.build(4, [{0, 1, 9}], [])
        with pytest.raises(DecompositionError):
            validate_td(self.p4, td)

    def test_bag_length(self):
        """Test bag diameters measured in the graph."""
        d = all_pairs_distances(self.p4)
        assert bag_length(d, [{0, 3}, {1}]) == 3


class TestTdFormat:
    """Test cases for parse_td and write_td."""

    def test_parse(self):
        """Test that ids become 0-based and comments are skipped."""
        td = parse_td(P4_TD_TEXT)
        assert td.vertex_count == 4
        assert td.bags == (frozenset({0, 1}), frozenset({1, 2}), frozenset({2, 3}))
        assert td.edges == ((0, 1), (1, 2))

    def test_write(self):
        """Test the canonical serialisation."""
        assert write_td(parse_td(P4_TD_TEXT)) == P4_TD_TEXT.split("\n", 1)[1]

    @pytest.mark.parametrize("text", [
        "b 1 1 2\n",
        "s td 1 2 2\ns td 1 2 2\n",
        "s td 1 2 2\nb 2 1 2\n",
        "s td 1 2 2\nb 1 1 3\n",
        "s td 1 1 2\nb 1 1 2\n",
        "s td 2 2 2\nb 1 1 2\n",
        "s td 1 2 2\nb 1 1 x\n",
        "s td 2 2 2\nb 1 1\nb 2 2\n1 3\n",
        "s td 1 2\n",
    ])
    def test_malformed(self, text):
        """Test that malformed files raise TdParseError."""
        with pytest.raises(TdParseError):
            parse_td(text)

    def test_invalid_utf8(self):
        """Test that undecodable bytes raise TdParseError."""
        with pytest.raises(TdParseError):
            parse_td(b"s td 1 2 2\nb 1 1 \xff\n")


class TestNiceDecomposition:
    """Test cases for make_nice and NiceTreeDecomposition."""

    def setup_method(self):
        """Set up C6 with its min-fill-in decomposition."""
        self.c6 = gen("cycle", 6)
        self.td = heuristic_td(self.c6)

    def _assert_nice(self, g, nice, root_vertex):
        assert nice.root_vertex == root_vertex
        assert nice.bag(nice.root) == frozenset({root_vertex})
        assert nice.subtree_vertices[nice.root] == frozenset(g.vertices())
        assert validate_td(g, nice.to_tree_decomposition()).valid
        for node in nice.nodes:
            assert len(node.children) == {NodeKind.LEAF: 0, NodeKind.INTRODUCE: 1,
                                          NodeKind.FORGET: 1, NodeKind.JOIN: 2}[node.kind]

    def test_every_root(self):
        """Test that every root vertex yields a valid nice decomposition."""
        for u in self.c6.vertices():
            self._assert_nice(self.c6, make_nice(self.c6, self.td, u), u)

    def test_width_and_length_kept(self):
        """Test that width and length do not grow."""
        d = all_pairs_distances(self.c6)
        nice = make_nice(self.c6, self.td, 0, d)
        assert nice.width() == self.td.width()
        assert bag_length(d, (n.bag for n in nice.nodes)) == validate_td(self.c6, self.td, d).length

    def test_depth_and_parent(self):
        """Test depth and parent queries against each other."""
        nice = make_nice(self.c6, self.td, 2)
        assert nice.depth[nice.root] == 0
        assert nice.parent[nice.root] is None
        for i in nice.postorder():
            if i != nice.root:
                assert nice.depth[i] == nice.depth[nice.parent[i]] + 1
                assert i < nice.parent[i]

    def test_offset_queries(self):
        """Test nodes_at_offset against subtree_nodes."""
        nice = make_nice(self.c6, self.td, 0)
        for offset in range(4):
            expected = [j for j in nice.subtree_nodes(nice.root) if nice.depth[j] == offset]
            assert nice.nodes_at_offset(nice.root, offset) == expected
        assert nice.nodes_at_offset(nice.root, -1) == []
        assert nice.subtree_nodes(nice.root, 0) == [nice.root]

    def test_chordal_corpus(self):
        """Test make_nice over clique trees of random chordal graphs."""
        corpus = config_loader.get_corpus_profile()
        for index in range(corpus['chordal_count'] // 4):
            g = gen("random_chordal", 4 + index % 6, seed=corpus['seed'] + index)
            td = clique_tree(g)
            for u in (0, g.vertex_count - 1):
                self._assert_nice(g, make_nice(g, td, u), u)

    def test_single_vertex(self):
        """Test the one-node decomposition of K1."""
        k1 = Graph.from_edges(1, [])
        nice = make_nice(k1, TreeDecomposition.build(1, [{0}], []), 0)
        assert len(nice) == 1
        assert nice.node(0).kind == NodeKind.LEAF

    def test_invalid_input_rejected(self):
        """Test that an invalid decomposition cannot be made nice."""
        bad = TreeDecomposition.build(6, [{0, 1, 2}], [])
        with pytest.raises(DecompositionError):
            make_nice(self.c6, bad, 0)

    def test_root_bag_must_be_singleton(self):
        """Test the structural check on a hand-built node list."""
        nodes = [NiceNode(0, NodeKind.LEAF, frozenset({0}), vertex=0),
                 NiceNode(1, NodeKind.INTRODUCE, frozenset({0, 1}), (0,), 1)]
        with pytest.raises(DecompositionError):
            NiceTreeDecomposition(2, nodes)

    def test_bad_introduce_rejected(self):
        """Test that an introduce node must add exactly its vertex."""
        nodes = [NiceNode(0, NodeKind.LEAF, frozenset({0}), vertex=0),
                 NiceNode(1, NodeKind.INTRODUCE, frozenset({1}), (0,), 1)]
        with pytest.raises(DecompositionError):
            NiceTreeDecomposition(2, nodes)

    def test_join_child_without_forget_rejected(self):
        """Test that each join child must have a forget node below it."""
        nodes = [NiceNode(0, NodeKind.LEAF, frozenset({0}), vertex=0),
                 NiceNode(1, NodeKind.LEAF, frozenset({0}), vertex=0),
                 NiceNode(2, NodeKind.JOIN, frozenset({0}), (0, 1))]
        with pytest.raises(DecompositionError) as info:
            NiceTreeDecomposition(1, nodes)
        assert "forget" in str(info.value)

    def test_join_children_hold_forget_nodes(self):
        """Test that a join built from the middle bag of P4 keeps a forget node on both sides."""
        g = gen("path", 4)
        td = TreeDecomposition.build(4, [{0, 1}, {1, 2}, {2, 3}], [(0, 1), (1, 2)])
        nice = make_nice(g, td, 2)
        joins = [node for node in nice.nodes if node.kind == NodeKind.JOIN]
        assert joins
        for node in joins:
            assert all(nice.has_forget_below[c] for c in node.children)


class TestChordal:
    """Test cases for clique trees and elimination orderings."""

    def test_complete_graph_single_bag(self):
        """Test that K4 gives one bag."""
        td = clique_tree(gen("complete", 4))
        assert td.bags == (frozenset({0, 1, 2, 3}),)
        assert td.edges == ()

    def test_tree_bags_are_edges(self):
        """Test that a tree's maximal cliques are its edges."""
        g = gen("path", 5)
        td = clique_tree(g)
        assert sorted(tuple(sorted(b)) for b in td.bags) == [(0, 1), (1, 2), (2, 3), (3, 4)]
        assert validate_td(g, td).valid

    def test_not_chordal(self):
        """Test that C4 raises with a chordless cycle certificate."""
        with pytest.raises(NotChordalError) as info:
            clique_tree(gen("cycle", 4))
        assert len(info.value.cycle) == 4

    def test_perfect_elimination(self):
        """Test MCS orderings on chordal and non-chordal graphs."""
        chordal = gen("random_chordal", 9, seed=3)
        assert perfect_elimination_check(chordal, maximum_cardinality_search(chordal)) is None
        assert chordless_cycle(chordal) is None
        c5 = gen("cycle", 5)
        assert perfect_elimination_check(c5, maximum_cardinality_search(c5)) is not None
        assert sorted(chordless_cycle(c5)) == [0, 1, 2, 3, 4]

    def test_clique_tree_valid_on_corpus(self):
        """Test validity and unit length of clique trees on random chordal graphs."""
        corpus = config_loader.get_corpus_profile()
        for index in range(corpus['chordal_count']):
            g = gen("random_chordal", 3 + index % (corpus['chordal_max_n'] - 2), seed=corpus['seed'] + index)
            report = validate_td(g, clique_tree(g))
            assert report.valid
            assert report.length <= 1


class TestHeuristic:
    """Test cases for heuristic_td."""

    @pytest.mark.parametrize("family,n", [("cycle", 6), ("petersen", 10), ("path", 1), ("complete", 5)])
    def test_valid(self, family, n):
        """Test that min-fill-in decompositions are valid."""
        g = gen(family, n)
        assert validate_td(g, heuristic_td(g)).valid

    def test_cycle_width(self):
        """Test that a cycle gets width 2."""
        assert heuristic_td(gen("cycle", 6)).width() == 2

    def test_no_subset_bags(self):
        """Test that no bag is contained in a neighbouring bag."""
        td = heuristic_td(gen("petersen", 10))
        for a, b in td.edges:
            assert not td.bags[a] <= td.bags[b]
            assert not td.bags[b] <= td.bags[a]
