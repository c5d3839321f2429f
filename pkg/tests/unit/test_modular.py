"""
Unit tests for decomp.modular.
"""
import pytest

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..'))

from decomp.modular import ModuleKind, is_module, modular_decompose, render_modular_tree
from graphs.generators import gen
from graphs.graph import Graph
from utils.config_loader import config_loader
from utils.custom_exceptions import DecompositionError


def _leaf_vertices(node):
    return sorted(child.vertex for child in node.children)


class TestModularDecomposition:
    """Test cases for modular_decompose."""

    def test_complete_graph_is_one_join(self):
        """Test that K4 is a join of four singletons."""
        tree = modular_decompose(gen("complete", 4))
        assert tree.root.kind == ModuleKind.JOIN
        assert _leaf_vertices(tree.root) == [0, 1, 2, 3]
        assert tree.width == 0

    def test_star(self):
        """Test that K1,3 is a join of the centre with an edgeless union."""
        tree = modular_decompose(gen("star", 4))
        assert tree.root.kind == ModuleKind.JOIN
        centre, rest = tree.root.children
        assert centre.is_leaf and centre.vertex == 0
        assert rest.kind == ModuleKind.UNION
        assert rest.vertices == frozenset({1, 2, 3})

    def test_path_four_is_prime(self):
        """Test that P4 is prime with four trivial children and width 4."""
        tree = modular_decompose(gen("path", 4))
        assert tree.root.kind == ModuleKind.PRIME
        assert all(child.is_leaf for child in tree.root.children)
        assert tree.width == 4
        assert tree.root.quotient.edges() == [(0, 1), (1, 2), (2, 3)]

    def test_cycle_four(self):
        """Test that C4 is a join of two non-adjacent pairs."""
        tree = modular_decompose(gen("cycle", 4))
        assert tree.root.kind == ModuleKind.JOIN
        assert [child.vertices for child in tree.root.children] == [frozenset({0, 2}), frozenset({1, 3})]
        assert all(child.kind == ModuleKind.UNION for child in tree.root.children)

    def test_disconnected_root_is_union(self):
        """Test that a disconnected graph has a union root."""
        tree = modular_decompose(Graph.from_edges(4, [(0, 1), (2, 3)]))
        assert tree.root.kind == ModuleKind.UNION
        assert len(tree.root.children) == 2

    def test_prime_with_module(self):
        """Test a P4 whose end vertex is blown up into a non-adjacent pair."""
        # 0 - 1 - 2 - {3, 4}
        g = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (2, 4)])
        tree = modular_decompose(g)
        assert tree.root.kind == ModuleKind.PRIME
        assert tree.width == 4
        modules = sorted(tuple(sorted(child.vertices)) for child in tree.root.children)
        assert modules == [(0,), (1,), (2,), (3, 4)]

    def test_children_are_modules(self):
        """Test the module property and quotient adjacency on the Petersen graph and a corpus."""
        corpus = config_loader.get_corpus_profile()
        graphs = [gen("petersen", 10)]
        graphs += [gen("random_bounded_degree", 7, seed=corpus['seed'] + i) for i in range(10)]
        for g in graphs:
            tree = modular_decompose(g)
            for node in tree.internal_nodes():
                quotient = node.quotient_graph()
                reps = [min(child.vertices) for child in node.children]
                for child in node.children:
                    assert is_module(g, child.vertices)
                for i in range(len(reps)):
                    for j in range(i + 1, len(reps)):
                        assert quotient.has_edge(i, j) == g.has_edge(reps[i], reps[j])

    def test_cographs_have_width_zero(self):
        """Test that random cographs decompose without prime nodes."""
        for seed in range(15):
            assert modular_decompose(gen("random_cograph", 9, seed=seed)).width == 0

    def test_postorder_children_first(self):
        """Test that postorder lists children before parents."""
        tree = modular_decompose(gen("petersen", 10))
        position = {id(node): i for i, node in enumerate(tree.postorder())}
        for node in tree.internal_nodes():
            assert all(position[id(c)] < position[id(node)] for c in node.children)

    def test_empty_graph_rejected(self):
        """Test that the empty graph cannot be decomposed."""
        with pytest.raises(DecompositionError):
            modular_decompose(Graph.from_edges(0, []))

    def test_leaf_has_no_quotient(self):
        """Test that asking a leaf for its quotient raises."""
        tree = modular_decompose(gen("path", 2))
        with pytest.raises(DecompositionError):
            tree.root.children[0].quotient_graph()


class TestModuleHelpers:
    """Test cases for is_module and render_modular_tree."""

    def test_is_module(self):
        """Test modules of P4 and a star."""
        p4 = gen("path", 4)
        assert is_module(p4, [0, 1, 2, 3])
        assert is_module(p4, [2])
        assert not is_module(p4, [1, 2])
        assert is_module(gen("star", 4), [1, 2, 3])

    def test_render(self):
        """Test the textual tree of K1,2."""
        text = render_modular_tree(modular_decompose(gen("star", 3)))
        assert text == "width 0\njoin [0, 1, 2]\n  leaf 0\n  union [1, 2]\n    leaf 1\n    leaf 2\n"

    def test_render_prime(self):
        """Test that prime nodes list their quotient edges."""
        text = render_modular_tree(modular_decompose(gen("path", 4)))
        assert text.splitlines()[1] == "prime [0, 1, 2, 3] quotient_edges=[(0, 1), (1, 2), (2, 3)]"
