"""
Unit tests for solvers.mw_solver: module entries, the root step and
md_modular against the exhaustive oracle.
"""
import time
from itertools import combinations

import pytest

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..'))

from decomp.modular import ModuleKind, modular_decompose
from graphs.generators import gen, random_cotree
from graphs.graph import Graph, is_connected
from solvers.mw_solver import (
    MwEntry,
    compute_entries,
    md_from_tree,
    md_modular,
    modules_resolved_by,
    mw_table,
    verify_module_distance_identity,
)
from solvers.oracle import (
    augmented_table_bruteforce,
    degree_bound_holds,
    metric_dimension_bruteforce,
    neighbour_bound_holds,
    verify_witness,
)
from utils.config_loader import config_loader
from utils.custom_exceptions import ContractViolation, DecompositionError, NotConnectedError
from utils.logger import test_logger


def _assert_matches_oracle(g):
    result = md_modular(g)
    assert result.md == metric_dimension_bruteforce(g).md, g.edges()
    assert verify_witness(g, result.md, result.witness), (g.edges(), result.witness)
    assert neighbour_bound_holds(g.max_degree(), result.md), g.edges()
    if not degree_bound_holds(g.max_degree(), result.md):
        test_logger.info(f"max degree {g.max_degree()} above 2^md + md - 1 for md={result.md}: {g.edges()}")
    return result


class TestModuleEntries:
    """Test cases for mw_table and compute_entries."""

    def test_union_of_two_vertices(self):
        """Test the entry of two isolated vertices."""
        entries = compute_entries(modular_decompose(Graph.from_edges(2, [])))
        assert entries[frozenset({0, 1})].to_dict() == {'FF': 2, 'FT': 1, 'TF': None, 'TT': None}

    def test_join_of_two_vertices(self):
        """Test the entry of a single edge."""
        entries = compute_entries(modular_decompose(Graph.from_edges(2, [(0, 1)])))
        assert entries[frozenset({0, 1})].to_dict() == {'FF': 2, 'FT': None, 'TF': 1, 'TT': None}

    def test_three_isolated_vertices(self):
        """Test a three-way union against the module-table oracle."""
        g = Graph.from_edges(3, [])
        entries = compute_entries(modular_decompose(g))
        assert entries[frozenset({0, 1, 2})].values == augmented_table_bruteforce(g)

    def test_entries_match_oracle(self):
        """Test every proper module of random graphs against the module-table oracle."""
        corpus = config_loader.get_corpus_profile()
        checked = 0
        for index in range(corpus['random_mw_per_n'] // 3):
            g = gen("random_bounded_degree", 7, seed=corpus['seed'] + index, max_degree=6)
            tree = modular_decompose(g)
            for vertices, entry in compute_entries(tree, include_root=False).items():
                sub, _ = g.induced_subgraph(vertices)
                assert entry.values == augmented_table_bruteforce(sub), sorted(vertices)
                checked += 1
        for seed in range(10):
            tree = random_cotree(7, seed=seed)
            g = gen("random_cograph", 7, seed=seed)
            for vertices, entry in compute_entries(tree).items():
                sub, _ = g.induced_subgraph(vertices)
                assert entry.values == augmented_table_bruteforce(sub), sorted(vertices)
                checked += 1
        assert checked > 0

    def test_witness_realises_value(self):
        """Test that every finite state expands to a set of that size."""
        tree = modular_decompose(gen("path", 4))
        entry = compute_entries(tree)[frozenset(range(4))]
        for state, value in entry.values.items():
            if value is not None:
                assert len(entry.witness(state)) == value

    def test_witness_of_infinite_state(self):
        """Test that an unrealisable state has no witness."""
        entry = MwEntry(size=2)
        with pytest.raises(ContractViolation):
            entry.witness((True, True))

    def test_leaf_has_no_entry(self):
        """Test that a singleton module is rejected."""
        tree = modular_decompose(gen("path", 2))
        with pytest.raises(ContractViolation):
            mw_table(tree.root.children[0], [])

    def test_missing_child_entry(self):
        """Test that a non-singleton child needs its entry."""
        tree = modular_decompose(gen("star", 4))
        with pytest.raises(ContractViolation):
            mw_table(tree.root, [None, None])

    def test_entry_count_mismatch(self):
        """Test that the entry list must line up with the children."""
        tree = modular_decompose(gen("complete", 3))
        with pytest.raises(ContractViolation):
            mw_table(tree.root, [None])


class TestMdModular:
    """Test cases for md_modular and md_from_tree."""

    @pytest.mark.parametrize("family,n,expected_md", [
        ("complete", 4, 3), ("star", 4, 2), ("path", 4, 1), ("cycle", 4, 2), ("cycle", 5, 2),
        ("petersen", 10, 3), ("path", 2, 1),
    ])
    def test_known_values(self, family, n, expected_md):
        """Test families with known metric dimension."""
        assert _assert_matches_oracle(gen(family, n)).md == expected_md

    def test_single_vertex(self):
        """Test md(K1) = 1."""
        result = md_modular(Graph.from_edges(1, []))
        assert (result.md, result.witness) == (1, (0,))

    def test_width_reported(self):
        """Test that the width of the tree used is reported."""
        assert md_modular(gen("path", 4)).width_used == 4
        assert md_modular(gen("complete", 5)).width_used == 0

    def test_all_small_graphs(self):
        """Test every connected graph on up to the configured number of vertices."""
        corpus = config_loader.get_corpus_profile()
        for n in range(2, corpus['exhaustive_mw_max_n'] + 1):
            pairs = list(combinations(range(n), 2))
            for mask in range(1 << len(pairs)):
                g = Graph.from_edges(n, [pairs[b] for b in range(len(pairs)) if mask >> b & 1])
                if is_connected(g):
                    _assert_matches_oracle(g)

    def test_random_graphs(self):
        """Test a few random connected graphs on six vertices."""
        corpus = config_loader.get_corpus_profile()
        for index in range(10):
            _assert_matches_oracle(gen("random_bounded_degree", 6, seed=corpus['seed'] + index, max_degree=5))

    @pytest.mark.slow
    def test_random_graph_sweep(self):
        """Test the configured random corpus."""
        corpus = config_loader.get_corpus_profile()
        for n in corpus['random_mw_sizes']:
            for index in range(corpus['random_mw_per_n']):
                _assert_matches_oracle(gen("random_bounded_degree", n, seed=corpus['seed'] + index,
                                           max_degree=n - 1))

    def test_cographs(self):
        """Test random cographs against the oracle."""
        corpus = config_loader.get_corpus_profile()
        for index in range(corpus['cograph_count']):
            n = 2 + index % (corpus['cograph_max_n'] - 1)
            _assert_matches_oracle(gen("random_cograph", n, seed=corpus['seed'] + index))

    def test_tree_only_input(self):
        """Test that md_from_tree on a cotree agrees with md_modular on its graph."""
        for seed in range(10):
            tree = random_cotree(8, seed=seed)
            g = gen("random_cograph", 8, seed=seed)
            result = md_from_tree(tree)
            assert result.md == md_modular(g).md
            assert verify_witness(g, result.md, result.witness)

    def test_disconnected(self):
        """Test that disconnected graphs and union roots are rejected."""
        g = Graph.from_edges(4, [(0, 1), (2, 3)])
        with pytest.raises(NotConnectedError):
            md_modular(g)
        with pytest.raises(NotConnectedError):
            md_from_tree(modular_decompose(g))

    def test_tree_of_another_graph(self):
        """Test that a tree over different vertices is rejected."""
        with pytest.raises(DecompositionError):
            md_modular(gen("path", 4), modular_decompose(gen("path", 5)))

    @pytest.mark.slow
    def test_cotree_scaling(self):
        """Test that doubling a cotree at most quadruples the running time."""
        small, large = random_cotree(2000, seed=5), random_cotree(4000, seed=5)
        started = time.perf_counter()
        md_from_tree(small)
        small_seconds = time.perf_counter() - started
        started = time.perf_counter()
        md_from_tree(large)
        large_seconds = time.perf_counter() - started
        assert large_seconds <= 4 * max(small_seconds, 0.05)


class TestModuleChecks:
    """Test cases for the module distance identity and per-module resolution."""

    @pytest.mark.parametrize("family,n", [("cycle", 4), ("path", 4), ("petersen", 10), ("star", 5)])
    def test_distance_identity(self, family, n):
        """Test that child modules sit at their quotient distances."""
        g = gen(family, n)
        assert verify_module_distance_identity(g, modular_decompose(g)) == []

    def test_distance_identity_corpus(self):
        """Test the identity over random cographs and random graphs."""
        corpus = config_loader.get_corpus_profile()
        for index in range(20):
            for g in (gen("random_cograph", 9, seed=corpus['seed'] + index),
                      gen("random_bounded_degree", 8, seed=corpus['seed'] + index, max_degree=5)):
                assert verify_module_distance_identity(g, modular_decompose(g)) == []

    def test_distance_identity_violation(self):
        """Test that a tree of another graph is reported."""
        tree = modular_decompose(gen("complete", 3))
        violations = verify_module_distance_identity(gen("path", 3), tree)
        assert violations
        assert {'module', 'pair', 'graph_distance', 'quotient_distance'} <= set(violations[0])

    def test_witness_resolves_every_module(self):
        """Test that a witness restricted to each proper module resolves it."""
        corpus = config_loader.get_corpus_profile()
        for index in range(20):
            g = gen("random_cograph", 9, seed=corpus['seed'] + index)
            tree = modular_decompose(g)
            assert modules_resolved_by(g, tree, md_modular(g, tree).witness) == []

    def test_unresolved_module_reported(self):
        """Test that an empty witness fails every proper module of size two or more."""
        g = gen("star", 4)
        tree = modular_decompose(g)
        assert modules_resolved_by(g, tree, ()) == [frozenset({1, 2, 3})]
        assert tree.root.kind == ModuleKind.JOIN
