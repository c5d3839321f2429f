"""
Clique trees of chordal graphs via maximum cardinality search.
"""
from itertools import combinations
from typing import List, Optional, Tuple

import networkx as nx

from decomp.tree_decomposition import TreeDecomposition
from graphs.graph import Graph, require_connected
from utils.custom_exceptions import NotChordalError
from utils.logger import decomp_logger


def maximum_cardinality_search(g: Graph) -> List[int]:
    """
    Perfect elimination ordering candidate: the reverse of the MCS visit order.

    MCS visits the unvisited vertex with most visited neighbours, ties to the
    smallest id.
    """
    weight = [0] * g.vertex_count
    visited = [False] * g.vertex_count
    visit_order = []
    for _ in range(g.vertex_count):
        z = max((v for v in g.vertices() if not visited[v]), key=lambda v: (weight[v], -v))
        visited[z] = True
        visit_order.append(z)
        for y in g.neighbors(z):
            if not visited[y]:
                weight[y] += 1
    return visit_order[::-1]


def later_neighbors(g: Graph, ordering: List[int]) -> List[Tuple[int, ...]]:
    position = {v: i for i, v in enumerate(ordering)}
    return [tuple(sorted(u for u in g.neighbors(v) if position[u] > position[v])) for v in ordering]


def perfect_elimination_check(g: Graph, ordering: List[int]) -> Optional[int]:
    """First vertex whose later neighbours are not a clique, or None for a perfect ordering."""
    for v, later in zip(ordering, later_neighbors(g, ordering)):
        if any(not g.has_edge(a, b) for a, b in combinations(later, 2)):
            return v
    return None


def chordless_cycle(g: Graph) -> Optional[List[int]]:
    """
    A chordless cycle of length >= 4, or None if g is chordal.

    For a vertex v with non-adjacent neighbours a, b, a shortest a-b path
    avoiding the rest of N[v] closes such a cycle through v.
    """
    nx_graph = g.to_networkx()
    for v in g.vertices():
        closed = set(g.neighbors(v)) | {v}
        for a, b in combinations(g.neighbors(v), 2):
            if g.has_edge(a, b):
                continue
            allowed = [x for x in g.vertices() if x not in closed or x in (a, b)]
            try:
                path = nx.shortest_path(nx_graph.subgraph(allowed), a, b)
            except nx.NetworkXNoPath:
                continue
            return [v] + path
    return None


def clique_tree(g: Graph) -> TreeDecomposition:
    """
    Tree decomposition whose bags are the maximal cliques of a chordal graph.

    Raises NotChordalError carrying a chordless cycle when g is not chordal.
    """
    require_connected(g, "clique_tree")
    ordering = maximum_cardinality_search(g)
    bad = perfect_elimination_check(g, ordering)
    if bad is not None:
        cycle = chordless_cycle(g) or []
        raise NotChordalError(f"Graph is not chordal (ordering fails at vertex {bad})", cycle=cycle)

    candidates = {frozenset((v,) + later) for v, later in zip(ordering, later_neighbors(g, ordering))}
    cliques = sorted((c for c in candidates if not any(c < other for other in candidates)),
                     key=lambda c: tuple(sorted(c)))

    clique_graph = nx.Graph()
    clique_graph.add_nodes_from(range(len(cliques)))
    for i, j in combinations(range(len(cliques)), 2):
        shared = len(cliques[i] & cliques[j])
        if shared:
            clique_graph.add_edge(i, j, weight=shared)
    tree = nx.maximum_spanning_tree(clique_graph, weight='weight', algorithm='kruskal')

    td = TreeDecomposition.build(g.vertex_count, cliques, tree.edges())
    decomp_logger.debug(f"Clique tree: {len(cliques)} maximal cliques")
    return td
