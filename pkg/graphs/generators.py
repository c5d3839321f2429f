"""
Seedable constructors for the graph families used by the suites and the CLI.

Every random family draws from one numpy Generator seeded by (seed, n), so
the same arguments give the same edge set.
"""
from enum import Enum
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from decomp.modular import ModularNode, ModularTree, ModuleKind
from graphs.graph import Edge, Graph, is_connected
from utils.config_loader import config_loader
from utils.custom_exceptions import GenerationError
from utils.logger import graph_logger


class GraphFamily(str, Enum):
    PATH = "path"
    CYCLE = "cycle"
    COMPLETE = "complete"
    STAR = "star"
    RANDOM_TREE = "random_tree"
    RANDOM_COGRAPH = "random_cograph"
    RANDOM_CHORDAL = "random_chordal"
    RANDOM_BOUNDED_DEGREE = "random_bounded_degree"
    PETERSEN = "petersen"


MIN_N = {
    GraphFamily.CYCLE: 3,
    GraphFamily.STAR: 2,
}


def _rng(seed: int, n: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, n]))


def _random_tree(n: int, rng: np.random.Generator) -> List[Edge]:
    return [(int(rng.integers(0, v)), v) for v in range(1, n)]


def _cotree_plan(n: int, rng: np.random.Generator) -> List[Tuple[ModuleKind, int, int, List[int]]]:
    """
    Random cotree over the id range [0, n): each entry is (kind, start, stop,
    cut points), listed parents first. Child kinds alternate, the root is a join.
    """
    plan = []
    stack = [(ModuleKind.JOIN, 0, n)]
    while stack:
        kind, start, stop = stack.pop()
        size = stop - start
        if size == 1:
            plan.append((ModuleKind.LEAF, start, stop, []))
            continue
        parts = int(rng.integers(2, min(size, 4) + 1))
        cuts = sorted(int(c) for c in rng.choice(np.arange(start + 1, stop), size=parts - 1, replace=False))
        plan.append((kind, start, stop, cuts))
        child_kind = ModuleKind.UNION if kind == ModuleKind.JOIN else ModuleKind.JOIN
        bounds = [start] + cuts + [stop]
        stack.extend((child_kind, a, b) for a, b in zip(bounds, bounds[1:]))
    return plan


def random_cotree(n: int, seed: Optional[int] = None) -> ModularTree:
    """Modular tree of a random connected cograph, built without its edge set."""
    if n < 1:
        raise GenerationError("random_cotree needs n >= 1", family="random_cograph", n=n, seed=seed)
    seed = config_loader.get_generator_config().default_seed if seed is None else seed
    plan = _cotree_plan(n, _rng(seed, n))
    built: Dict[Tuple[int, int], ModularNode] = {}
    for kind, start, stop, cuts in reversed(plan):
        if kind == ModuleKind.LEAF:
            built[(start, stop)] = ModularNode(ModuleKind.LEAF, frozenset((start,)), vertex=start)
            continue
        bounds = [start] + cuts + [stop]
        children = tuple(built[(a, b)] for a, b in zip(bounds, bounds[1:]))
        built[(start, stop)] = ModularNode(kind, frozenset(range(start, stop)), children)
    return ModularTree(root=built[(0, n)], width=0)


def _cograph_edges(tree: ModularTree) -> List[Edge]:
    edges: List[Edge] = []
    for node in tree.internal_nodes():
        if node.kind != ModuleKind.JOIN:
            continue
        for a, b in combinations(node.children, 2):
            edges.extend((min(x, y), max(x, y)) for x in a.vertices for y in b.vertices)
    return edges


def _random_chordal(n: int, rng: np.random.Generator) -> List[Edge]:
    """Each new vertex attaches to a random clique, so insertion order reversed is a perfect elimination order."""
    adjacency: List[set] = [set() for _ in range(n)]
    for v in range(1, n):
        anchor = int(rng.integers(0, v))
        clique = [anchor]
        for w in rng.permutation(sorted(adjacency[anchor])):
            w = int(w)
            if rng.random() < 0.5 and all(w in adjacency[c] for c in clique):
                clique.append(w)
        for c in clique:
            adjacency[v].add(c)
            adjacency[c].add(v)
    relabel = [int(x) for x in rng.permutation(n)]
    return [(relabel[u], relabel[v]) for u in range(n) for v in adjacency[u] if u < v]


def _random_bounded_degree(n: int, rng: np.random.Generator, max_degree: int, attempts: int,
                           seed: int) -> List[Edge]:
    pairs = list(combinations(range(n), 2))
    for attempt in range(1, attempts + 1):
        target = int(rng.integers(n - 1, max(n - 1, max_degree * n // 2) + 1))
        degree = [0] * n
        edges: List[Edge] = []
        for index in rng.permutation(len(pairs)):
            u, v = pairs[int(index)]
            if degree[u] >= max_degree or degree[v] >= max_degree:
                continue
            edges.append((u, v))
            degree[u] += 1
            degree[v] += 1
            if len(edges) == target:
                break
        if is_connected(Graph.from_edges(n, edges)):
            graph_logger.debug(f"random_bounded_degree: connected after {attempt} attempt(s)")
            return edges
    raise GenerationError(f"No connected graph with max degree {max_degree} after {attempts} attempts",
                          family=GraphFamily.RANDOM_BOUNDED_DEGREE.value, n=n, seed=seed)


def gen(family: str, n: int, seed: Optional[int] = None, max_degree: Optional[int] = None) -> Graph:
    """
    Build a graph of the named family on n vertices.

    ``seed`` defaults to the configured fixed seed; ``max_degree`` only
    affects random_bounded_degree.
    """
    try:
        family = GraphFamily(family)
    except ValueError:
        raise GenerationError(f"Unknown graph family '{family}'", family=str(family), n=n, seed=seed)
    settings = config_loader.get_generator_config()
    seed = settings.default_seed if seed is None else seed
    if n < MIN_N.get(family, 1):
        raise GenerationError(f"{family.value} needs n >= {MIN_N.get(family, 1)}",
                              family=family.value, n=n, seed=seed)

    rng = _rng(seed, n)
    if family == GraphFamily.PATH:
        graph = Graph.from_networkx(nx.path_graph(n))
    elif family == GraphFamily.CYCLE:
        graph = Graph.from_networkx(nx.cycle_graph(n))
    elif family == GraphFamily.COMPLETE:
        graph = Graph.from_networkx(nx.complete_graph(n))
    elif family == GraphFamily.STAR:
        graph = Graph.from_networkx(nx.star_graph(n - 1))
    elif family == GraphFamily.PETERSEN:
        if n != 10:
            raise GenerationError("The Petersen graph has exactly 10 vertices", family=family.value, n=n, seed=seed)
        graph = Graph.from_networkx(nx.petersen_graph())
    elif family == GraphFamily.RANDOM_TREE:
        graph = Graph.from_edges(n, _random_tree(n, rng))
    elif family == GraphFamily.RANDOM_COGRAPH:
        graph = Graph.from_edges(n, _cograph_edges(random_cotree(n, seed)))
    elif family == GraphFamily.RANDOM_CHORDAL:
        graph = Graph.from_edges(n, _random_chordal(n, rng))
    else:
        cap = settings.max_degree if max_degree is None else max_degree
        if cap < 2 and n > 2:
            raise GenerationError("max_degree below 2 cannot connect more than two vertices",
                                  family=family.value, n=n, seed=seed)
        graph = Graph.from_edges(n, _random_bounded_degree(n, rng, cap, settings.connect_attempts, seed))

    graph_logger.debug(f"Generated {family.value}: n={graph.n}, m={graph.m}, seed={seed}")
    return graph
