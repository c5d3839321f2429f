"""
Empirical checks of the structural bounds the tree-length solver relies on,
run against a concrete nice decomposition.

  path_occupancy   a vertex spans at most alpha bags along any tree path
  tree_distance    dist_T(i, j) <= alpha(dist(x, y) + 1) - 1 for x in X_i, y in X_j
  introduce_far    u resolves an introduced v and anything radius levels below
  join_far         u, or any vertex strictly below a deep node j, resolves a
                   pair split across a join
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, TypeVar

import networkx as nx
import numpy as np

from decomp.nice import NiceTreeDecomposition, NodeKind
from decomp.tree_decomposition import validate_td
from graphs.graph import DistanceMatrix, Graph, all_pairs_distances
from solvers.tl_solver import alpha, locality_radius
from utils.config_loader import SolverConfig
from utils.custom_exceptions import DecompositionError
from utils.logger import solver_logger

T = TypeVar('T')


@dataclass
class LemmaReport:
    alpha: int
    radius: int
    checked: Dict[str, int] = field(default_factory=dict)
    sampled: Dict[str, bool] = field(default_factory=dict)
    violations: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {'alpha': self.alpha, 'radius': self.radius, 'checked': dict(self.checked),
                'sampled': dict(self.sampled), 'violations': list(self.violations)}


def _sample(items: Sequence[T], limit: int, rng: np.random.Generator) -> List[T]:
    if len(items) <= limit:
        return list(items)
    picks = np.sort(rng.choice(len(items), size=limit, replace=False))
    return [items[int(p)] for p in picks]


def check_structural_lemmas(g: Graph, nice: NiceTreeDecomposition, d: Optional[DistanceMatrix] = None,
                            config: Optional[SolverConfig] = None,
                            radius: Optional[int] = None) -> LemmaReport:
    """
    Run the four checks and collect every violation found.

    Tuple families larger than ``config.lemma_sample_limit`` are sampled
    with ``config.lemma_sample_seed``. Raises DecompositionError when the
    decomposition is not a valid one of g.
    """
    config = config or SolverConfig()
    d = d or all_pairs_distances(g)
    report_td = validate_td(g, nice.to_tree_decomposition(), d)
    if not report_td.valid:
        raise DecompositionError(f"Not a tree decomposition of the graph: {report_td.problems[:3]}")

    max_degree = max(1, g.max_degree())
    length = max(1, report_td.length)
    bound = alpha(max_degree, length)
    radius = radius or locality_radius(max_degree, length)
    report = LemmaReport(alpha=bound, radius=radius)
    if g.vertex_count < 2:
        return report

    rng = np.random.default_rng(config.lemma_sample_seed)
    limit = config.lemma_sample_limit
    rows = d.rows
    u = nice.root_vertex

    tree = nice.to_tree_decomposition().tree()
    tree_dist = dict(nx.all_pairs_shortest_path_length(tree))

    def record(family: str, items: Sequence[Any]) -> List[Any]:
        chosen = _sample(items, limit, rng)
        report.checked[family] = len(chosen)
        report.sampled[family] = len(chosen) < len(items)
        return chosen

    # a vertex's bags form a subtree; its longest path has diameter + 1 nodes
    for z in record('path_occupancy', list(g.vertices())):
        holders = [node.id for node in nice.nodes if z in node.bag]
        span = nx.diameter(tree.subgraph(holders)) + 1
        if span > bound:
            report.violations.append({'check': 'path_occupancy', 'vertex': z, 'span': span})

    # checking the closest pair of a node pair covers all of its vertex pairs
    node_pairs = [(i, j) for i in nice.postorder() for j in nice.postorder() if i < j]
    for i, j in record('tree_distance', node_pairs):
        closest = min(rows[x][y] for x in nice.bag(i) for y in nice.bag(j))
        if tree_dist[i][j] > bound * (closest + 1) - 1:
            report.violations.append({'check': 'tree_distance', 'nodes': [i, j],
                                      'tree_distance': tree_dist[i][j], 'graph_distance': closest})

    introduce_items = []
    for node in nice.nodes:
        if node.kind != NodeKind.INTRODUCE:
            continue
        for j in nice.subtree_nodes(node.id):
            if nice.depth[j] - nice.depth[node.id] >= radius:
                introduce_items.extend((node.id, node.vertex, x) for x in sorted(nice.subtree_vertices[j]))
    for i, v, x in record('introduce_far', sorted(set(introduce_items))):
        if rows[u][v] == rows[u][x]:
            report.violations.append({'check': 'introduce_far', 'node': i, 'pair': [v, x]})

    join_items = []
    for node in nice.nodes:
        if node.kind != NodeKind.JOIN:
            continue
        for near, other in (node.children, node.children[::-1]):
            others = sorted(nice.subtree_vertices[other] - nice.bag(other))
            for j in nice.subtree_nodes(near):
                if nice.depth[j] - nice.depth[near] < radius - 1:
                    continue
                deep = nice.subtree_vertices[j] - nice.bag(j)
                join_items.extend((node.id, j, x, y) for x in sorted(deep) for y in others)
    for i, j, x, y in record('join_far', join_items):
        if rows[u][x] != rows[u][y]:
            continue
        deep = nice.subtree_vertices[j] - nice.bag(j)
        if any(rows[v][x] == rows[v][y] for v in deep):
            report.violations.append({'check': 'join_far', 'node': i, 'deep_node': j, 'pair': [x, y]})

    solver_logger.debug(f"Structural checks: {report.checked}, {len(report.violations)} violations")
    return report
