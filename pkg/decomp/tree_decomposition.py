"""
Tree decompositions and their validation (coverage, edge containment,
connected occurrence), with width and length measurement.
"""
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from graphs.graph import DistanceMatrix, Graph, all_pairs_distances
from utils.custom_exceptions import DecompositionError
from utils.logger import decomp_logger


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags indexed by node id 0..t-1 plus undirected tree edges between node ids."""
    vertex_count: int
    bags: Tuple[FrozenSet[int], ...]
    edges: Tuple[Tuple[int, int], ...]

    @classmethod
    def build(cls, vertex_count: int, bags: Sequence[Iterable[int]],
              edges: Iterable[Tuple[int, int]]) -> "TreeDecomposition":
        """Normalise edges to (i, j) with i < j, sorted and deduplicated."""
        normalised = sorted({(min(a, b), max(a, b)) for a, b in edges})
        return cls(vertex_count=vertex_count,
                   bags=tuple(frozenset(b) for b in bags),
                   edges=tuple(normalised))

    @property
    def node_count(self) -> int:
        return len(self.bags)

    def tree(self) -> nx.Graph:
        t = nx.Graph()
        t.add_nodes_from(range(self.node_count))
        t.add_edges_from(self.edges)
        return t

    def neighbors(self) -> Dict[int, List[int]]:
        adjacency: Dict[int, List[int]] = {i: [] for i in range(self.node_count)}
        for a, b in self.edges:
            adjacency[a].append(b)
            adjacency[b].append(a)
        for value in adjacency.values():
            value.sort()
        return adjacency

    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def canonical(self) -> Tuple[Tuple[Tuple[int, ...], ...], Tuple[Tuple[int, int], ...]]:
        return tuple(tuple(sorted(b)) for b in self.bags), self.edges


@dataclass
class TdReport:
    valid: bool
    width: int
    length: int
    problems: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {'valid': self.valid, 'width': self.width, 'length': self.length,
                'problems': list(self.problems)}


def bag_length(d: DistanceMatrix, bags: Iterable[Iterable[int]]) -> int:
    """Largest bag diameter measured in the graph."""
    return max((d.diameter_of(bag) for bag in bags), default=0)


def validate_td(g: Graph, td: TreeDecomposition, d: Optional[DistanceMatrix] = None) -> TdReport:
    """
    Check the three tree-decomposition conditions and measure width and length.

    Raises DecompositionError when a bag names a vertex outside the graph.
    """
    for node, bag in enumerate(td.bags):
        for v in bag:
            if not 0 <= v < g.vertex_count:
                raise DecompositionError(f"Bag {node} references vertex {v} outside 0..{g.vertex_count - 1}",
                                         node=node, vertex=v)

    problems: List[str] = []
    tree = td.tree()
    if td.node_count == 0:
        if g.vertex_count:
            problems.append("decomposition has no bags")
    elif not nx.is_tree(tree):
        problems.append("bag graph is not a tree")

    occurrences: Dict[int, List[int]] = {v: [] for v in g.vertices()}
    for node, bag in enumerate(td.bags):
        for v in bag:
            occurrences[v].append(node)

    for v, nodes in occurrences.items():
        if not nodes:
            problems.append(f"vertex {v} is in no bag")
        elif len(nodes) > 1 and not nx.is_connected(tree.subgraph(nodes)):
            problems.append(f"bags containing vertex {v} are not connected")

    for u, v in g.edges():
        if not any(u in bag and v in bag for bag in td.bags):
            problems.append(f"edge ({u}, {v}) is in no bag")

    d = d or all_pairs_distances(g)
    report = TdReport(valid=not problems, width=td.width(), length=bag_length(d, td.bags), problems=problems)
    if problems:
        decomp_logger.debug(f"Invalid tree decomposition: {problems[:5]}")
    return report
