"""
Graph representation, edge-list I/O, distances and resolving predicates.

Every solver in the suite works on ``Graph`` (dense 0-based vertex ids) and a
``DistanceMatrix`` computed once per instance.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from utils.custom_exceptions import (
    ContractViolation,
    GraphParseError,
    GraphValidationError,
    NotConnectedError,
)
from utils.logger import graph_logger

VertexSet = Tuple[int, ...]
Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..vertex_count-1."""
    vertex_count: int
    adjacency: Tuple[Tuple[int, ...], ...]
    labels: Optional[Tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.vertex_count < 0:
            raise GraphValidationError(f"Negative vertex count: {self.vertex_count}")
        if len(self.adjacency) != self.vertex_count:
            raise GraphValidationError("Adjacency length does not match vertex count",
                                       vertex_count=self.vertex_count, adjacency=len(self.adjacency))
        if self.labels is not None and len(self.labels) != self.vertex_count:
            raise GraphValidationError("Label count does not match vertex count")
        for v, neighbors in enumerate(self.adjacency):
            for u in neighbors:
                if u == v:
                    raise GraphValidationError(f"Self-loop at vertex {v}", vertex=v, edge=(v, v))
                if not 0 <= u < self.vertex_count:
                    raise GraphValidationError(f"Neighbor {u} of {v} out of range", vertex=u)
                if v not in self.adjacency[u]:
                    raise GraphValidationError(f"Asymmetric adjacency between {v} and {u}", edge=(v, u))

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Edge],
                   labels: Optional[Sequence[str]] = None) -> "Graph":
        """Build a graph, deduplicating edges; self-loops and out-of-range ids are rejected."""
        neighbor_sets: List[set] = [set() for _ in range(vertex_count)]
        for u, v in edges:
            if u == v:
                raise GraphValidationError(f"Self-loop at vertex {u}", vertex=u, edge=(u, v))
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GraphValidationError(f"Edge ({u}, {v}) outside 0..{vertex_count - 1}", edge=(u, v))
            neighbor_sets[u].add(v)
            neighbor_sets[v].add(u)
        return cls(
            vertex_count=vertex_count,
            adjacency=tuple(tuple(sorted(s)) for s in neighbor_sets),
            labels=tuple(labels) if labels is not None else None,
        )

    @classmethod
    def from_networkx(cls, nx_graph: nx.Graph) -> "Graph":
        """Relabel the nodes of a networkx graph to 0..n-1 in sorted order."""
        nodes = sorted(nx_graph.nodes())
        index = {node: i for i, node in enumerate(nodes)}
        return cls.from_edges(len(nodes), ((index[a], index[b]) for a, b in nx_graph.edges()))

    @property
    def n(self) -> int:
        return self.vertex_count

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def vertices(self) -> range:
        return range(self.vertex_count)

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def edges(self) -> List[Edge]:
        """Edges as (u, v) with u < v, lexicographically sorted."""
        return [(u, v) for u in range(self.vertex_count) for v in self.adjacency[u] if u < v]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.vertex_count))
        g.add_edges_from(self.edges())
        return g

    def induced_subgraph(self, vertices: Iterable[int]) -> Tuple["Graph", VertexSet]:
        """
        Subgraph induced by ``vertices``, relabelled in ascending order.

        Returns the subgraph and the tuple mapping new ids to original ids.
        """
        original = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(original)}
        edges = [(index[u], index[w]) for u in original for w in self.adjacency[u] if w in index and u < w]
        return Graph.from_edges(len(original), edges), original

    def canonical_set(self, vertices: Iterable[int]) -> VertexSet:
        """Sorted, deduplicated vertex tuple; raises on ids outside the graph."""
        result = tuple(sorted(set(vertices)))
        for v in result:
            if not 0 <= v < self.vertex_count:
                raise GraphValidationError(f"Vertex {v} outside 0..{self.vertex_count - 1}", vertex=v)
        return result


def _decode(text: Union[str, bytes]) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode('utf-8')
        except UnicodeDecodeError as e:
            raise GraphParseError(f"Input is not valid UTF-8 at byte {e.start}", line=None,
                                  token=repr(text[e.start:e.start + 1]))
    return text


def parse_edge_list(text: Union[str, bytes], allow_labels: bool = False) -> Graph:
    """
    Parse ``u v`` lines into a Graph.

    Lines starting with '#' are comments. The first data line may be a header
    ``n <count>`` declaring trailing isolated vertices. With ``allow_labels``
    arbitrary tokens are accepted and mapped to ids by first appearance; the
    labels are kept on the graph.
    """
    edges: List[Edge] = []
    header_count: Optional[int] = None
    label_index: Dict[str, int] = {}
    max_id = -1
    seen_data = False

    for line_no, raw in enumerate(_decode(text).splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        tokens = line.split()

        if not seen_data and tokens[0] == 'n':
            seen_data = True
            if len(tokens) != 2:
                raise GraphParseError("Header must be 'n <count>'", line=line_no, token=line)
            try:
                header_count = int(tokens[1])
            except ValueError:
                raise GraphParseError(f"Malformed vertex count '{tokens[1]}'", line=line_no, token=tokens[1])
            if header_count < 0:
                raise GraphParseError("Vertex count cannot be negative", line=line_no, token=tokens[1])
            continue
        seen_data = True

        if len(tokens) != 2:
            raise GraphParseError(f"Expected two endpoints, found {len(tokens)} tokens", line=line_no, token=line)

        if allow_labels:
            ids = []
            for token in tokens:
                if token not in label_index:
                    label_index[token] = len(label_index)
                ids.append(label_index[token])
            u, v = ids
        else:
            try:
                u, v = (int(t) for t in tokens)
            except ValueError:
                bad = next(t for t in tokens if not t.lstrip('-').isdigit())
                raise GraphParseError(f"Malformed vertex id '{bad}'", line=line_no, token=bad)
            if u < 0 or v < 0:
                raise GraphParseError("Vertex ids must be non-negative", line=line_no, token=line)

        if u == v:
            raise GraphParseError(f"Self-loop on '{tokens[0]}' rejected", line=line_no, token=line)
        edges.append((u, v))
        max_id = max(max_id, u, v)

    count = max_id + 1
    if header_count is not None:
        if header_count < count:
            raise GraphParseError(f"Header declares {header_count} vertices but id {max_id} appears",
                                  line=None, token=str(header_count))
        count = header_count

    labels = None
    if allow_labels:
        labels = list(label_index)
        labels.extend(str(i) for i in range(len(labels), count))

    graph = Graph.from_edges(count, edges, labels=labels)
    graph_logger.debug(f"Parsed edge list: n={graph.n}, m={graph.m}")
    return graph


def write_edge_list(g: Graph) -> str:
    """Serialize as sorted ``u v`` lines; a header is written only when isolated trailing ids need it."""
    edges = g.edges()
    lines = []
    max_id = max((v for _, v in edges), default=-1)
    if g.vertex_count != max_id + 1:
        lines.append(f"n {g.vertex_count}")
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


class DistanceMatrix:
    """
    All-pairs hop counts in a read-only numpy array.

    Unreachable pairs hold ``sentinel`` (= n), larger than any finite distance.
    """

    def __init__(self, array: np.ndarray):
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise ContractViolation("Distance array must be square", operation="DistanceMatrix")
        self._array = np.array(array, dtype=np.int64, copy=True)
        self._array.setflags(write=False)
        self.n = self._array.shape[0]
        self.sentinel = self.n

    @property
    def array(self) -> np.ndarray:
        return self._array

    def __getitem__(self, pair: Tuple[int, int]) -> int:
        u, v = pair
        return int(self._array[u, v])

    def dist(self, u: int, v: int) -> int:
        return int(self._array[u, v])

    def dist_to_set(self, v: int, vertices: Iterable[int]) -> int:
        ids = list(vertices)
        if not ids:
            return self.sentinel
        return int(self._array[v, ids].min())

    def diameter_of(self, vertices: Iterable[int]) -> int:
        ids = list(vertices)
        if len(ids) < 2:
            return 0
        return int(self._array[np.ix_(ids, ids)].max())

    def is_connected(self) -> bool:
        return self.n == 0 or bool((self._array < self.sentinel).all())

    @cached_property
    def rows(self) -> Tuple[Tuple[int, ...], ...]:
        """Plain-int rows for tight loops."""
        return tuple(tuple(row) for row in self._array.tolist())


def all_pairs_distances(g: Graph) -> DistanceMatrix:
    """n breadth-first searches; sentinel n for unreachable pairs."""
    n = g.vertex_count
    array = np.full((n, n), n, dtype=np.int64)
    for source, lengths in nx.all_pairs_shortest_path_length(g.to_networkx()):
        for target, hops in lengths.items():
            array[source, target] = hops
    return DistanceMatrix(array)


def is_connected(g: Graph) -> bool:
    return g.vertex_count > 0 and nx.is_connected(g.to_networkx())


def require_connected(g: Graph, operation: str = "") -> None:
    if not is_connected(g):
        components = nx.number_connected_components(g.to_networkx()) if g.vertex_count else 0
        raise NotConnectedError(f"{operation or 'Operation'} requires a connected graph",
                                components=components)


def resolves(d: DistanceMatrix, v: int, x: int, y: int) -> bool:
    """True iff v sees x and y at different distances."""
    if x == y:
        raise ContractViolation(f"resolves needs distinct vertices, got {x} twice", operation="resolves")
    return d.dist(v, x) != d.dist(v, y)


def _distance_columns(d: DistanceMatrix, w: Sequence[int]) -> np.ndarray:
    return d.array[list(w), :].T


def is_resolving_set(g: Graph, d: DistanceMatrix, w: Iterable[int]) -> bool:
    """
    True iff every pair of distinct vertices is resolved by a member of w.

    A single-vertex graph is resolved by any set.
    """
    if not d.is_connected() or g.vertex_count == 0:
        raise NotConnectedError("is_resolving_set requires a connected graph")
    members = g.canonical_set(w)
    if g.vertex_count == 1:
        return True
    if not members:
        return False
    vectors = _distance_columns(d, members)
    return len(np.unique(vectors, axis=0)) == g.vertex_count


def first_unresolved_pair(d: DistanceMatrix, w: Iterable[int]) -> Optional[Tuple[int, int]]:
    """The pair (x, y), x < y, with smallest y then x, that w fails to resolve; None if w resolves."""
    members = sorted(set(w))
    first_with_vector: Dict[Tuple[int, ...], int] = {}
    for y in range(d.n):
        vector = tuple(int(d.array[z, y]) for z in members)
        if vector in first_with_vector:
            return first_with_vector[vector], y
        first_with_vector[vector] = y
    return None


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    max_degree: int
    diameter: int
    connected: bool

    def to_dict(self) -> Dict[str, Union[int, bool]]:
        return {'n': self.n, 'm': self.m, 'max_degree': self.max_degree,
                'diameter': self.diameter, 'connected': self.connected}


def graph_stats(g: Graph, d: Optional[DistanceMatrix] = None) -> GraphStats:
    """Degree, diameter and connectivity; diameter is the sentinel n when disconnected."""
    d = d or all_pairs_distances(g)
    connected = g.vertex_count > 0 and d.is_connected()
    diameter = int(d.array.max()) if g.vertex_count else 0
    return GraphStats(n=g.n, m=g.m, max_degree=g.max_degree(), diameter=diameter, connected=connected)
