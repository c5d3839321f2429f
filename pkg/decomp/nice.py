"""
Nice tree decompositions: rooted, binary, with leaf / introduce / forget / join
nodes and a singleton root bag.

Node ids are assigned children-first, so ascending id order is a valid
bottom-up processing order.
"""
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from decomp.tree_decomposition import TreeDecomposition, validate_td
from graphs.graph import DistanceMatrix, Graph, require_connected
from utils.custom_exceptions import DecompositionError
from utils.logger import decomp_logger


class NodeKind(str, Enum):
    LEAF = "leaf"
    INTRODUCE = "introduce"
    FORGET = "forget"
    JOIN = "join"


@dataclass(frozen=True)
class NiceNode:
    id: int
    kind: NodeKind
    bag: FrozenSet[int]
    children: Tuple[int, ...] = ()
    # leaf vertex, introduced vertex or forgotten vertex
    vertex: Optional[int] = None


class NiceTreeDecomposition:
    """A nice tree decomposition with subtree and depth queries."""

    def __init__(self, vertex_count: int, nodes: Sequence[NiceNode]):
        if not nodes:
            raise DecompositionError("Nice decomposition needs at least one node")
        self.vertex_count = vertex_count
        self.nodes: Tuple[NiceNode, ...] = tuple(nodes)
        self.root = len(self.nodes) - 1
        self._check_structure()

    def _check_structure(self) -> None:
        has_parent = [False] * len(self.nodes)
        for node in self.nodes:
            for child in node.children:
                if not 0 <= child < node.id:
                    raise DecompositionError(f"Child {child} of node {node.id} is not numbered below it",
                                             node=node.id)
                if has_parent[child]:
                    raise DecompositionError(f"Node {child} has two parents", node=child)
                has_parent[child] = True
            self._check_node(node)
        if len(self.nodes[self.root].bag) != 1:
            raise DecompositionError("Root bag must be a singleton", node=self.root)
        orphans = [i for i, flag in enumerate(has_parent) if not flag and i != self.root]
        if orphans:
            raise DecompositionError(f"Nodes {orphans[:5]} are not connected to the root", node=orphans[0])
        for node in self.nodes:
            if node.kind == NodeKind.JOIN and not all(self.has_forget_below[c] for c in node.children):
                raise DecompositionError(f"Join node {node.id} has a child branch without a forget node",
                                         node=node.id)

    def _check_node(self, node: NiceNode) -> None:
        kids = [self.nodes[c] for c in node.children]
        if node.kind == NodeKind.LEAF:
            ok = not kids and node.bag == frozenset({node.vertex})
        elif node.kind == NodeKind.INTRODUCE:
            ok = (len(kids) == 1 and node.vertex not in kids[0].bag
                  and node.bag == kids[0].bag | {node.vertex})
        elif node.kind == NodeKind.FORGET:
            ok = (len(kids) == 1 and node.vertex in kids[0].bag
                  and node.bag == kids[0].bag - {node.vertex})
        else:
            ok = len(kids) == 2 and all(k.bag == node.bag for k in kids)
        if not ok:
            raise DecompositionError(f"Node {node.id} violates the {node.kind.value} node rule", node=node.id)

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, i: int) -> NiceNode:
        return self.nodes[i]

    def bag(self, i: int) -> FrozenSet[int]:
        return self.nodes[i].bag

    def children(self, i: int) -> Tuple[int, ...]:
        return self.nodes[i].children

    @property
    def root_vertex(self) -> int:
        return next(iter(self.nodes[self.root].bag))

    @cached_property
    def parent(self) -> Tuple[Optional[int], ...]:
        parents: List[Optional[int]] = [None] * len(self.nodes)
        for node in self.nodes:
            for child in node.children:
                parents[child] = node.id
        return tuple(parents)

    @cached_property
    def depth(self) -> Tuple[int, ...]:
        """Distance from the root in the tree."""
        depths = [0] * len(self.nodes)
        for i in range(self.root - 1, -1, -1):
            depths[i] = depths[self.parent[i]] + 1
        return tuple(depths)

    @cached_property
    def subtree_vertices(self) -> Tuple[FrozenSet[int], ...]:
        """V(G_i): union of the bags in the subtree rooted at i."""
        result: List[FrozenSet[int]] = []
        for node in self.nodes:
            acc = set(node.bag)
            for child in node.children:
                acc |= result[child]
            result.append(frozenset(acc))
        return tuple(result)

    @cached_property
    def has_forget_below(self) -> Tuple[bool, ...]:
        """Whether the subtree rooted at each node holds a forget node."""
        result: List[bool] = []
        for node in self.nodes:
            result.append(node.kind == NodeKind.FORGET or any(result[c] for c in node.children))
        return tuple(result)

    def postorder(self) -> range:
        return range(len(self.nodes))

    def subtree_nodes(self, i: int, max_offset: Optional[int] = None) -> List[int]:
        """Nodes of T_i whose depth exceeds depth(i) by at most max_offset (all when None)."""
        result = []
        queue = deque([(i, 0)])
        while queue:
            j, offset = queue.popleft()
            result.append(j)
            if max_offset is None or offset < max_offset:
                queue.extend((c, offset + 1) for c in self.nodes[j].children)
        return sorted(result)

    def nodes_at_offset(self, i: int, offset: int) -> List[int]:
        """Nodes of T_i at depth exactly depth(i) + offset."""
        if offset < 0:
            return []
        target = self.depth[i] + offset
        return [j for j in self.subtree_nodes(i, offset) if self.depth[j] == target]

    def to_tree_decomposition(self) -> TreeDecomposition:
        edges = [(node.id, c) for node in self.nodes for c in node.children]
        return TreeDecomposition.build(self.vertex_count, [n.bag for n in self.nodes], edges)

    def width(self) -> int:
        return max(len(n.bag) for n in self.nodes) - 1


class _Builder:
    """Appends nodes children-first."""

    def __init__(self):
        self.nodes: List[NiceNode] = []

    def add(self, kind: NodeKind, bag: FrozenSet[int], children: Tuple[int, ...] = (),
            vertex: Optional[int] = None) -> int:
        node_id = len(self.nodes)
        self.nodes.append(NiceNode(node_id, kind, frozenset(bag), children, vertex))
        return node_id

    def leaf_chain(self, bag: FrozenSet[int]) -> int:
        ordered = sorted(bag)
        top = self.add(NodeKind.LEAF, frozenset({ordered[0]}), vertex=ordered[0])
        return self.introduce_chain(top, frozenset({ordered[0]}), bag)

    def introduce_chain(self, top: int, current: FrozenSet[int], target: FrozenSet[int]) -> int:
        for v in sorted(target - current):
            current = current | {v}
            top = self.add(NodeKind.INTRODUCE, current, (top,), v)
        return top

    def forget_chain(self, top: int, current: FrozenSet[int], target: FrozenSet[int]) -> Tuple[int, bool]:
        forgot = False
        for v in sorted(current - target):
            current = current - {v}
            top = self.add(NodeKind.FORGET, current, (top,), v)
            forgot = True
        return top, forgot


def make_nice(g: Graph, td: TreeDecomposition, root_vertex: int,
              d: Optional[DistanceMatrix] = None) -> NiceTreeDecomposition:
    """
    Convert a valid tree decomposition of a connected graph into a nice one
    with root bag {root_vertex}, the same width and the same length.

    Every original bag survives as a node bag; all other bags are subsets of
    original bags. Child branches containing no forget node carry only
    vertices of their parent bag and are dropped.
    """
    require_connected(g, "make_nice")
    report = validate_td(g, td, d)
    if not report.valid:
        raise DecompositionError(f"Cannot make an invalid decomposition nice: {report.problems[:3]}")
    if not 0 <= root_vertex < g.vertex_count:
        raise DecompositionError(f"Root vertex {root_vertex} outside the graph", vertex=root_vertex)

    builder = _Builder()
    if g.vertex_count == 1:
        builder.add(NodeKind.LEAF, frozenset({0}), vertex=0)
        return NiceTreeDecomposition(1, builder.nodes)

    # empty bags can only sit in all-empty parts of the tree for a connected graph
    kept = [i for i, bag in enumerate(td.bags) if bag]
    adjacency = td.neighbors()
    start = next(i for i in kept if root_vertex in td.bags[i])

    order, parent = [start], {start: None}
    queue = deque([start])
    while queue:
        i = queue.popleft()
        for j in adjacency[i]:
            if j not in parent and td.bags[j]:
                parent[j] = i
                order.append(j)
                queue.append(j)

    below: Dict[int, FrozenSet[int]] = {}
    for i in reversed(order):
        acc = set(td.bags[i])
        for j in adjacency[i]:
            if parent.get(j) == i:
                acc |= below[j]
        below[i] = frozenset(acc)

    # a child branch is kept iff it holds a vertex outside the parent bag
    live_children: Dict[int, List[int]] = {}
    for i in order:
        if i != start and i not in live_children.get(parent[i], ()):
            continue
        live_children[i] = [j for j in adjacency[i]
                            if parent.get(j) == i and not below[j] <= td.bags[i]]

    top_of: Dict[int, int] = {}
    for i in reversed(order):
        if i not in live_children:
            continue
        bag = td.bags[i]
        branches: List[int] = []
        for j in live_children[i]:
            child_bag = td.bags[j]
            top, _ = builder.forget_chain(top_of.pop(j), child_bag, bag)
            branches.append(builder.introduce_chain(top, child_bag & bag, bag))

        if not branches:
            top_of[i] = builder.leaf_chain(bag)
            continue
        top = branches[0]
        for other in branches[1:]:
            top = builder.add(NodeKind.JOIN, bag, (top, other))
        top_of[i] = top

    top, _ = builder.forget_chain(top_of[start], td.bags[start], frozenset({root_vertex}))
    nice = NiceTreeDecomposition(g.vertex_count, builder.nodes)
    decomp_logger.debug(f"Nice decomposition: {len(nice)} nodes, root vertex {root_vertex}")
    return nice
