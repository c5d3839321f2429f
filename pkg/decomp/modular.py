"""
Modular decomposition by recursive splitting.

A vertex set S becomes a union node when G[S] is disconnected, a join node
when its complement is disconnected, and otherwise a prime node over its
maximal modules. Modular width is the largest prime quotient (0 for cographs).
"""
from collections import deque
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from graphs.graph import Graph
from utils.custom_exceptions import DecompositionError
from utils.logger import decomp_logger


class ModuleKind(str, Enum):
    LEAF = "leaf"
    UNION = "union"
    JOIN = "join"
    PRIME = "prime"


@dataclass(frozen=True, eq=False)
class ModularNode:
    kind: ModuleKind
    vertices: FrozenSet[int]
    children: Tuple["ModularNode", ...] = ()
    # prime nodes only: one quotient vertex per child, in child order
    quotient: Optional[Graph] = None
    vertex: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def is_leaf(self) -> bool:
        return self.kind == ModuleKind.LEAF

    def quotient_graph(self) -> Graph:
        """Quotient over the children: edgeless for union, complete for join, stored for prime."""
        if self.is_leaf:
            raise DecompositionError("A leaf has no quotient", vertex=self.vertex)
        if self.kind == ModuleKind.PRIME:
            return self.quotient
        count = len(self.children)
        if self.kind == ModuleKind.UNION:
            return Graph.from_edges(count, [])
        return Graph.from_edges(count, combinations(range(count), 2))


@dataclass(frozen=True)
class ModularTree:
    root: ModularNode
    width: int

    def postorder(self) -> List[ModularNode]:
        """Children before parents."""
        order: List[ModularNode] = []
        stack = [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded or node.is_leaf:
                order.append(node)
                continue
            stack.append((node, True))
            stack.extend((child, False) for child in reversed(node.children))
        return order

    def internal_nodes(self) -> List[ModularNode]:
        return [node for node in self.postorder() if not node.is_leaf]


def is_module(g: Graph, vertices: Iterable[int]) -> bool:
    """Every vertex outside the set is adjacent to all of it or none of it."""
    members = set(vertices)
    for z in g.vertices():
        if z in members:
            continue
        hits = sum(1 for u in g.neighbors(z) if u in members)
        if 0 < hits < len(members):
            return False
    return True


def _co_components(adjacency: List[Set[int]], s: FrozenSet[int]) -> List[FrozenSet[int]]:
    """Connected components of the complement of G[S]."""
    unvisited = set(s)
    components = []
    while unvisited:
        start = min(unvisited)
        unvisited.discard(start)
        component = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            reached = [w for w in unvisited if w not in adjacency[v]]
            for w in reached:
                unvisited.discard(w)
                component.add(w)
                queue.append(w)
        components.append(frozenset(component))
    return components


def _module_closure(adjacency: List[Set[int]], s: FrozenSet[int], seed: Set[int]) -> Set[int]:
    """Smallest module of G[S] containing seed."""
    module = set(seed)
    changed = True
    while changed:
        changed = False
        for z in s - module:
            hits = len(adjacency[z] & module)
            if 0 < hits < len(module):
                module.add(z)
                changed = True
    return module


def _maximal_modules(adjacency: List[Set[int]], s: FrozenSet[int]) -> List[FrozenSet[int]]:
    """Maximal proper modules of G[S]; they partition S when G[S] and its complement are connected."""
    unassigned = set(s)
    parts = []
    while unassigned:
        a = min(unassigned)
        part = {a}
        for b in sorted(s):
            if b == a or b in part:
                continue
            closure = _module_closure(adjacency, s, {a, b})
            if len(closure) < len(s):
                part |= closure
        parts.append(frozenset(part))
        unassigned -= part
    return parts


def _by_min(sets: Iterable[FrozenSet[int]]) -> List[FrozenSet[int]]:
    return sorted(sets, key=min)


def modular_decompose(g: Graph) -> ModularTree:
    """Decompose g; width is the largest prime quotient size, 0 if there is none."""
    if g.vertex_count == 0:
        raise DecompositionError("Cannot decompose the empty graph")
    adjacency = [set(g.neighbors(v)) for v in g.vertices()]
    nx_graph = g.to_networkx()

    plan: Dict[FrozenSet[int], Tuple[ModuleKind, List[FrozenSet[int]]]] = {}
    discovered: List[FrozenSet[int]] = []
    stack = [frozenset(g.vertices())]
    while stack:
        s = stack.pop()
        discovered.append(s)
        if len(s) == 1:
            plan[s] = (ModuleKind.LEAF, [])
            continue
        parts = _by_min(frozenset(c) for c in nx.connected_components(nx_graph.subgraph(s)))
        kind = ModuleKind.UNION
        if len(parts) == 1:
            parts = _by_min(_co_components(adjacency, s))
            kind = ModuleKind.JOIN
        if len(parts) == 1:
            parts = _by_min(_maximal_modules(adjacency, s))
            kind = ModuleKind.PRIME
        plan[s] = (kind, parts)
        stack.extend(parts)

    built: Dict[FrozenSet[int], ModularNode] = {}
    width = 0
    for s in reversed(discovered):
        kind, parts = plan[s]
        if kind == ModuleKind.LEAF:
            (v,) = s
            built[s] = ModularNode(ModuleKind.LEAF, s, vertex=v)
            continue
        children = tuple(built[p] for p in parts)
        quotient = None
        if kind == ModuleKind.PRIME:
            reps = [min(p) for p in parts]
            quotient = Graph.from_edges(
                len(parts),
                [(i, j) for i, j in combinations(range(len(parts)), 2) if reps[j] in adjacency[reps[i]]]
            )
            width = max(width, len(parts))
        built[s] = ModularNode(kind, s, children, quotient)

    tree = ModularTree(root=built[frozenset(g.vertices())], width=width)
    decomp_logger.debug(f"Modular decomposition: width {width}, {len(discovered)} nodes")
    return tree


def render_modular_tree(tree: ModularTree) -> str:
    """Indented text form, one node per line."""
    lines = [f"width {tree.width}"]
    stack = [(tree.root, 0)]
    while stack:
        node, level = stack.pop()
        pad = "  " * level
        if node.is_leaf:
            lines.append(f"{pad}leaf {node.vertex}")
            continue
        line = f"{pad}{node.kind.value} {sorted(node.vertices)}"
        if node.kind == ModuleKind.PRIME:
            line += f" quotient_edges={node.quotient.edges()}"
        lines.append(line)
        stack.extend((child, level + 1) for child in reversed(node.children))
    return "\n".join(lines) + "\n"
