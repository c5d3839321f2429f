"""
Exact metric dimension over a modular decomposition.

For a module H with at least two vertices, and H' = H plus a universal
vertex, an entry holds per (p, q) the least |W|, W a subset of V(H), such
that W resolves V(H) in H', p says some vertex of H is at distance 1 from
all of W and q says some vertex is at distance 2 from all of W. None marks
an impossible state.

Union and join nodes with more than two children are folded left to right
into binary steps. Prime nodes enumerate the trivial children taken into W
and a (p, q) state per non-trivial child.
"""
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from decomp.modular import ModularNode, ModularTree, ModuleKind, modular_decompose
from graphs.graph import DistanceMatrix, Graph, VertexSet, all_pairs_distances, is_connected
from solvers.oracle import PQ, PQ_STATES
from utils.custom_exceptions import ContractViolation, DecompositionError, NotConnectedError
from utils.logger import log_execution_time, solver_logger

# a module's contribution to W: vertices taken directly plus (child entry, state) parts
Choice = Tuple[VertexSet, Tuple[Tuple["MwEntry", PQ], ...]]
# a fold operand is either the vertex of a singleton or the entry of a larger module
Operand = Union[int, "MwEntry"]


def _add(*values: Optional[int]) -> Optional[int]:
    if any(v is None for v in values):
        return None
    return sum(values)


@dataclass(eq=False)
class MwEntry:
    size: int
    values: Dict[PQ, Optional[int]] = field(default_factory=lambda: {s: None for s in PQ_STATES})
    choices: Dict[PQ, Choice] = field(default_factory=dict)

    def value(self, p: bool, q: bool) -> Optional[int]:
        return self.values[(p, q)]

    def offer(self, state: PQ, value: Optional[int], vertices: Sequence[int] = (),
              parts: Sequence[Tuple["MwEntry", PQ]] = ()) -> None:
        """Keep the candidate if it is strictly better; the first minimum wins."""
        if value is None:
            return
        current = self.values[state]
        if current is None or value < current:
            self.values[state] = value
            self.choices[state] = (tuple(vertices), tuple(parts))

    def witness(self, state: PQ) -> VertexSet:
        """The set W realising values[state]."""
        if self.values[state] is None:
            raise ContractViolation(f"No set realises state {state}", operation="MwEntry.witness")
        members: List[int] = []
        stack = [(self, state)]
        while stack:
            entry, current = stack.pop()
            vertices, parts = entry.choices[current]
            members.extend(vertices)
            stack.extend(parts)
        return tuple(sorted(members))

    def to_dict(self) -> Dict[str, Optional[int]]:
        return {f"{'T' if p else 'F'}{'T' if q else 'F'}": v for (p, q), v in self.values.items()}


@dataclass(frozen=True)
class MwResult:
    md: int
    witness: VertexSet
    width_used: int


def _operand_size(operand: Operand) -> int:
    return 1 if isinstance(operand, int) else operand.size


def _combine(kind: ModuleKind, a: Operand, b: Operand) -> MwEntry:
    """Entry of the disjoint union or join of two modules."""
    if isinstance(b, int) and not isinstance(a, int):
        a, b = b, a
    result = MwEntry(size=_operand_size(a) + _operand_size(b))
    union = kind == ModuleKind.UNION

    if isinstance(a, int) and isinstance(b, int):
        result.offer((False, True) if union else (True, False), 1, (a,))
        result.offer((False, False), 2, (a, b))
        return result

    if isinstance(a, int):
        w2 = b.values
        if union:
            # a sits at distance 2 from all of H2
            result.offer((True, True), w2[(True, False)], (), ((b, (True, False)),))
            result.offer((False, True), w2[(False, False)], (), ((b, (False, False)),))
            result.offer((False, True), _add(w2[(True, True)], 1), (a,), ((b, (True, True)),))
            result.offer((False, True), _add(w2[(False, True)], 1), (a,), ((b, (False, True)),))
            result.offer((False, False), _add(w2[(True, False)], 1), (a,), ((b, (True, False)),))
            result.offer((False, False), _add(w2[(False, False)], 1), (a,), ((b, (False, False)),))
        else:
            # a is adjacent to all of H2
            result.offer((True, True), w2[(False, True)], (), ((b, (False, True)),))
            result.offer((True, False), w2[(False, False)], (), ((b, (False, False)),))
            result.offer((True, False), _add(w2[(True, True)], 1), (a,), ((b, (True, True)),))
            result.offer((True, False), _add(w2[(True, False)], 1), (a,), ((b, (True, False)),))
            result.offer((False, False), _add(w2[(False, True)], 1), (a,), ((b, (False, True)),))
            result.offer((False, False), _add(w2[(False, False)], 1), (a,), ((b, (False, False)),))
        return result

    for s1, s2 in product(PQ_STATES, PQ_STATES):
        if union:
            if s1[1] and s2[1]:
                continue
            state = (False, s1[1] or s2[1])
        else:
            if s1[0] and s2[0]:
                continue
            state = (s1[0] or s2[0], False)
        result.offer(state, _add(a.values[s1], b.values[s2]), (), ((a, s1), (b, s2)))
    return result


def _fold(kind: ModuleKind, operands: Sequence[Operand]) -> Operand:
    acc = operands[0]
    for operand in operands[1:]:
        acc = _combine(kind, acc, operand)
    return acc


class _PrimeEnumerator:
    """
    Enumerates trivial subsets I (by size) and child state vectors (binary
    order) for a prime quotient, checking the split conditions.

    ``dist`` gives quotient distances: clamped to 1/2 inside a module, true
    quotient distances at the root.
    """

    def __init__(self, node: ModularNode, entries: Sequence[Optional[MwEntry]], dist: Callable[[int, int], int]):
        self.node = node
        self.entries = entries
        self.dist = dist
        self.count = len(node.children)
        self.trivial = [i for i, child in enumerate(node.children) if child.is_leaf]
        self.nontrivial = [i for i, child in enumerate(node.children) if not child.is_leaf]

    def _resolves(self, z: Sequence[int]) -> bool:
        seen = set()
        for v in range(self.count):
            vector = tuple(self.dist(r, v) for r in z)
            if vector in seen:
                return False
            seen.add(vector)
        return True

    def _separated(self, z: Sequence[int], i: int, j: int) -> bool:
        return any(self.dist(r, i) != self.dist(r, j) for r in z if r != i and r != j)

    def _splits_hold(self, z: Sequence[int], outside: Sequence[int], states: Dict[int, PQ]) -> bool:
        """A vertex uniformly at distance 1 (or 2) from its module's W must still be told apart."""
        for flag, bad in ((0, 1), (1, 2)):
            marked = [i for i in self.nontrivial if states[i][flag]]
            for i in marked:
                for j in outside:
                    if self.dist(i, j) == bad and not self._separated(z, i, j):
                        return False
            for i, j in combinations(marked, 2):
                if self.dist(i, j) == bad and not self._separated(z, i, j):
                    return False
        return True

    def _witness_exists(self, z: Sequence[int], outside: Sequence[int], states: Dict[int, PQ],
                        flag: int, target: int) -> bool:
        for i in outside:
            if all(self.dist(i, j) == target for j in z):
                return True
        for i in self.nontrivial:
            if states[i][flag] and all(self.dist(i, j) == target for j in z if j != i):
                return True
        return False

    def candidates(self):
        """Yield (value, I, states) for every combination meeting the split conditions."""
        children = self.node.children
        for size in range(len(self.trivial) + 1):
            for chosen in combinations(self.trivial, size):
                z = sorted(set(chosen) | set(self.nontrivial))
                if not self._resolves(z):
                    continue
                outside = [i for i in self.trivial if i not in chosen]
                for vector in product(PQ_STATES, repeat=len(self.nontrivial)):
                    states = dict(zip(self.nontrivial, vector))
                    value = _add(size, *(self.entries[i].values[states[i]] for i in self.nontrivial))
                    if value is None or not self._splits_hold(z, outside, states):
                        continue
                    vertices = tuple(children[i].vertex for i in chosen)
                    parts = tuple((self.entries[i], states[i]) for i in self.nontrivial)
                    yield value, z, outside, states, (vertices, parts)

    def entry(self) -> MwEntry:
        result = MwEntry(size=len(self.node.vertices))
        for value, z, outside, states, (vertices, parts) in self.candidates():
            p = self._witness_exists(z, outside, states, 0, 1)
            q = self._witness_exists(z, outside, states, 1, 2)
            result.offer((p, q), value, vertices, parts)
        return result


def _child_entries(node: ModularNode, entries: Dict[FrozenSet[int], MwEntry]) -> List[Optional[MwEntry]]:
    result: List[Optional[MwEntry]] = []
    for child in node.children:
        if child.is_leaf:
            result.append(None)
        elif child.vertices in entries:
            result.append(entries[child.vertices])
        else:
            raise ContractViolation(f"Missing entry for child module {sorted(child.vertices)}",
                                    operation="mw_table")
    return result


def _operands(node: ModularNode, children_entries: Sequence[Optional[MwEntry]]) -> List[Operand]:
    operands: List[Operand] = []
    for child, entry in zip(node.children, children_entries):
        if child.is_leaf:
            operands.append(child.vertex)
        elif entry is None:
            raise ContractViolation(f"Missing entry for child module {sorted(child.vertices)}",
                                    operation="mw_table")
        else:
            operands.append(entry)
    return operands


def mw_table(node: ModularNode, children_entries: Sequence[Optional[MwEntry]],
             d_quotient: Optional[DistanceMatrix] = None) -> MwEntry:
    """
    Entry of a module from its children's entries (None for singleton children).

    ``d_quotient`` is only read for prime nodes, where distances are clamped
    to 1 and 2 as in the module plus a universal vertex.
    """
    if node.is_leaf:
        raise ContractViolation("Single-vertex modules have no entry", operation="mw_table")
    if len(children_entries) != len(node.children):
        raise ContractViolation("One entry slot per child is required", operation="mw_table")
    if node.kind != ModuleKind.PRIME:
        operands = _operands(node, children_entries)
        return _fold(node.kind, operands)

    _operands(node, children_entries)
    rows = (d_quotient or all_pairs_distances(node.quotient_graph())).rows

    def clamped(i: int, j: int) -> int:
        return 0 if i == j else min(rows[i][j], 2)

    return _PrimeEnumerator(node, children_entries, clamped).entry()


def compute_entries(tree: ModularTree, include_root: bool = True) -> Dict[FrozenSet[int], MwEntry]:
    """Entries of every internal module, keyed by vertex set."""
    entries: Dict[FrozenSet[int], MwEntry] = {}
    for node in tree.internal_nodes():
        if node is tree.root and not include_root:
            continue
        entries[node.vertices] = mw_table(node, _child_entries(node, entries))
    return entries


def _root_join(a: Operand, b: Operand) -> Tuple[int, Choice]:
    if isinstance(b, int) and not isinstance(a, int):
        a, b = b, a
    if isinstance(a, int) and isinstance(b, int):
        return 1, ((min(a, b),), ())

    best: Optional[Tuple[int, Choice]] = None

    def offer(value: Optional[int], choice: Choice):
        nonlocal best
        if value is not None and (best is None or value < best[0]):
            best = (value, choice)

    if isinstance(a, int):
        w2 = b.values
        offer(w2[(False, True)], ((), ((b, (False, True)),)))
        offer(w2[(False, False)], ((), ((b, (False, False)),)))
        offer(_add(w2[(True, True)], 1), ((a,), ((b, (True, True)),)))
        offer(_add(w2[(True, False)], 1), ((a,), ((b, (True, False)),)))
    else:
        for s1, s2 in product(PQ_STATES, PQ_STATES):
            if s1[0] and s2[0]:
                continue
            offer(_add(a.values[s1], b.values[s2]), ((), ((a, s1), (b, s2))))
    if best is None:
        raise DecompositionError("Join root admits no resolving set")
    return best


def _expand(choice: Choice) -> VertexSet:
    vertices, parts = choice
    members = set(vertices)
    for entry, state in parts:
        members.update(entry.witness(state))
    return tuple(sorted(members))


@log_execution_time("solver", "md_from_tree")
def md_from_tree(tree: ModularTree) -> MwResult:
    """
    Metric dimension of the connected graph described by ``tree``, read from
    the tree alone.

    Raises NotConnectedError when the root is a union node.
    """
    root = tree.root
    if root.is_leaf:
        return MwResult(md=1, witness=(root.vertex,), width_used=tree.width)
    if root.kind == ModuleKind.UNION:
        raise NotConnectedError("The root module is a disjoint union", components=len(root.children))

    entries = compute_entries(tree, include_root=False)
    children_entries = _child_entries(root, entries)
    if root.kind == ModuleKind.JOIN:
        operands = _operands(root, children_entries)
        head = _fold(ModuleKind.JOIN, operands[:-1])
        md, choice = _root_join(head, operands[-1])
    else:
        rows = all_pairs_distances(root.quotient_graph()).rows
        enumerator = _PrimeEnumerator(root, children_entries, lambda i, j: rows[i][j])
        best = min(enumerator.candidates(), key=lambda item: item[0], default=None)
        if best is None:
            raise DecompositionError("Prime root admits no resolving set")
        md, choice = best[0], best[4]

    witness = _expand(choice)
    solver_logger.info(f"Modular DP: md={md}, witness={witness}, width {tree.width}")
    return MwResult(md=md, witness=witness, width_used=tree.width)


def md_modular(g: Graph, tree: Optional[ModularTree] = None) -> MwResult:
    """md_from_tree after checking that g is connected and ``tree`` decomposes it."""
    if not is_connected(g):
        raise NotConnectedError("md_modular requires a connected graph")
    tree = tree or modular_decompose(g)
    if tree.root.vertices != frozenset(g.vertices()):
        raise DecompositionError("Modular tree does not cover the graph's vertices")
    result = md_from_tree(tree)
    if len(result.witness) != result.md:
        raise ContractViolation(f"Witness {result.witness} has the wrong size for md={result.md}",
                                operation="md_modular")
    return result


def verify_module_distance_identity(g: Graph, tree: ModularTree,
                                    d: Optional[DistanceMatrix] = None) -> List[Dict[str, object]]:
    """
    Check that vertices in distinct child modules are as far apart as their
    quotient vertices: quotient distances at the root, 1 or 2 elsewhere.
    Returns the violations found.
    """
    d = d or all_pairs_distances(g)
    violations: List[Dict[str, object]] = []
    for node in tree.internal_nodes():
        quotient = node.quotient_graph()
        qd = all_pairs_distances(quotient)
        for i, j in combinations(range(len(node.children)), 2):
            if node is tree.root:
                expected = qd.dist(i, j)
                reachable = expected < qd.sentinel
            else:
                expected = 1 if quotient.has_edge(i, j) else 2
                reachable = True
            for x in sorted(node.children[i].vertices):
                for y in sorted(node.children[j].vertices):
                    if node is tree.root:
                        actual = d.dist(x, y)
                        ok = (actual == expected) if reachable else actual >= d.sentinel
                    else:
                        actual = 1 if g.has_edge(x, y) else 2
                        ok = actual == expected
                    if not ok:
                        violations.append({'module': sorted(node.vertices), 'pair': [x, y],
                                           'graph_distance': actual, 'quotient_distance': expected})
    return violations


def modules_resolved_by(g: Graph, tree: ModularTree, witness: VertexSet) -> List[FrozenSet[int]]:
    """
    Proper modules of size >= 2 that witness ∩ module fails to resolve in
    module plus a universal vertex.
    """
    failing: List[FrozenSet[int]] = []
    members = set(witness)
    for node in tree.internal_nodes():
        if node is tree.root:
            continue
        sub, original = g.induced_subgraph(node.vertices)
        hub = sub.vertex_count
        augmented = Graph.from_edges(hub + 1, sub.edges() + [(v, hub) for v in range(hub)])
        local = [i for i, v in enumerate(original) if v in members]
        d = all_pairs_distances(augmented)
        vectors = {tuple(d.dist(z, x) for z in local) for x in range(hub)}
        if len(vectors) != hub:
            failing.append(node.vertices)
    return failing
