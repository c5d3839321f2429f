"""
Exact metric dimension over a nice tree decomposition of bounded length on a
graph of bounded degree.

For a root vertex u, the table at node i maps a key

    (Z, outside, far)

to the least |W ∩ V(G_i)| over the sets W containing u that

  - agree with Z on Y_i (the bags at most ``radius`` levels below i),
  - have ``outside`` as the profiles on X_i of their members outside G_i,
  - have ``far[j]`` as the profiles on X_j of their members strictly below
    j, for every node j exactly ``radius`` levels below i,

and resolve every pair of V(G_i) that the locality argument does not leave
to u or to a far member. The metric dimension is the least root entry over
all choices of u.

Outside profiles range over realizable ones only (projections of vertices
actually outside G_i), and keys with value + |outside| above the budget are
dropped; neither affects the result.
"""
import math
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)

from decomp.nice import NiceTreeDecomposition, NodeKind, make_nice
from decomp.tree_decomposition import TreeDecomposition, bag_length
from graphs.graph import (
    DistanceMatrix,
    Graph,
    VertexSet,
    all_pairs_distances,
    is_resolving_set,
    require_connected,
)
from solvers.oracle import degree_lower_bound
from solvers.profiles import OrderedPartition, ProfileSet, cover, profile_value, project, sorted_profiles
from utils.config_loader import SolverConfig
from utils.custom_exceptions import (
    BudgetExceededError,
    ConfigurationError,
    ContractViolation,
    DecompositionError,
)
from utils.logger import log_context, log_execution_time, solver_logger

NiceFactory = Callable[[int], NiceTreeDecomposition]
FarProfiles = Tuple[Tuple[int, ProfileSet], ...]


def alpha(max_degree: int, length: int) -> int:
    """Bound on the bags a vertex occupies along one root-to-leaf path: 2(Δ^ℓ(Δ+2)+4)."""
    if max_degree < 1 or length < 1:
        raise ContractViolation(f"alpha needs Δ >= 1 and ℓ >= 1, got ({max_degree}, {length})",
                                operation="alpha")
    return 2 * (max_degree ** length * (max_degree + 2) + 4)


def width_bound(max_degree: int, length: int) -> int:
    """Width bound Δ(Δ-1)^(ℓ-1) of a length-ℓ decomposition."""
    if max_degree < 2 or length < 1:
        raise ContractViolation(f"width_bound needs Δ >= 2 and ℓ >= 1, got ({max_degree}, {length})",
                                operation="width_bound")
    return max_degree * (max_degree - 1) ** (length - 1)


def locality_radius(max_degree: int, length: int) -> int:
    """alpha(Δ, ℓ)·(2ℓ+1): tree distance beyond which only u and far members matter."""
    return alpha(max_degree, length) * (2 * length + 1)


@dataclass(frozen=True)
class TlConfig:
    budget_k: Optional[int] = None
    radius_override: Optional[int] = None
    table_ceiling: int = 2_000_000

    def __post_init__(self):
        if self.budget_k is not None and self.budget_k < 1:
            raise ConfigurationError(f"budget_k must be at least 1: {self.budget_k}", config_key="budget_k")
        if self.radius_override is not None and self.radius_override < 1:
            raise ConfigurationError(f"radius override must be at least 1: {self.radius_override}",
                                     config_key="radius_override")
        if self.table_ceiling < 1:
            raise ConfigurationError("table_ceiling must be positive", config_key="table_ceiling")

    @classmethod
    def from_solver_config(cls, config: SolverConfig, **overrides) -> "TlConfig":
        values = {'budget_k': config.budget_k, 'radius_override': config.radius_override,
                  'table_ceiling': config.table_ceiling}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class TableKey(NamedTuple):
    z: FrozenSet[int]
    outside: ProfileSet
    far: FarProfiles


@dataclass(frozen=True)
class TableEntry:
    value: int
    # predecessor keys, one per child node
    back: Tuple[TableKey, ...] = ()


@dataclass
class TlStats:
    max_degree: int
    length: int
    radius: int
    locality_bound: int
    radius_overridden: bool
    lower_bound: int
    runs: int = 0
    # root hits whose witness failed to resolve under a sub-bound radius
    rejected_witnesses: int = 0
    elapsed_seconds: float = 0.0
    nodes: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def correctness_guaranteed(self) -> bool:
        return self.radius >= self.locality_bound

    def to_dict(self) -> Dict[str, Any]:
        return {
            'max_degree': self.max_degree,
            'length': self.length,
            'radius': self.radius,
            'locality_bound': self.locality_bound,
            'radius_overridden': self.radius_overridden,
            'correctness_guaranteed': self.correctness_guaranteed,
            'lower_bound': self.lower_bound,
            'runs': self.runs,
            'rejected_witnesses': self.rejected_witnesses,
            'elapsed_seconds': round(self.elapsed_seconds, 6),
            'nodes': list(self.nodes),
        }


@dataclass(frozen=True)
class TlResult:
    md: int
    witness: VertexSet
    stats: TlStats


def _bits(items: Sequence[Any], predicate: Callable[[Any], bool]) -> int:
    mask = 0
    for index, item in enumerate(items):
        if predicate(item):
            mask |= 1 << index
    return mask


class TlContext:
    """
    Node geometry, projections and resolution masks for one nice
    decomposition rooted at u. Independent of the budget, so shared by all
    budgets tried for that root.
    """

    def __init__(self, nice: NiceTreeDecomposition, d: DistanceMatrix, depth: int, radius: int):
        if radius < 1:
            raise ContractViolation(f"Radius must be at least 1, got {radius}", operation="TlContext")
        self.nice = nice
        self.d = d
        self.depth = depth
        self.radius = radius
        self.root_vertex = nice.root_vertex
        self._projections: Dict[Tuple[int, FrozenSet[int]], OrderedPartition] = {}
        self._covers: Dict[Tuple[OrderedPartition, FrozenSet[int]], OrderedPartition] = {}
        self._values: Dict[Tuple[OrderedPartition, int], int] = {}
        self._cache: Dict[Tuple[Any, ...], Any] = {}

    def _memo(self, key: Tuple[Any, ...], compute: Callable[[], Any]) -> Any:
        if key not in self._cache:
            self._cache[key] = compute()
        return self._cache[key]

    def project(self, v: int, bag: FrozenSet[int]) -> OrderedPartition:
        key = (v, bag)
        if key not in self._projections:
            self._projections[key] = project(self.d, v, bag, self.depth)
        return self._projections[key]

    def cover(self, part: OrderedPartition, bag: FrozenSet[int]) -> OrderedPartition:
        key = (part, bag)
        if key not in self._covers:
            self._covers[key] = cover(self.d, part, bag, self.depth)
        return self._covers[key]

    def value(self, part: OrderedPartition, x: int) -> int:
        key = (part, x)
        if key not in self._values:
            self._values[key] = profile_value(self.d, part, x)
        return self._values[key]

    # geometry

    def y_vertices(self, i: int) -> FrozenSet[int]:
        """Y_i: union of the bags at most radius levels below i."""
        return self._memo(('y', i), lambda: frozenset().union(
            *(self.nice.bag(j) for j in self.nice.subtree_nodes(i, self.radius))))

    def far_nodes(self, i: int) -> Tuple[int, ...]:
        """I_i: nodes exactly radius levels below i."""
        return self._memo(('far', i), lambda: tuple(self.nice.nodes_at_offset(i, self.radius)))

    def near_nodes(self, i: int) -> Tuple[int, ...]:
        """J_i: nodes exactly radius - 1 levels below i."""
        return self._memo(('near', i), lambda: tuple(self.nice.nodes_at_offset(i, self.radius - 1)))

    def strictly_below(self, j: int) -> FrozenSet[int]:
        return self.nice.subtree_vertices[j] - self.nice.bag(j)

    def outside_real(self, i: int) -> ProfileSet:
        """Profiles on X_i of the vertices outside G_i."""
        def compute():
            bag = self.nice.bag(i)
            inside = self.nice.subtree_vertices[i]
            return frozenset(self.project(w, bag) for w in range(self.d.n) if w not in inside)
        return self._memo(('outside', i), compute)

    def forced(self, i: int) -> Optional[OrderedPartition]:
        """The profile of u on X_i when u lies outside G_i."""
        bag = self.nice.bag(i)
        if self.root_vertex in bag:
            return None
        return self.project(self.root_vertex, bag)

    def fibers(self, i: int, child: int) -> Dict[OrderedPartition, Tuple[OrderedPartition, ...]]:
        """Realizable outside profiles of i grouped by their cover onto the child's bag."""
        def compute():
            child_bag = self.nice.bag(child)
            groups: Dict[OrderedPartition, List[OrderedPartition]] = {}
            for part in sorted_profiles(self.outside_real(i)):
                groups.setdefault(self.cover(part, child_bag), []).append(part)
            return {image: tuple(parts) for image, parts in groups.items()}
        return self._memo(('fibers', i, child), compute)

    def build_r(self, i: int, z: FrozenSet[int], far: FarProfiles) -> FarProfiles:
        """Far profiles one level up: from the nodes radius below i to those radius - 1 below."""
        given = dict(far)
        if set(given) != set(self.far_nodes(i)):
            raise ContractViolation(f"Far profiles keyed by {sorted(given)}, expected {list(self.far_nodes(i))}",
                                    operation="build_r", node=i)
        result = []
        for j in self.near_nodes(i):
            node = self.nice.node(j)
            if node.kind == NodeKind.LEAF:
                profiles: ProfileSet = frozenset()
            elif node.kind == NodeKind.JOIN:
                left, right = node.children
                profiles = given[left] | given[right]
            else:
                (child,) = node.children
                lifted = {self.cover(part, node.bag) for part in given[child]}
                if node.kind == NodeKind.FORGET and node.vertex in z:
                    # projected onto the bag of j, the node that forgets v
                    lifted.add(self.project(node.vertex, node.bag))
                profiles = frozenset(lifted)
            result.append((j, profiles))
        return tuple(result)

    def join_summary(self, child: int, parent_bag: FrozenSet[int],
                     key: TableKey) -> Tuple[ProfileSet, FarProfiles]:
        """Profiles on the join bag of the child's members off the bag, and the child's lifted far profiles."""
        inner = {self.cover(part, parent_bag) for _, parts in key.far for part in parts}
        inner.update(self.project(v, parent_bag) for v in key.z - parent_bag)
        return frozenset(inner), self.build_r(child, key.z, key.far)

    # resolution masks for the introduce condition: bit x set when x and v are told apart

    def introduce_targets(self, i: int) -> Tuple[int, ...]:
        v = self.nice.node(i).vertex
        return self._memo(('itargets', i), lambda: tuple(sorted(self.y_vertices(i) - {v})))

    def introduce_vertex_mask(self, i: int, w: int) -> int:
        v = self.nice.node(i).vertex
        rows = self.d.rows
        return self._memo(('ivertex', i, w), lambda: _bits(self.introduce_targets(i),
                                                           lambda x: rows[w][x] != rows[w][v]))

    def introduce_profile_mask(self, i: int, part: OrderedPartition) -> int:
        v = self.nice.node(i).vertex
        return self._memo(('iprofile', i, part), lambda: _bits(
            self.introduce_targets(i), lambda x: self.value(part, x) != self.value(part, v)))

    # resolution masks for the join condition over pairs (x, y) split by the bag

    def join_pairs(self, i: int) -> Tuple[Tuple[int, int], ...]:
        def compute():
            bag = self.nice.bag(i)
            left, right = self.nice.children(i)
            xs = sorted(self.nice.subtree_vertices[left] - bag)
            ys = sorted(self.nice.subtree_vertices[right] - bag)
            return tuple((x, y) for x in xs for y in ys)
        return self._memo(('pairs', i), compute)

    def join_vertex_mask(self, i: int, w: int) -> int:
        rows = self.d.rows
        return self._memo(('jvertex', i, w), lambda: _bits(
            self.join_pairs(i), lambda pair: rows[w][pair[0]] != rows[w][pair[1]]))

    def join_profile_mask(self, i: int, part: OrderedPartition) -> int:
        return self._memo(('jprofile', i, part), lambda: _bits(
            self.join_pairs(i), lambda pair: self.value(part, pair[0]) != self.value(part, pair[1])))

    def join_far_mask(self, i: int, j: int, part: OrderedPartition) -> int:
        deep = self.strictly_below(j)
        return self._memo(('jfar', i, j, part), lambda: _bits(
            self.join_pairs(i),
            lambda pair: (pair[0] not in deep and pair[1] not in deep
                          and self.value(part, pair[0]) != self.value(part, pair[1]))))

    def join_deep_mask(self, i: int, j: int) -> int:
        deep = self.strictly_below(j)
        return self._memo(('jdeep', i, j), lambda: _bits(
            self.join_pairs(i), lambda pair: pair[0] in deep or pair[1] in deep))

    def key_order(self, key: TableKey) -> Tuple[Any, ...]:
        return (
            len(key.z),
            tuple(sorted(key.z)),
            tuple(p.sort_key() for p in sorted_profiles(key.outside)),
            tuple((j, tuple(p.sort_key() for p in sorted_profiles(parts))) for j, parts in key.far),
        )

    def key_bound(self, i: int, budget: int) -> int:
        """Upper estimate of the keys at node i: members of Z, outside and far sets total at most budget."""
        def compute():
            slots = len(self.y_vertices(i)) + len(self.outside_real(i))
            for j in self.far_nodes(i):
                bag = self.nice.bag(j)
                slots += len({self.project(w, bag) for w in self.strictly_below(j)})
            return slots
        slots = self._memo(('slots', i), compute)
        return sum(math.comb(slots, t) for t in range(min(budget, slots) + 1))


def _subset_choices(groups: Sequence[Tuple[Tuple[OrderedPartition, ...], Optional[OrderedPartition]]],
                    budget: int) -> Iterator[FrozenSet[OrderedPartition]]:
    """One non-empty subset per group, each holding its required member, total size <= budget."""
    if not groups:
        yield frozenset()
        return
    (fiber, required), rest = groups[0], groups[1:]
    for size in range(1, len(fiber) + 1):
        if size + len(rest) > budget:
            break
        for subset in combinations(fiber, size):
            if required is not None and required not in subset:
                continue
            for tail in _subset_choices(rest, budget - size):
                yield frozenset(subset) | tail


class _TableRun:
    """Bottom-up table computation for one root vertex and one budget."""

    def __init__(self, ctx: TlContext, budget: int):
        self.ctx = ctx
        self.nice = ctx.nice
        self.budget = budget
        self.u = ctx.root_vertex
        self.tables: Dict[int, Dict[TableKey, TableEntry]] = {}
        self.node_stats: List[Dict[str, Any]] = []
        self._candidates = 0

    def check_budget(self, ceiling: int) -> None:
        for i in self.nice.postorder():
            bound = self.ctx.key_bound(i, self.budget)
            if bound > ceiling:
                raise BudgetExceededError(
                    f"Table at node {i} may hold {bound} keys, above the ceiling {ceiling}",
                    node=i, bound=bound, ceiling=ceiling, budget_k=self.budget)

    def _relax(self, table: Dict[TableKey, TableEntry], key: TableKey, value: int,
               back: Tuple[TableKey, ...]) -> None:
        self._candidates += 1
        current = table.get(key)
        if current is None or value < current.value:
            table[key] = TableEntry(value, back)

    def _ordered(self, table: Dict[TableKey, TableEntry]) -> List[Tuple[TableKey, TableEntry]]:
        return sorted(table.items(), key=lambda item: (item[1].value, self.ctx.key_order(item[0])))

    def _preimages(self, i: int, child: int, target: ProfileSet,
                   budget: int) -> Iterator[FrozenSet[OrderedPartition]]:
        """Outside profile sets of i whose covers onto the child's bag are exactly target."""
        if len(target) > budget:
            return
        fibers = self.ctx.fibers(i, child)
        forced = self.ctx.forced(i)
        groups = []
        forced_placed = forced is None
        for image in sorted_profiles(target):
            fiber = fibers.get(image)
            if not fiber:
                return
            required = forced if forced is not None and forced in fiber else None
            forced_placed = forced_placed or required is not None
            groups.append((fiber, required))
        if not forced_placed:
            return
        yield from _subset_choices(groups, budget)

    def _outside_subsets(self, base: ProfileSet, optional: ProfileSet, budget: int) -> Iterator[ProfileSet]:
        extras = sorted_profiles(optional)
        for size in range(0, min(budget, len(extras)) + 1):
            for extra in combinations(extras, size):
                yield base | frozenset(extra)

    def leaf(self, i: int) -> Dict[TableKey, TableEntry]:
        x = self.nice.node(i).vertex
        table: Dict[TableKey, TableEntry] = {}
        forced = self.ctx.forced(i)
        base = frozenset() if forced is None else frozenset({forced})
        optional = self.ctx.outside_real(i) - base
        choices = [frozenset({x})] if x == self.u else [frozenset(), frozenset({x})]
        for z in choices:
            budget = self.budget - len(z) - len(base)
            if budget < 0:
                continue
            for outside in self._outside_subsets(base, optional, budget):
                self._relax(table, TableKey(z, outside, ()), len(z), ())
        return table

    def introduce(self, i: int, child_table: Dict[TableKey, TableEntry]) -> Dict[TableKey, TableEntry]:
        node = self.nice.node(i)
        v, (child,) = node.vertex, node.children
        y_i = self.ctx.y_vertices(i)
        child_bag = self.nice.bag(child)
        targets = self.ctx.introduce_targets(i)
        full = (1 << len(targets)) - 1
        table: Dict[TableKey, TableEntry] = {}

        for key, entry in self._ordered(child_table):
            far = self.ctx.build_r(child, key.z, key.far)
            z_kept = key.z & y_i

            # v stays out of W; every x in Y_i must still be told apart from v
            if v != self.u:
                fixed = 0
                for w in z_kept:
                    fixed |= self.ctx.introduce_vertex_mask(i, w)
                for _, parts in far:
                    for part in parts:
                        fixed |= self.ctx.introduce_profile_mask(i, part)
                for outside in self._preimages(i, child, key.outside, self.budget - entry.value):
                    mask = fixed
                    for part in outside:
                        mask |= self.ctx.introduce_profile_mask(i, part)
                    if mask == full:
                        self._relax(table, TableKey(z_kept, outside, far), entry.value, (key,))

            # v joins W
            if entry.value + 1 <= self.budget and len(z_kept) <= self.budget - 1:
                z_grown = z_kept | {v}
                without_v = key.outside - {self.ctx.project(v, child_bag)}
                targets = [key.outside] if without_v == key.outside else [key.outside, without_v]
                for target in targets:
                    for outside in self._preimages(i, child, target, self.budget - entry.value - 1):
                        self._relax(table, TableKey(z_grown, outside, far), entry.value + 1, (key,))
        return table

    def forget(self, i: int, child_table: Dict[TableKey, TableEntry]) -> Dict[TableKey, TableEntry]:
        (child,) = self.nice.children(i)
        y_i = self.ctx.y_vertices(i)
        table: Dict[TableKey, TableEntry] = {}
        for key, entry in self._ordered(child_table):
            far = self.ctx.build_r(child, key.z, key.far)
            z_kept = key.z & y_i
            for outside in self._preimages(i, child, key.outside, self.budget - entry.value):
                self._relax(table, TableKey(z_kept, outside, far), entry.value, (key,))
        return table

    def join(self, i: int, left_table: Dict[TableKey, TableEntry],
             right_table: Dict[TableKey, TableEntry]) -> Dict[TableKey, TableEntry]:
        bag = self.nice.bag(i)
        left, right = self.nice.children(i)
        y_i = self.ctx.y_vertices(i)
        real = self.ctx.outside_real(i)
        forced = self.ctx.forced(i)
        full = (1 << len(self.ctx.join_pairs(i))) - 1
        table: Dict[TableKey, TableEntry] = {}

        right_by_core: Dict[FrozenSet[int], List[Tuple[TableKey, TableEntry]]] = {}
        for key, entry in self._ordered(right_table):
            right_by_core.setdefault(key.z & bag, []).append((key, entry))
        summaries: Dict[Tuple[int, TableKey], Tuple[ProfileSet, FarProfiles]] = {}

        def summary(child: int, key: TableKey) -> Tuple[ProfileSet, FarProfiles]:
            if (child, key) not in summaries:
                summaries[(child, key)] = self.ctx.join_summary(child, bag, key)
            return summaries[(child, key)]

        for key_a, entry_a in self._ordered(left_table):
            core = key_a.z & bag
            for key_b, entry_b in right_by_core.get(core, ()):
                value = entry_a.value + entry_b.value - len(core)
                if value > self.budget:
                    continue
                inner_a, far_a = summary(left, key_a)
                inner_b, far_b = summary(right, key_b)
                # each side sees the other's members as outside
                if not inner_b <= key_a.outside or not inner_a <= key_b.outside:
                    continue
                common = key_a.outside & key_b.outside
                base = (key_a.outside - inner_b) | (key_b.outside - inner_a)
                if not base <= common or not base <= real:
                    continue
                optional = (common - base) & real
                if forced is not None and forced not in base:
                    if forced not in optional:
                        continue
                    base, optional = base | {forced}, optional - {forced}
                room = self.budget - value - len(base)
                if room < 0:
                    continue

                z = (key_a.z | key_b.z) & y_i
                far = tuple(sorted(far_a + far_b))
                fixed = 0
                for w in z:
                    fixed |= self.ctx.join_vertex_mask(i, w)
                for part in base:
                    fixed |= self.ctx.join_profile_mask(i, part)
                for j, parts in far:
                    if parts:
                        fixed |= self.ctx.join_deep_mask(i, j)
                    for part in parts:
                        fixed |= self.ctx.join_far_mask(i, j, part)

                for outside in self._outside_subsets(base, optional, room):
                    mask = fixed
                    for part in outside - base:
                        mask |= self.ctx.join_profile_mask(i, part)
                    if mask == full:
                        self._relax(table, TableKey(z, outside, far), value, (key_a, key_b))
        return table

    def run(self) -> Optional[Tuple[int, VertexSet]]:
        """Fill every table; the least root entry containing u and its witness, or None."""
        for i in self.nice.postorder():
            node = self.nice.node(i)
            self._candidates = 0
            if node.kind == NodeKind.LEAF:
                table = self.leaf(i)
            elif node.kind == NodeKind.INTRODUCE:
                table = self.introduce(i, self.tables[node.children[0]])
            elif node.kind == NodeKind.FORGET:
                table = self.forget(i, self.tables[node.children[0]])
            else:
                table = self.join(i, self.tables[node.children[0]], self.tables[node.children[1]])
            self.tables[i] = table
            self.node_stats.append({
                'root_vertex': self.u,
                'budget_k': self.budget,
                'node': i,
                'kind': node.kind.value,
                'bag_size': len(node.bag),
                'keys': self._candidates,
                'finite_entries': len(table),
            })
            if not table:
                return None

        return next(self.root_candidates(), None)

    def root_candidates(self) -> Iterator[Tuple[int, VertexSet]]:
        """Root entries containing u, least value first, each with its reconstructed witness."""
        finals = [(entry.value, tuple(sorted(key.z)), key) for key, entry in self.tables[self.nice.root].items()
                  if self.u in key.z and entry.value <= self.budget]
        for value, _, key in sorted(finals, key=lambda item: (item[0], item[1])):
            yield value, self._witness(key)

    def _witness(self, root_key: TableKey) -> VertexSet:
        members = set()
        stack = [(self.nice.root, root_key)]
        while stack:
            i, key = stack.pop()
            members |= key.z
            entry = self.tables[i][key]
            stack.extend(zip(self.nice.children(i), entry.back))
        return tuple(sorted(members))


def compute_tables(nice: NiceTreeDecomposition, d: DistanceMatrix, budget: int, radius: int,
                   depth: Optional[int] = None) -> Dict[int, Dict[TableKey, TableEntry]]:
    """All node tables for the root vertex of ``nice`` under one budget."""
    if depth is None:
        depth = max(1, bag_length(d, (node.bag for node in nice.nodes)))
    run = _TableRun(TlContext(nice, d, depth, radius), budget)
    run.run()
    return run.tables


def nice_factory_from_td(g: Graph, td: TreeDecomposition, d: Optional[DistanceMatrix] = None) -> NiceFactory:
    """Provider of nice decompositions rooted at each vertex, built once per root."""
    d = d or all_pairs_distances(g)
    cache: Dict[int, NiceTreeDecomposition] = {}

    def factory(root_vertex: int) -> NiceTreeDecomposition:
        if root_vertex not in cache:
            cache[root_vertex] = make_nice(g, td, root_vertex, d)
        return cache[root_vertex]
    return factory


def build_r(nice: NiceTreeDecomposition, d: DistanceMatrix, i: int, z: Iterable[int],
            profiles: Mapping[int, Iterable[OrderedPartition]], radius: int,
            depth: Optional[int] = None) -> Dict[int, ProfileSet]:
    """
    Lift far profiles of node i, keyed by the nodes radius levels below it,
    to the nodes radius - 1 levels below it.

    A leaf gets no profiles, an introduce or forget node the covers of its
    child's profiles onto its bag (plus the forgotten vertex's projection when
    it belongs to z), a join node the union of its children's profiles.
    """
    if depth is None:
        depth = max(1, bag_length(d, (node.bag for node in nice.nodes)))
    ctx = TlContext(nice, d, depth, radius)
    far = tuple(sorted((j, frozenset(parts)) for j, parts in profiles.items()))
    return dict(ctx.build_r(i, frozenset(z), far))


@log_execution_time("solver", "solve_tl")
def solve_tl(g: Graph, nice_factory: NiceFactory, config: Optional[TlConfig] = None,
             d: Optional[DistanceMatrix] = None) -> TlResult:
    """
    Metric dimension and a least witness by iterative deepening on the budget.

    Budgets run from the degree lower bound to ``config.budget_k`` (n - 1 when
    unset); within a budget root vertices are tried in ascending order and the
    first success wins. Raises BudgetExceededError when no budget up to the
    cap succeeds or a table bound exceeds ``config.table_ceiling``.

    With a radius below the locality bound the tables may accept sets that do
    not resolve. Such a run skips root entries whose witness fails the check
    and returns only verified witnesses, so its md is an upper bound. At or
    above the bound a failed witness raises ContractViolation.
    """
    config = config or TlConfig()
    require_connected(g, "solve_tl")
    started = time.perf_counter()
    d = d or all_pairs_distances(g)
    max_degree = g.max_degree()

    if g.vertex_count == 1:
        stats = TlStats(max_degree=0, length=0, radius=1, locality_bound=1,
                        radius_overridden=False, lower_bound=1)
        return TlResult(md=1, witness=(0,), stats=stats)

    first = nice_factory(0)
    length = max(1, bag_length(d, (node.bag for node in first.nodes)))
    locality_bound = locality_radius(max_degree, length)
    radius = config.radius_override or locality_bound
    if config.radius_override is not None and config.radius_override < locality_bound:
        solver_logger.warning(f"Locality radius {radius} is below {locality_bound}; "
                              f"correctness not guaranteed")

    lower = degree_lower_bound(max_degree)
    cap = g.vertex_count - 1 if config.budget_k is None else min(config.budget_k, g.vertex_count - 1)
    stats = TlStats(max_degree=max_degree, length=length, radius=radius, locality_bound=locality_bound,
                    radius_overridden=config.radius_override is not None, lower_bound=lower)

    contexts: Dict[int, TlContext] = {}
    for budget in range(lower, cap + 1):
        for u in g.vertices():
            if u not in contexts:
                nice = nice_factory(u)
                if nice.root_vertex != u or nice.vertex_count != g.vertex_count:
                    raise DecompositionError(f"Nice decomposition for root {u} is rooted at {nice.root_vertex}",
                                             vertex=u)
                contexts[u] = TlContext(nice, d, length, radius)
            run = _TableRun(contexts[u], budget)
            run.check_budget(config.table_ceiling)
            with log_context("solver", root_vertex=u, budget_k=budget) as log:
                outcome = run.run()
                log.debug(f"{len(run.node_stats)} tables, root {'hit' if outcome else 'miss'}")
            stats.runs += 1
            stats.nodes.extend(run.node_stats)
            if outcome is None:
                continue

            md, witness = outcome
            if len(witness) != md or not is_resolving_set(g, d, witness):
                if stats.correctness_guaranteed:
                    raise ContractViolation(f"Reconstructed witness {witness} does not certify md={md}",
                                            operation="solve_tl")
                stats.rejected_witnesses += 1
                outcome = next(((size, found) for size, found in run.root_candidates()
                                if len(found) == size and is_resolving_set(g, d, found)), None)
                if outcome is None:
                    solver_logger.debug(f"Root vertex {u}: no verified witness at radius {radius}")
                    continue
                md, witness = outcome
            stats.elapsed_seconds = time.perf_counter() - started
            solver_logger.info(f"Tree-length DP: md={md}, witness={witness}, root vertex {u}")
            return TlResult(md=md, witness=witness, stats=stats)

    raise BudgetExceededError(f"No resolving set of size <= {cap} found", budget_k=cap)
