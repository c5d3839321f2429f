"""
Ground-truth metric dimension: exhaustive search, the closed form for trees,
and an exhaustive evaluator for the module tables of the modular solver.
"""
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from graphs.graph import (
    DistanceMatrix,
    Graph,
    VertexSet,
    all_pairs_distances,
    is_connected,
    is_resolving_set,
    require_connected,
)
from utils.custom_exceptions import BudgetExceededError, GraphValidationError
from utils.logger import log_execution_time, solver_logger

PQ = Tuple[bool, bool]
PQ_STATES: Tuple[PQ, ...] = ((False, False), (False, True), (True, False), (True, True))


@dataclass(frozen=True)
class MdResult:
    md: int
    witness: VertexSet


def degree_lower_bound(max_degree: int) -> int:
    """
    Smallest k >= 1 with max_degree <= 3^k - 1.

    Neighbours of a vertex differ from it by -1, 0 or +1 in every coordinate
    of their distance vectors and no two of them share a vector, so this
    bound holds for every resolving set.
    """
    k = 1
    while 3 ** k - 1 < max_degree:
        k += 1
    return k


def degree_bound_holds(max_degree: int, md: int) -> bool:
    """The tighter max_degree <= 2^md + md - 1; reported per instance, not relied on."""
    return max_degree <= 2 ** md + md - 1


def neighbour_bound_holds(max_degree: int, md: int) -> bool:
    return max_degree <= 3 ** md - 1


def _search_size(d: DistanceMatrix, k: int, xs: np.ndarray, ys: np.ndarray) -> Optional[VertexSet]:
    """Lexicographically least k-subset resolving every (xs[i], ys[i]) pair, or None."""
    n = d.n
    dist = d.array
    chosen = []
    # stack of (next candidate, pair arrays before choosing it)
    stack = [(0, xs, ys)]
    while stack:
        start, cur_x, cur_y = stack[-1]
        depth = len(stack) - 1
        if start > n - (k - depth):
            stack.pop()
            if chosen:
                chosen.pop()
            continue
        stack[-1] = (start + 1, cur_x, cur_y)
        row = dist[start]
        keep = row[cur_x] == row[cur_y]
        next_x, next_y = cur_x[keep], cur_y[keep]
        if depth + 1 == k:
            if next_x.size == 0:
                return tuple(chosen) + (start,)
            continue
        chosen.append(start)
        stack.append((start + 1, next_x, next_y))
    return None


@log_execution_time("solver", "metric_dimension_bruteforce")
def metric_dimension_bruteforce(g: Graph, d: Optional[DistanceMatrix] = None,
                                budget: Optional[int] = None) -> MdResult:
    """
    Smallest resolving set by enumeration: sizes ascend, subsets are
    lexicographic within a size, so the witness is the least one.

    md(K1) is 1 with witness {0}. Raises BudgetExceededError when no set of
    size <= budget resolves.
    """
    require_connected(g, "metric_dimension_bruteforce")
    if g.vertex_count == 1:
        return MdResult(md=1, witness=(0,))
    d = d or all_pairs_distances(g)

    xs, ys = np.triu_indices(g.vertex_count, k=1)
    limit = g.vertex_count - 1 if budget is None else min(budget, g.vertex_count - 1)
    for k in range(1, limit + 1):
        witness = _search_size(d, k, xs, ys)
        if witness is not None:
            solver_logger.debug(f"Brute force: md={k}, witness={witness}")
            return MdResult(md=k, witness=witness)
    raise BudgetExceededError(f"No resolving set of size <= {budget}", budget_k=budget)


def tree_metric_dimension(g: Graph) -> int:
    """Leaves minus exterior major vertices; 1 for paths."""
    if g.vertex_count < 2 or g.m != g.vertex_count - 1 or not is_connected(g):
        raise GraphValidationError("tree_metric_dimension requires a tree with at least 2 vertices",
                                   n=g.vertex_count, m=g.m)
    if g.max_degree() <= 2:
        return 1

    leaves = [v for v in g.vertices() if g.degree(v) == 1]
    exterior_major = set()
    for leaf in leaves:
        previous, current = leaf, g.neighbors(leaf)[0]
        while g.degree(current) == 2:
            a, b = g.neighbors(current)
            previous, current = current, (b if a == previous else a)
        if g.degree(current) >= 3:
            exterior_major.add(current)
    return len(leaves) - len(exterior_major)


def verify_witness(g: Graph, claimed_md: int, witness: Iterable[int]) -> bool:
    """True iff witness is a resolving set of exactly claimed_md vertices."""
    members = set(witness)
    if len(members) != claimed_md or not is_connected(g):
        return False
    if any(not 0 <= v < g.vertex_count for v in members):
        return False
    return is_resolving_set(g, all_pairs_distances(g), members)


def augmented_table_bruteforce(h: Graph) -> Dict[PQ, Optional[int]]:
    """
    Minimum |W|, W a subset of V(H), per (p, q) where, in H plus a universal
    vertex, W resolves V(H), p says some vertex of H is at distance 1 from
    all of W and q says some vertex of H is at distance 2 from all of W.

    None stands for no such W.
    """
    n = h.vertex_count
    d = all_pairs_distances(h)
    # distances inside H' between vertices of H
    clamped = np.minimum(d.array, 2)
    np.fill_diagonal(clamped, 0)

    best: Dict[PQ, Optional[int]] = {state: None for state in PQ_STATES}
    # the empty set resolves only a single vertex
    for size in range(0 if n < 2 else 1, n + 1):
        for w in combinations(range(n), size):
            if w and len(np.unique(clamped[list(w), :].T, axis=0)) != n:
                continue
            p = any(all(clamped[x, z] == 1 for z in w) for x in range(n))
            q = any(all(clamped[x, z] == 2 for z in w) for x in range(n))
            if best[(p, q)] is None:
                best[(p, q)] = size
    return best
