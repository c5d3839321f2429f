"""
Projection profiles of vertices onto bags, and covers of profiles across a
separator.

A profile of v on a bag X is the ordered partition (X_0, ..., X_d) of X where
X_i holds the bag vertices at distance dist(v, X) + i from v. When X
separates v from a vertex x, the profile alone determines whether v
resolves x and another vertex on x's side.
"""
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from graphs.graph import DistanceMatrix
from utils.custom_exceptions import ContractViolation


@dataclass(frozen=True)
class OrderedPartition:
    """(X_0, ..., X_depth) over a common base bag; empty classes allowed."""
    base: FrozenSet[int]
    classes: Tuple[FrozenSet[int], ...]

    def __post_init__(self):
        seen = set()
        for cls in self.classes:
            if seen & cls:
                raise ContractViolation("Partition classes overlap", operation="OrderedPartition")
            seen |= cls
        if seen != self.base:
            raise ContractViolation("Partition classes do not cover the base", operation="OrderedPartition")

    @classmethod
    def from_classes(cls, classes: Sequence[Iterable[int]]) -> "OrderedPartition":
        frozen = tuple(frozenset(c) for c in classes)
        return cls(base=frozenset().union(*frozen), classes=frozen)

    @property
    def depth(self) -> int:
        return len(self.classes) - 1

    def sort_key(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(sorted(c)) for c in self.classes)

    def class_of(self, x: int) -> int:
        for index, cls in enumerate(self.classes):
            if x in cls:
                return index
        raise ContractViolation(f"Vertex {x} is not in the partition base", operation="class_of")

    def __repr__(self) -> str:
        return "(" + ", ".join("{" + ",".join(map(str, sorted(c))) + "}" for c in self.classes) + ")"


ProfileSet = FrozenSet[OrderedPartition]


def sorted_profiles(profiles: Iterable[OrderedPartition]) -> List[OrderedPartition]:
    """Canonical order: lexicographic on class contents."""
    return sorted(profiles, key=OrderedPartition.sort_key)


def project(d: DistanceMatrix, v: int, x_set: Iterable[int], depth: int) -> OrderedPartition:
    """Profile of v on x_set with depth + 1 classes; requires diam(x_set) <= depth."""
    members = sorted(set(x_set))
    if not members:
        raise ContractViolation("Cannot project onto an empty set", operation="project")
    rows = d.rows
    if depth < 0 or d.diameter_of(members) > depth:
        raise ContractViolation(f"Bag diameter exceeds projection depth {depth}", operation="project",
                                bag=members)
    row = rows[v]
    nearest = min(row[x] for x in members)
    classes: List[set] = [set() for _ in range(depth + 1)]
    for x in members:
        classes[row[x] - nearest].add(x)
    return OrderedPartition(frozenset(members), tuple(frozenset(c) for c in classes))


def profile_value(d: DistanceMatrix, part: OrderedPartition, x: int) -> int:
    """min over non-empty classes i of i + dist(X_i, x); equals dist(v, x) - dist(v, X) for a profile of v."""
    rows = d.rows
    best: Optional[int] = None
    for index, cls in enumerate(part.classes):
        if not cls:
            continue
        candidate = index + min(rows[a][x] for a in cls)
        if best is None or candidate < best:
            best = candidate
    if best is None:
        raise ContractViolation("All partition classes are empty", operation="profile_value")
    return best


def cover(d: DistanceMatrix, part: OrderedPartition, x_prime: Iterable[int], depth: int) -> OrderedPartition:
    """
    The partition of x_prime induced through part: class of x is
    profile_value(x) minus the minimum over x_prime.
    """
    members = sorted(set(x_prime))
    if not members:
        raise ContractViolation("Cannot cover onto an empty set", operation="cover")
    values = {x: profile_value(d, part, x) for x in members}
    lowest = min(values.values())
    classes: List[set] = [set() for _ in range(depth + 1)]
    for x, value in values.items():
        offset = value - lowest
        if offset > depth:
            raise ContractViolation(f"Cover offset {offset} exceeds depth {depth}", operation="cover")
        classes[offset].add(x)
    return OrderedPartition(frozenset(members), tuple(frozenset(c) for c in classes))


def resolved_across(d: DistanceMatrix, part: OrderedPartition, x: int, y: int) -> bool:
    """True iff any vertex with this profile, separated from x and y by the base, resolves them."""
    if x == y:
        raise ContractViolation("resolved_across needs distinct vertices", operation="resolved_across")
    return profile_value(d, part, x) != profile_value(d, part, y)
