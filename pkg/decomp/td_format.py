"""
PACE-style .td files.

    c comment
    s td <#bags> <max-bag-size> <n>
    b <id> <v> ...          (bag ids and vertices 1-based)
    <i> <j>                 (tree edge between bag ids)
"""
from typing import Dict, List, Set, Tuple, Union

from decomp.tree_decomposition import TreeDecomposition
from utils.custom_exceptions import TdParseError


def _int(token: str, line_no: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise TdParseError(f"Malformed {what} '{token}'", line=line_no, token=token)


def parse_td(text: Union[str, bytes]) -> TreeDecomposition:
    """Parse a .td file; ids are remapped to 0-based."""
    if isinstance(text, bytes):
        try:
            text = text.decode('utf-8')
        except UnicodeDecodeError as e:
            raise TdParseError(f"Decomposition is not valid UTF-8 at byte {e.start}")

    header = None
    bags: Dict[int, Set[int]] = {}
    edges: List[Tuple[int, int]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('c'):
            continue
        tokens = line.split()

        if tokens[0] == 's':
            if header is not None:
                raise TdParseError("Duplicate header", line=line_no)
            if len(tokens) != 5 or tokens[1] != 'td':
                raise TdParseError("Header must be 's td <bags> <max-bag-size> <n>'", line=line_no)
            header = tuple(_int(t, line_no, "header value") for t in tokens[2:])
            if min(header) < 0:
                raise TdParseError("Header values cannot be negative", line=line_no)
            continue

        if header is None:
            raise TdParseError("Content before 's td' header", line=line_no)
        bag_count, max_bag, n = header

        if tokens[0] == 'b':
            if len(tokens) < 2:
                raise TdParseError("Bag line without id", line=line_no)
            bag_id = _int(tokens[1], line_no, "bag id")
            if not 1 <= bag_id <= bag_count:
                raise TdParseError(f"Bag id {bag_id} outside 1..{bag_count}", line=line_no)
            if bag_id in bags:
                raise TdParseError(f"Bag {bag_id} defined twice", line=line_no)
            vertices = set()
            for token in tokens[2:]:
                v = _int(token, line_no, "vertex")
                if not 1 <= v <= n:
                    raise TdParseError(f"Vertex {v} outside 1..{n}", line=line_no)
                vertices.add(v - 1)
            if len(vertices) > max_bag:
                raise TdParseError(f"Bag {bag_id} has {len(vertices)} vertices, header allows {max_bag}",
                                   line=line_no)
            bags[bag_id] = vertices
            continue

        if len(tokens) != 2:
            raise TdParseError(f"Unrecognised line '{line}'", line=line_no)
        i, j = (_int(t, line_no, "bag id") for t in tokens)
        for bag_id in (i, j):
            if not 1 <= bag_id <= bag_count:
                raise TdParseError(f"Edge endpoint {bag_id} outside 1..{bag_count}", line=line_no)
        edges.append((i - 1, j - 1))

    if header is None:
        raise TdParseError("Missing 's td' header", line=None)
    bag_count, _, n = header
    missing = [b for b in range(1, bag_count + 1) if b not in bags]
    if missing:
        raise TdParseError(f"Header declares {bag_count} bags; missing {missing[:5]}", line=None)

    return TreeDecomposition.build(n, [bags[b] for b in range(1, bag_count + 1)], edges)


def write_td(td: TreeDecomposition) -> str:
    """Serialize with sorted bag contents and sorted edges."""
    max_bag = max((len(b) for b in td.bags), default=0)
    lines = [f"s td {td.node_count} {max_bag} {td.vertex_count}"]
    for node, bag in enumerate(td.bags, start=1):
        lines.append(" ".join(["b", str(node)] + [str(v + 1) for v in sorted(bag)]))
    lines.extend(f"{a + 1} {b + 1}" for a, b in td.edges)
    return "\n".join(lines) + "\n"
