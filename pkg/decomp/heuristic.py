"""Tree decompositions from the min-fill-in elimination heuristic."""
import networkx as nx
from networkx.algorithms.approximation import treewidth_min_fill_in

from decomp.tree_decomposition import TreeDecomposition
from graphs.graph import Graph, require_connected
from utils.logger import decomp_logger


def _absorb_subset_bags(tree: nx.Graph) -> nx.Graph:
    """Contract every bag into a neighbouring superset bag until none remains."""
    tree = tree.copy()
    changed = True
    while changed:
        changed = False
        for a, b in sorted(tree.edges(), key=lambda e: (sorted(e[0]), sorted(e[1]))):
            if a <= b:
                small, big = a, b
            elif b <= a:
                small, big = b, a
            else:
                continue
            for other in list(tree.neighbors(small)):
                if other != big:
                    tree.add_edge(big, other)
            tree.remove_node(small)
            changed = True
            break
    return tree


def heuristic_td(g: Graph) -> TreeDecomposition:
    """
    Valid tree decomposition by min-fill-in elimination.

    No length guarantee; callers measure it with validate_td. Bags contained
    in a neighbour are absorbed, so a chordal graph yields its maximal cliques.
    """
    require_connected(g, "heuristic_td")
    if g.vertex_count == 1:
        return TreeDecomposition.build(1, [{0}], [])

    width, tree = treewidth_min_fill_in(g.to_networkx())
    tree = _absorb_subset_bags(tree)

    bags = sorted(tree.nodes(), key=lambda bag: tuple(sorted(bag)))
    index = {bag: i for i, bag in enumerate(bags)}
    edges = [(index[a], index[b]) for a, b in tree.edges()]
    decomp_logger.debug(f"Min-fill-in decomposition: width {width}, {len(bags)} bags")
    return TreeDecomposition.build(g.vertex_count, bags, edges)
