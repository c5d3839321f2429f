#!/usr/bin/env python3
"""
Command-line front end for the metric dimension solvers.

Exit codes: 0 success, 1 non-resolving set or failed internal check,
2 input errors, 3 budget exceeded.
"""
import json
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

import click

# Add parent directory to path so we can import our modules
sys.path.insert(0, str(Path(__file__).parent.parent))

from decomp.chordal import clique_tree
from decomp.heuristic import heuristic_td
from decomp.modular import ModularTree, modular_decompose, render_modular_tree
from decomp.td_format import parse_td, write_td
from decomp.tree_decomposition import TreeDecomposition, validate_td
from graphs.generators import GraphFamily, gen
from graphs.graph import (
    DistanceMatrix,
    Graph,
    all_pairs_distances,
    first_unresolved_pair,
    graph_stats,
    is_resolving_set,
    parse_edge_list,
    require_connected,
    write_edge_list,
)
from solvers.mw_solver import md_modular
from solvers.oracle import degree_bound_holds, metric_dimension_bruteforce, verify_witness
from solvers.tl_solver import TlConfig, nice_factory_from_td, solve_tl
from utils.config_loader import config_loader
from utils.custom_exceptions import (
    BudgetExceededError,
    ContractViolation,
    DecompositionError,
    GraphParseError,
    GraphValidationError,
    MetricDimensionError,
    NotChordalError,
)
from utils.export_utils import ExportUtils
from utils.json_validator import JsonValidator
from utils.logger import cli_logger, set_log_level

ALGORITHMS = ('auto', 'brute', 'mw', 'tl')
TD_MODES = ('modular', 'clique-tree', 'heuristic-td')


def _fail(error: MetricDimensionError) -> None:
    cli_logger.error(f"{type(error).__name__}: {error}")
    click.echo(f"Error: {error}", err=True)
    sys.exit(error.exit_code)


def _read_graph(path: str, labels: bool = False) -> Graph:
    with open(path, 'rb') as f:
        return parse_edge_list(f.read(), allow_labels=labels)


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        click.echo(text, nl=False)
        return
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(text, encoding='utf-8')
    cli_logger.info(f"Wrote {out}")


def _load_td(g: Graph, d: DistanceMatrix, td_path: Optional[str], td_auto: bool) -> Optional[TreeDecomposition]:
    """The decomposition given by --td, or one built by --td-auto (clique tree, else min-fill-in)."""
    if td_path:
        with open(td_path, 'rb') as f:
            td = parse_td(f.read())
        report = validate_td(g, td, d)
        if not report.valid:
            raise DecompositionError(f"{td_path} is not a tree decomposition of the input: {report.problems[:3]}")
        return td
    if not td_auto:
        return None
    try:
        return clique_tree(g)
    except NotChordalError:
        cli_logger.info("Input is not chordal; using the min-fill-in decomposition")
        return heuristic_td(g)


class _SolveRun:
    """One solve invocation: picks the algorithm and fills the report."""

    def __init__(self, g: Graph, d: DistanceMatrix, td: Optional[TreeDecomposition], budget_k: Optional[int],
                 radius: Optional[int], policy_overrides: Dict[str, Optional[int]]):
        self.g = g
        self.d = d
        self.td = td
        self.solver_config = config_loader.get_solver_config(budget_k=budget_k, radius_override=radius)
        self.policy = config_loader.get_auto_policy(**policy_overrides)
        self.params: Dict[str, Any] = {'delta': g.max_degree(), 'ell': None, 's': None, 'mw_width': None}
        self.tree: Optional[ModularTree] = None
        self.node_stats: List[Dict[str, Any]] = []

    def modular_tree(self) -> ModularTree:
        if self.tree is None:
            self.tree = modular_decompose(self.g)
            self.params['mw_width'] = self.tree.width
        return self.tree

    def run(self, algorithm: str):
        if algorithm == 'brute':
            return 'brute', metric_dimension_bruteforce(self.g, self.d, budget=self.solver_config.budget_k)
        if algorithm == 'mw':
            return 'mw', md_modular(self.g, self.modular_tree())
        if algorithm == 'tl':
            return 'tl', self._tl()
        return self._auto()

    def _auto(self):
        tree = self.modular_tree()
        if tree.width <= self.policy.mw_width_cap:
            return 'mw', md_modular(self.g, tree)
        if self.g.vertex_count <= self.policy.brute_max_n:
            try:
                return 'brute', metric_dimension_bruteforce(self.g, self.d, budget=self.policy.brute_max_k)
            except BudgetExceededError:
                if self.td is None:
                    raise
                cli_logger.info(f"No resolving set within {self.policy.brute_max_k}; falling back to tl")
        if self.td is None:
            raise BudgetExceededError(
                f"Modular width {tree.width} and n={self.g.vertex_count} exceed the auto caps "
                f"and no tree decomposition is available", bound=tree.width, ceiling=self.policy.mw_width_cap)
        return 'tl', self._tl()

    def _tl(self):
        if self.td is None:
            raise DecompositionError("--algo tl needs --td or --td-auto")
        config = TlConfig.from_solver_config(self.solver_config)
        result = solve_tl(self.g, nice_factory_from_td(self.g, self.td, self.d), config, self.d)
        self.params['ell'] = result.stats.length
        self.params['s'] = result.stats.radius
        self.node_stats = result.stats.nodes
        return result


@click.group()
@click.option('--log-level', default=None, help='Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)')
@click.option('--config-dir', default=None, type=click.Path(exists=True, file_okay=False),
              help='Directory holding config.ini and corpus.yaml')
@click.pass_context
def cli(ctx, log_level, config_dir):
    """Exact metric dimension solvers: brute force, tree-length DP and modular-width DP."""
    ctx.ensure_object(dict)
    if config_dir:
        config_loader.config_dir = Path(config_dir)
        config_loader.reload_config()
    if log_level:
        try:
            set_log_level(log_level)
        except ValueError as e:
            raise click.BadParameter(str(e), param_hint='--log-level')
    ctx.obj['LOG_LEVEL'] = log_level


@cli.command()
@click.option('--input', 'input_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Edge-list file')
@click.option('--algo', type=click.Choice(ALGORITHMS), default='auto', show_default=True)
@click.option('--td', 'td_path', type=click.Path(exists=True, dir_okay=False), help='PACE .td file for tl')
@click.option('--td-auto', is_flag=True, help='Build a decomposition: clique tree, else min-fill-in')
@click.option('--budget-k', type=click.IntRange(min=1), help='Largest resolving set size to search')
@click.option('--radius', type=click.IntRange(min=1), help='Override the tl locality radius')
@click.option('--json', 'json_path', type=click.Path(dir_okay=False), help='Write the JSON report here')
@click.option('--witness', is_flag=True, help='Print and verify the witness set')
@click.option('--stats-csv', type=click.Path(dir_okay=False), help='Write tl per-node table statistics')
@click.option('--labels', is_flag=True, help='Accept arbitrary vertex tokens in the edge list')
@click.option('--mw-cap', type=click.IntRange(min=0), help='Auto policy: largest modular width for mw')
@click.option('--brute-max-n', type=click.IntRange(min=0), help='Auto policy: largest n for brute force')
@click.option('--brute-max-k', type=click.IntRange(min=0), help='Auto policy: brute force budget')
def solve(input_path, algo, td_path, td_auto, budget_k, radius, json_path, witness, stats_csv, labels,
          mw_cap, brute_max_n, brute_max_k):
    """Compute the metric dimension of a connected graph."""
    started = time.perf_counter()
    try:
        g = _read_graph(input_path, labels)
        require_connected(g, "solve")
        d = all_pairs_distances(g)
        td = _load_td(g, d, td_path, td_auto)
        run = _SolveRun(g, d, td, budget_k, radius,
                        {'mw_width_cap': mw_cap, 'brute_max_n': brute_max_n, 'brute_max_k': brute_max_k})
        cli_logger.info(f"Solving {input_path} (n={g.n}, m={g.m}) with --algo {algo}")
        algorithm, result = run.run(algo)

        verified = None
        if witness:
            verified = verify_witness(g, result.md, result.witness)
            if not verified:
                raise ContractViolation(f"Witness {result.witness} does not certify md={result.md}",
                                        operation="solve")

        click.echo(f"md {result.md}")
        if witness:
            names = [g.labels[v] if labels and g.labels else str(v) for v in result.witness]
            click.echo("witness " + " ".join(names))

        if stats_csv:
            if run.node_stats:
                ExportUtils().export_table_stats(run.node_stats, stats_csv)
            else:
                cli_logger.warning(f"--stats-csv ignored: algorithm {algorithm} keeps no table statistics")

        if json_path:
            report = {
                'n': g.n,
                'm': g.m,
                'algorithm': algorithm,
                'md': result.md,
                'witness': list(result.witness),
                'params': run.params,
                'timings_ms': {'total': round((time.perf_counter() - started) * 1000, 3)},
                'corpus_checks': {
                    'degree_bound': degree_bound_holds(g.max_degree(), result.md),
                    'witness_verified': verified,
                },
                'labels': list(g.labels) if labels and g.labels else None,
            }
            JsonValidator().require_valid(report, 'solve_report')
            Path(json_path).parent.mkdir(parents=True, exist_ok=True)
            with open(json_path, 'w', encoding='utf-8') as f:
                json.dump(report, f, indent=2, sort_keys=True)
                f.write("\n")
            cli_logger.info(f"Report written to {json_path}")
    except MetricDimensionError as e:
        _fail(e)


@cli.command()
@click.option('--input', 'input_path', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--set', 'vertex_set', required=True, help='Comma-separated vertex ids, e.g. "0,3"')
def verify(input_path, vertex_set):
    """Exit 0 iff the given set resolves the graph; otherwise print a tied pair."""
    try:
        g = _read_graph(input_path)
        tokens = [t.strip() for t in vertex_set.split(',') if t.strip()]
        bad = [t for t in tokens if not t.isdigit()]
        if bad:
            raise GraphParseError(f"Malformed vertex id '{bad[0]}' in --set", token=bad[0])
        members = g.canonical_set(int(t) for t in tokens)
        require_connected(g, "verify")
        d = all_pairs_distances(g)
        if is_resolving_set(g, d, members):
            click.echo(f"resolving: {' '.join(map(str, members))}")
            return
        x, y = first_unresolved_pair(d, members)
        click.echo(f"not resolving: {x} {y}")
        sys.exit(1)
    except MetricDimensionError as e:
        _fail(e)


@cli.command()
@click.option('--input', 'input_path', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--mode', type=click.Choice(TD_MODES), default='clique-tree', show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), help='Output file (stdout when omitted)')
def decompose(input_path, mode, out):
    """Write a PACE .td or the textual modular tree."""
    try:
        g = _read_graph(input_path)
        if mode == 'modular':
            tree = modular_decompose(g)
            cli_logger.info(f"Modular width {tree.width}")
            _emit(render_modular_tree(tree), out)
            return
        td = clique_tree(g) if mode == 'clique-tree' else heuristic_td(g)
        cli_logger.info(f"{mode}: {td.node_count} bags, width {td.width()}")
        _emit(write_td(td), out)
    except MetricDimensionError as e:
        _fail(e)


@cli.command(name='gen')
@click.option('--family', required=True, type=click.Choice([f.value for f in GraphFamily]))
@click.option('--n', 'n', required=True, type=int)
@click.option('--seed', type=int, default=None, help='Defaults to [GENERATORS] default_seed')
@click.option('--max-degree', type=int, default=None, help='Degree cap for random_bounded_degree')
@click.option('--out', type=click.Path(dir_okay=False), help='Output file (stdout when omitted)')
def generate(family, n, seed, max_degree, out):
    """Write an edge list of a generated graph."""
    try:
        _emit(write_edge_list(gen(family, n, seed, max_degree)), out)
    except MetricDimensionError as e:
        _fail(e)


@cli.command()
@click.option('--input', 'input_path', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--json', 'as_json', is_flag=True, help='Print the record as JSON')
def stats(input_path, as_json):
    """Degree, diameter, connectivity and decomposition widths."""
    try:
        g = _read_graph(input_path)
        if g.vertex_count == 0:
            raise GraphValidationError("Input graph has no vertices")
        d = all_pairs_distances(g)
        record = graph_stats(g, d).to_dict()
        record['modular_width'] = modular_decompose(g).width
        record['heuristic_td_width'] = None
        record['heuristic_td_length'] = None
        if record['connected']:
            td = heuristic_td(g)
            report = validate_td(g, td, d)
            record['heuristic_td_width'] = report.width
            record['heuristic_td_length'] = report.length
        if as_json:
            click.echo(json.dumps(record, indent=2, sort_keys=True))
            return
        for key, value in record.items():
            click.echo(f"{key} {value}")
    except MetricDimensionError as e:
        _fail(e)


if __name__ == '__main__':
    cli()
