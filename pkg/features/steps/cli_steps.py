"""
Step definitions for the mdsolve command line scenarios.
"""
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", ".."))

from behave import given, when, then
from click.testing import CliRunner

from graphs.generators import gen
from graphs.graph import parse_edge_list, write_edge_list
from scripts.run import cli
from solvers.oracle import verify_witness
from utils.json_validator import JsonValidator
from utils.logger import log_test_step, logger


def _invoke(context, args):
    log_test_step("Running mdsolve", args=' '.join(args))
    context.cli_result = CliRunner().invoke(cli, args)
    logger.debug(f"Exit code {context.cli_result.exit_code}")
    return context.cli_result


def _write_graph(context, text):
    context.graph_path = os.path.join(context.work_dir, "graph.txt")
    with open(context.graph_path, 'w', encoding='utf-8') as f:
        f.write(text)
    context.graph = parse_edge_list(text)


@given('a generated "{family}" graph on {n:d} vertices')
def step_generated_graph(context, family, n):
    """Write a generated graph to the scenario directory"""
    _write_graph(context, write_edge_list(gen(family, n)))


@given('the edge list "{text}"')
def step_edge_list(context, text):
    """Write a literal edge list; \\n separates lines"""
    _write_graph(context, text.replace('\\n', '\n'))


@when('I run solve with algorithm "{algo}" and a witness')
def step_solve_witness(context, algo):
    _invoke(context, ['solve', '--input', context.graph_path, '--algo', algo, '--witness', '--td-auto'])


@when('I run solve with algorithm "{algo}" and a JSON report')
def step_solve_json(context, algo):
    context.report_path = os.path.join(context.work_dir, "report.json")
    _invoke(context, ['solve', '--input', context.graph_path, '--algo', algo, '--witness',
                      '--json', context.report_path])


@when('I run solve with algorithm "{algo}" and budget {budget:d}')
def step_solve_budget(context, algo, budget):
    _invoke(context, ['solve', '--input', context.graph_path, '--algo', algo, '--budget-k', str(budget)])


@when('I verify the set "{vertex_set}"')
def step_verify(context, vertex_set):
    _invoke(context, ['verify', '--input', context.graph_path, '--set', vertex_set])


@when('I generate a "{family}" graph on {n:d} vertices with seed {seed:d}')
def step_generate(context, family, n, seed):
    context.graph_path = os.path.join(context.work_dir, "generated.txt")
    _invoke(context, ['gen', '--family', family, '--n', str(n), '--seed', str(seed),
                      '--out', context.graph_path])


@when('I run solve on the generated graph with algorithm "{algo}" and a witness')
def step_solve_generated(context, algo):
    with open(context.graph_path, 'r', encoding='utf-8') as f:
        context.graph = parse_edge_list(f.read())
    step_solve_witness(context, algo)


@then('the command exits with code {code:d}')
def step_exit_code(context, code):
    result = context.cli_result
    assert result.exit_code == code, f"Expected exit {code}, got {result.exit_code}: {result.output}"


@then('the output reports md {md:d}')
def step_reports_md(context, md):
    first = context.cli_result.stdout.splitlines()[0]
    assert first == f"md {md}", f"Unexpected first line: {first}"


@then('the printed witness resolves the graph')
def step_witness_resolves(context):
    lines = context.cli_result.stdout.splitlines()
    md = int(lines[0].split()[1])
    witness = [int(v) for v in lines[1].split()[1:]]
    assert verify_witness(context.graph, md, witness), f"{witness} does not certify md={md}"


@then('the output starts with "{prefix}"')
def step_output_prefix(context, prefix):
    output = context.cli_result.stdout
    assert output.startswith(prefix + ":"), f"Unexpected output: {output}"


@then('the JSON report is valid')
def step_report_valid(context):
    with open(context.report_path, 'r', encoding='utf-8') as f:
        context.report = json.load(f)
    JsonValidator().require_valid(context.report, 'solve_report')


@then('the JSON report has algorithm "{algo}" and md {md:d}')
def step_report_fields(context, algo, md):
    assert context.report['algorithm'] == algo
    assert context.report['md'] == md
