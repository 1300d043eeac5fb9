#!/usr/bin/env python3
import os
import sys
import json
import functools
from datetime import datetime

import click
import pytest

from kgdom.config import PROJECT_ROOT, load_config
from kgdom.construct import (
    best_bound, check_thm1_preconditions, check_thm2_preconditions, construct_thm1,
    construct_thm2, thm1_witnesses, thm2_witnesses,
)
from kgdom.errors import KnodelError
from kgdom.exact import Budget, Inconclusive, Method, exact_gamma
from kgdom.knodel import VertexSet, build, check_structure, read_edge_list, write_edge_list, write_graph_exchange
from kgdom.logsetup import setup_logging
from kgdom.numtheory import heuristic_sum, wieferich_primes
from kgdom.records import CERT_SCHEMA, SOLVE_SCHEMA
from kgdom.scan import ScanOptions, merge_records, read_records, scan_range, summarize, write_jsonl, write_table
from kgdom.verify import certify, prop1_conditions


class Context:
    def __init__(self):
        self.verbose = False
        self.config = None
        self.log_file = None
        self.test_dir = os.path.join(PROJECT_ROOT, "testcase")
        self.logs_dir = os.path.join(PROJECT_ROOT, "logs")


class TestResultCollector:
    def __init__(self):
        self.passed = []
        self.failed = []
        self.skipped = []
        self.start_time = None
        self.end_time = None

    @pytest.hookimpl(hookwrapper=True)
    def pytest_runtest_makereport(self, item, call):
        outcome = yield
        report = outcome.get_result()

        if report.when == "call":
            if report.passed:
                self.passed.append(item.nodeid)
            elif report.failed:
                self.failed.append((item.nodeid, str(report.longrepr)))
        if report.skipped:
            self.skipped.append((item.nodeid, str(report.longrepr)))

    def pytest_sessionstart(self):
        self.start_time = datetime.now()

    def pytest_sessionfinish(self):
        self.end_time = datetime.now()

    def generate_summary(self):
        duration = self.end_time - self.start_time if self.start_time and self.end_time else None

        summary = ["Self-test Summary", "=" * 80]
        if self.start_time:
            summary.append(f"Execution Time: {self.start_time.strftime('%Y-%m-%d %H:%M:%S')}")
        if duration:
            summary.append(f"Duration: {duration}")
        summary.append("-" * 80)
        summary.append(f"Total Tests: {len(self.passed) + len(self.failed) + len(self.skipped)}")
        summary.append(f"Passed: {len(self.passed)}")
        summary.append(f"Failed: {len(self.failed)}")
        summary.append(f"Skipped: {len(self.skipped)}")

        if self.failed:
            summary.append("\nFailed Tests:")
            summary.append("-" * 40)
            for test, error in self.failed:
                summary.append(f"✗ {test}")
                summary.append(error)
                summary.append("-" * 40)

        if self.skipped:
            summary.append("\nSkipped Tests:")
            summary.append("-" * 40)
            for test, reason in self.skipped:
                summary.append(f"- {test}: {reason}")

        return "\n".join(summary)


pass_context = click.make_pass_decorator(Context, ensure=True)


def usage_errors(f):
    """Library errors on user input become click usage errors (exit 2)."""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except KnodelError as e:
            raise click.UsageError(str(e))
    return wrapper


def parse_vertex_list(spec):
    """A file of vertices, or an inline comma/space separated list."""
    if os.path.isfile(spec):
        with open(spec, 'r') as f:
            spec = f.read()
    tokens = spec.replace(",", " ").split()
    try:
        return [int(t) for t in tokens if not t.startswith("#")]
    except ValueError as e:
        raise click.BadParameter(f"not a vertex list: {e}", param_hint="--set")


def echo_json(rec):
    click.echo(json.dumps(rec, sort_keys=True))


@click.group()
@click.option("--verbose", is_flag=True, help="Log DEBUG messages to stderr.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="Solver configuration JSON (default: $KGDOM_CONFIG or config/solver_config.json).")
@pass_context
def cli(ctx, verbose, config_path):
    """Dominating sets of Knödel graphs."""
    ctx.verbose = verbose
    ctx.log_file = setup_logging(ctx.logs_dir, verbose=verbose)
    ctx.config = load_config(config_path)


@cli.command()
@pass_context
def config(ctx):
    """Show the effective configuration."""
    for key, value in ctx.config.as_dict().items():
        click.echo(f"{key}: {value}")
    click.echo(f"effective_workers: {ctx.config.effective_workers()}")
    click.echo(f"log_file: {ctx.log_file}")


@cli.command()
@click.argument("n", type=int)
@click.option("--degree", type=int, help="Restrict t to 1..degree.")
@click.option("--format", "fmt", type=click.Choice(["edges", "graphml", "adjlist"]), default="edges")
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Output file (edges default to stdout).")
@click.option("--check", is_flag=True, help="Run the structural check; exit 1 on a violation.")
@pass_context
@usage_errors
def gen(ctx, n, degree, fmt, output, check):
    """Emit KG_n as an edge list, GraphML or adjacency list."""
    g = build(n, degree, dense_max_n=ctx.config.dense_max_n)
    if fmt == "edges":
        if output:
            with open(output, 'w') as f:
                write_edge_list(g, f)
        else:
            write_edge_list(g, click.get_text_stream("stdout"))
    else:
        if not output:
            raise click.UsageError(f"--output is required for --format {fmt}")
        write_graph_exchange(g, output, fmt)
    if check:
        report = check_structure(g)
        if not report.ok:
            click.echo(f"structure check failed: {report}", err=True)
            sys.exit(1)


@cli.command()
@click.argument("n", type=int)
@click.option("--degree", type=int)
@click.option("--json", "as_json", is_flag=True)
@pass_context
@usage_errors
def bound(ctx, n, degree, as_json):
    """Lower and upper bounds on gamma(KG_n) with provenance."""
    report = best_bound(n, degree)
    if as_json:
        echo_json(report.to_record())
        return
    click.echo(f"n={n} degree={report.degree}")
    click.echo(f"  lower berge:    {report.lower_berge}")
    click.echo(f"  lower prop2:    {report.lower_prop2 if report.lower_prop2 is not None else '-'}")
    click.echo(f"  lower counting: {report.lower_counting}")
    for ub in sorted(report.uppers, key=lambda u: u.sort_key()):
        click.echo(f"  upper {ub.label()}: {ub.value}")
    click.echo(f"  best: {report.lower} <= gamma <= {report.upper} ({report.best.label()})")
    if report.gamma_known is not None:
        click.echo(f"  exact: gamma = {report.gamma_known}")


@cli.command()
@click.argument("n", type=int)
@click.option("--p", "p", type=int, help="Odd prime; default is the best available witness.")
@click.option("--k", "k", type=int, default=1, show_default=True, help="Exponent; k >= 2 selects Thm2.")
@pass_context
@usage_errors
def construct(ctx, n, p, k):
    """Build and certify a theorem set; one certificate record on stdout."""
    if p is None:
        witnesses = thm2_witnesses(n) if k >= 2 else thm1_witnesses(n)
        if not witnesses:
            raise click.UsageError(f"no {'Thm2' if k >= 2 else 'Thm1'} witness for n={n}")
        p, k = witnesses[0].p, witnesses[0].e
    if k >= 2:
        result = construct_thm2(n, check_thm2_preconditions(n, p, k))
    else:
        result = construct_thm1(n, check_thm1_preconditions(n, p))

    cert = certify(build(n, dense_max_n=ctx.config.dense_max_n), result.set)
    echo_json({"schema": CERT_SCHEMA, **result.to_record(), "verdict": cert.to_record()})
    if not cert.dominating:
        sys.exit(1)


@cli.command()
@click.argument("n", type=int)
@click.option("--set", "set_spec", required=True, help="File of vertices or a comma list.")
@click.option("--degree", type=int)
@click.option("--prop1", is_flag=True, help="Also check the conditions on a set meeting n/(k+1).")
@pass_context
@usage_errors
def verify(ctx, n, set_spec, degree, prop1):
    """Certify a vertex set; exit 1 when it does not dominate."""
    g = build(n, degree, dense_max_n=ctx.config.dense_max_n)
    d = VertexSet.from_vertices(n, parse_vertex_list(set_spec))
    cert = certify(g, d)
    rec = {"schema": CERT_SCHEMA, "n": n, "degree": g.degree, "set": d.vertices(),
           "size": d.size, "verdict": cert.to_record()}
    if prop1:
        verdict = prop1_conditions(g, d)
        rec["prop1"] = {"holds": verdict.holds, "failures": verdict.failures()}
    echo_json(rec)
    if not cert.dominating:
        sys.exit(1)


@cli.command()
@click.argument("n", type=int, required=False)
@click.option("--degree", type=int)
@click.option("--budget-nodes", type=int, help="Search node budget.")
@click.option("--budget-seconds", type=float, help="Wall-clock budget.")
@click.option("--method", type=click.Choice([m.value for m in Method]), default=Method.BRANCH_BOUND.value)
@click.option("--edges", "edges_file", type=click.File('r'), help="Solve a graph read from an edge list.")
@click.option("--force", is_flag=True, help="Ignore the configured size ceilings.")
@pass_context
@usage_errors
def exact(ctx, n, degree, budget_nodes, budget_seconds, method, edges_file, force):
    """Exact domination number; exit 1 if it contradicts the bounds."""
    budget = Budget(budget_nodes or ctx.config.node_budget,
                    budget_seconds or ctx.config.time_budget_s)
    if edges_file is not None:
        g = read_edge_list(edges_file)
        report = None
    elif n is None:
        raise click.UsageError("give N or --edges FILE")
    else:
        g = build(n, degree, dense_max_n=ctx.config.dense_max_n)
        report = best_bound(n, g.degree)

    result = exact_gamma(g, budget=budget, method=Method(method), config=ctx.config, force=force)
    rec = dict(result.to_record(), schema=SOLVE_SCHEMA, n=g.n, degree=g.degree)
    echo_json(rec)
    if report is not None and not isinstance(result, Inconclusive):
        if not report.with_gamma(result.gamma).sandwich_holds():
            click.echo(f"sandwich violated: {report.lower} <= {result.gamma} <= {report.upper} fails", err=True)
            sys.exit(1)


@cli.command()
@click.option("--from", "lo", type=int, required=True)
@click.option("--to", "hi", type=int, required=True)
@click.option("--oracle-max", type=int, help="Largest n given to the exact oracle (default bnb_max_n).")
@click.option("--force-oracle", is_flag=True, help="Run the oracle for every n.")
@click.option("--conjectures/--no-conjectures", default=True, show_default=True)
@click.option("--jsonl", "jsonl_path", type=click.Path(dir_okay=False), help="Write JSON lines ('-' for stdout).")
@click.option("--table", "table_path", type=click.Path(dir_okay=False), help="Write the flat table ('-' for stdout).")
@click.option("--merge", "merge_path", type=click.Path(exists=True, dir_okay=False),
              help="Earlier JSONL output to merge with, preferring conclusive records.")
@click.option("--workers", type=int, help="Worker processes (default from config).")
@click.option("--budget-nodes", type=int)
@click.option("--budget-seconds", type=float)
@click.option("--slack-c", type=float, help="Report conj3 slack above c*log2(n).")
@pass_context
@usage_errors
def scan(ctx, lo, hi, oracle_max, force_oracle, conjectures, jsonl_path, table_path,
         merge_path, workers, budget_nodes, budget_seconds, slack_c):
    """Scan even n in [FROM, TO]; exit 1 on a sandwich breach."""
    cfg = ctx.config
    options = ScanOptions(
        oracle_max=cfg.bnb_max_n if oracle_max is None else oracle_max,
        force_oracle=force_oracle,
        conjectures=conjectures,
        budget=Budget(budget_nodes or cfg.node_budget, budget_seconds or cfg.time_budget_s),
        config=cfg,
        workers=workers or cfg.effective_workers(),
    )
    records = list(scan_range(lo, hi, options))
    if merge_path:
        with open(merge_path, 'r') as f:
            records = merge_records(read_records(f), records)

    if jsonl_path is None and table_path is None:
        table_path = "-"
    if jsonl_path:
        with click.open_file(jsonl_path, 'w') as f:
            write_jsonl(records, f, options)
    if table_path:
        with click.open_file(table_path, 'w') as f:
            write_table(records, f)

    summary = summarize(records, cfg.slack_c if slack_c is None else slack_c)
    for key, value in summary.rows():
        click.echo(f"{key}: {value}", err=True)
    if summary.sandwich_breaches:
        sys.exit(1)


@cli.command("heuristic-sum")
@click.option("--limit", "limits", type=int, multiple=True, required=True,
              help="Upper limit X; may be repeated.")
@click.option("--wieferich", is_flag=True, help="Also list Wieferich primes below the largest X.")
@usage_errors
def heuristic_sum_cmd(limits, wieferich):
    """Sum over primes p < X of phi(p-1)/(p(p-1))."""
    for x in limits:
        click.echo(f"X={x}\t{heuristic_sum(x):.12f}")
    if wieferich:
        for rec in wieferich_primes(max(limits)):
            click.echo(f"wieferich p={rec.p}\tord_p(2)={rec.order_of_two}\tprimitive={rec.two_is_primitive}")


@cli.command()
@click.argument("category", required=False)
@click.option("--stress", is_flag=True, help="Enable stress test mode")
@click.option("--junit-xml", type=str, help="Generate junit-xml format report")
@pass_context
def selftest(ctx, category, stress, junit_xml):
    """Run the test suite, or one category of it."""
    test_path = ctx.test_dir
    if category:
        test_path = os.path.join(ctx.test_dir, category)
    if not os.path.exists(test_path):
        raise click.UsageError(f"Category '{category}' not found.")

    args = [test_path]
    if ctx.verbose:
        args.append("-v")
    if stress:
        os.environ["STRESS_TEST"] = "1"
    if junit_xml:
        args.extend(["--junitxml", junit_xml])

    collector = TestResultCollector()
    ret = pytest.main(args, plugins=[collector])

    timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
    summary_file = os.path.join(ctx.logs_dir, f"test_summary_{timestamp}.txt")
    with open(summary_file, 'w') as f:
        f.write(collector.generate_summary())

    click.echo(f"\nTest summary has been saved to: {summary_file}")
    if ret != 0:
        sys.exit(1)


if __name__ == "__main__":
    cli()
