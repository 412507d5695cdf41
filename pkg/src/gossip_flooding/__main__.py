"""Main entry point for the gossip flooding package."""
import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

import numpy as np
from gmpy2 import mpq

from . import __version__
from .common.config import DEFAULT_REPS, ORACLE_CAP
from .common.errors import (ConfigError, EmptyGraphError, GossipFloodingError, InvalidSizeError,
                            ScenarioError, StopSpecError)
from .common.validators import validate_json_file
from .exact_formulas import (asymptotic_flooding_time, asymptotic_single_time, asymptotic_total_time,
                             continuous_flooding_expectation, delta_expectation, harmonic,
                             propagation_ratio_bounds, render_exact, ring_single_info_expectation,
                             single_info_expectation_complete, star_hub_expectation, star_ratio,
                             star_total_expectation, total_time_bounds, universal_ratio_window)
from .experiment_spec import ExperimentSpec
from .graphs import Graph, iter_families, make_complete, make_ring, make_star, render_edge_list
from .markov_oracle import (check_oracle_size, enumerate_reachable, exact_tables, expected_hitting_time,
                            hitting_time_cdf)
from .monte_carlo import EstimatorConfig, estimate, estimate_propagation_ratio, mean_trajectory
from .reporting import (CDF_COLUMNS, CONVERT_COLUMNS, ESTIMATE_COLUMNS, EXACT_COLUMNS, SWEEP_COLUMNS,
                        TABLE_COLUMNS, VERIFY_COLUMNS, estimate_row, exact_row, render, write_output)
from .rumor_process import Scenario, StopSpec, Target
from .verify_suite import SUITES, load_params, run_suite

FORMULAS = ("harmonic", "m1", "delta", "star-total", "star-hub", "star-ratio", "ring-m1", "bounds",
            "asymptotic", "ratio-window")
SWEEP_FAMILIES = ("complete", "star", "ring")

# Bad arguments exit with 2, everything else that goes wrong with 1
USAGE_ERRORS = (InvalidSizeError, ScenarioError, StopSpecError, ConfigError, EmptyGraphError)


def load_config(config_path: str) -> dict:
    """Load configuration from JSON file."""
    config_path = Path(config_path)
    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")
    validate_json_file(config_path, "Verify config")

    with open(config_path, 'r') as f:
        return json.load(f)


def int_list(text: str) -> tuple:
    """Parse '16,64,256' into (16, 64, 256)."""
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def parse_target(text: str) -> Target:
    """Parse a target expression: 'total', 'y:X' or 'info:0,1' (the 'info:' prefix is optional).

    Raises:
        StopSpecError: If the expression is malformed
    """
    text = text.strip()
    if text in ("total", "all"):
        return Target.total()
    try:
        if text.startswith("y:"):
            return Target.fully_informed(int(text[2:]))
        if text.startswith("info:"):
            text = text[5:]
        return Target.propagation(int_list(text))
    except (ValueError, argparse.ArgumentTypeError):
        raise StopSpecError(f"cannot parse target {text!r} (use 'total', 'y:X' or 'info:0,1')")


def _need(value, flag: str):
    if value is None:
        raise InvalidSizeError(f"this command needs {flag}")
    return value


def _graph(spec: ExperimentSpec) -> Graph:
    descriptor = spec.graph
    if descriptor.family == "er" and descriptor.seed is None:
        descriptor = replace(descriptor, seed=spec.master_seed)
    return descriptor.build()


def _estimator(spec: ExperimentSpec, quiet: bool, reps: Optional[int] = None) -> EstimatorConfig:
    return EstimatorConfig(reps=reps or spec.replications, master_seed=spec.master_seed,
                           step_cap=spec.step_cap, ci_level=spec.ci_level, workers=spec.workers,
                           progress=not quiet)


def _emit(spec: ExperimentSpec, rows: list, columns: list) -> None:
    write_output(render(rows, columns, spec.format, spec.to_dict()), spec.out)


def run_gen(spec: ExperimentSpec, quiet: bool) -> int:
    """Write the canonical edge list of a generated graph."""
    g = _graph(spec)
    # The header is only needed when the largest label does not fix the site count
    header = g.n != 1 + max(v for _, v in g.edges)
    write_output(render_edge_list(g, header=header), spec.out)
    return 0


def run_simulate(spec: ExperimentSpec, quiet: bool) -> int:
    """Estimate the requested stopping times on one graph."""
    g = _graph(spec)
    scenario = Scenario.from_name(spec.scenario)
    record_n = bool(spec.options.get("record_n"))
    stop = StopSpec(targets=spec.targets, want_total=spec.want_total, y_sites=spec.y_sites)
    cfg = _estimator(spec, quiet)

    rows = []
    if stop.requested() or not record_n:
        for est in estimate(g, scenario, stop, cfg).values():
            rows.append(estimate_row(est, g.name, g.n, scenario.name))
    if record_n:
        for t, value in enumerate(mean_trajectory(g, scenario, cfg)):
            rows.append({"quantity": f"N[{t}]", "graph": g.name, "n": g.n, "scenario": scenario.name,
                         "mean": float(value), "reps": cfg.reps, "seed": cfg.master_seed})
    _emit(spec, rows, ESTIMATE_COLUMNS)
    return 0


def _exact_rows(formula: str, n: Optional[int], leaves: Optional[int], k: Optional[int]) -> list:
    if formula == "harmonic":
        m = _need(n, "--n")
        return [exact_row("H", harmonic(m), n=m)]
    if formula == "m1":
        n = _need(n, "--n")
        return [exact_row("M1", single_info_expectation_complete(n), f"complete-{n}", n, "distinct")]
    if formula == "delta":
        n, k = _need(n, "--n"), _need(k, "--k")
        return [exact_row(f"Delta[{k}]", delta_expectation(n, k), f"complete-{n}", n, "distinct")]
    if formula in ("star-total", "star-hub", "star-ratio"):
        leaves = _need(leaves, "--leaves")
        fn = {"star-total": star_total_expectation, "star-hub": star_hub_expectation,
              "star-ratio": star_ratio}[formula]
        quantity = {"star-total": "tau_V", "star-hub": "tau_H[0]", "star-ratio": "ratio"}[formula]
        return [exact_row(quantity, fn(leaves), f"star-{leaves}", leaves + 1, "distinct")]
    if formula == "ring-m1":
        n = _need(n, "--n")
        return [exact_row("tau_H[0]", ring_single_info_expectation(n), f"ring-{n}", n, "distinct")]
    if formula == "bounds":
        n = _need(n, "--n")
        report = total_time_bounds(n)
        graph = f"complete-{n}"
        return [exact_row(q, v, graph, n, "distinct") for q, v in (
            ("M1", report.m1), ("bound_lower", report.lower), ("bound_upper", report.upper),
            ("ratio_lower", report.ratio_lower), ("ratio_upper", report.ratio_upper))]
    if formula == "asymptotic":
        n = _need(n, "--n")
        graph = f"complete-{n}"
        return [exact_row(q, v, graph, n, "distinct") for q, v in (
            ("M1_asymptotic", asymptotic_single_time(n)), ("tau_V_asymptotic", asymptotic_total_time(n)),
            ("flooding_asymptotic", asymptotic_flooding_time(n)))]
    low, high = universal_ratio_window()
    return [exact_row("ratio_lower", low), exact_row("ratio_upper", high)]


def run_exact(spec: ExperimentSpec, quiet: bool) -> int:
    """Evaluate one closed-form formula."""
    rows = _exact_rows(spec.options["formula"], spec.graph.n, spec.graph.leaves, spec.options.get("k"))
    _emit(spec, rows, EXACT_COLUMNS)
    return 0


def run_oracle(spec: ExperimentSpec, quiet: bool) -> int:
    """Exact tables, CDFs or expectations from the full Markov chain."""
    options = spec.options
    float_path = bool(options.get("float_path"))

    if options.get("tables"):
        n = _need(spec.graph.n, "--n")
        table = exact_tables(n, float_path=float_path)
        graph = f"complete-{n}"
        rows = [exact_row("M", v, graph, n, "distinct", k=k) for k, v in enumerate(table.M, start=1)]
        rows += [exact_row("A", v, graph, n, "duplicated", k=k) for k, v in enumerate(table.A, start=2)]
        rows.append(exact_row("Y0", table.Y0, graph, n, "distinct"))
        _emit(spec, rows, TABLE_COLUMNS)
        return 0

    g = _graph(spec) if spec.graph.given else make_complete(_need(spec.graph.n, "--n"))
    check_oracle_size(g.n, float_path)
    scenario = Scenario.from_name(spec.scenario)

    if options.get("cdf"):
        target = parse_target(options["cdf"])
        horizon = options.get("horizon", 50)
        cdf = hitting_time_cdf(g, scenario, target, horizon)
        rows = []
        for t, value in enumerate(cdf):
            text, decimal = render_exact(value)
            rows.append({"quantity": target.label, "graph": g.name, "n": g.n, "scenario": scenario.name,
                         "t": t, "probability": text, "decimal": decimal})
        _emit(spec, rows, CDF_COLUMNS)
        return 0

    expressions = options.get("expect") or ["total"]
    index = enumerate_reachable(g, scenario)
    rows = []
    for expression in expressions:
        target = parse_target(expression)
        value = expected_hitting_time(g, scenario, target, float_path=float_path, index=index)
        rows.append(exact_row(target.label, value, g.name, g.n, scenario.name))
    _emit(spec, rows, EXACT_COLUMNS)
    return 0


def run_verify(spec: ExperimentSpec, quiet: bool) -> int:
    """Run the built-in checks; exit 1 if any fails."""
    options = spec.options
    overrides = {}
    if options.get("config"):
        overrides = load_config(options["config"])
        if not quiet:
            print(f"Loaded configuration from: {options['config']}", file=sys.stderr)
    params = load_params(overrides)
    if spec.reps is not None:
        params["reps"] = spec.reps
    if options.get("fresh_seed"):
        params["seed"] = int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])
        print(f"Using fresh seed {params['seed']}", file=sys.stderr)
    elif spec.seed is not None:
        params["seed"] = spec.seed

    report = run_suite(options.get("suite", "exact"), params, spec.workers, progress=not quiet)
    _emit(spec, report.rows(), VERIFY_COLUMNS)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        print(f"Error: failed checks: {names}", file=sys.stderr)
        return 1
    return 0


def _sweep_row(family: str, size: int, g: Graph, cfg: EstimatorConfig, transitive: bool) -> dict:
    denominator = None
    if family == "complete":
        denominator = single_info_expectation_complete(size)
        bounds, limit = propagation_ratio_bounds(size), 1.5
    elif family == "star":
        denominator = star_hub_expectation(size)
        exact = star_ratio(size)
        bounds, limit = (exact, exact), 2
    elif family == "ring":
        denominator = ring_single_info_expectation(size)
        bounds, limit = universal_ratio_window(), 1
    else:
        bounds, limit = universal_ratio_window(), None

    ratio = estimate_propagation_ratio(g, transitive, cfg, denominator)
    return {
        "family": family, "n": size, "ratio": ratio.ratio, "ratio_low": ratio.ratio_low,
        "ratio_high": ratio.ratio_high, "ratio_sigma": ratio.ratio_sigma,
        "bound_lower": float(bounds[0]), "bound_upper": float(bounds[1]),
        "limit": None if limit is None else float(limit), "reps": cfg.reps, "seed": cfg.master_seed,
        "min_biased": ratio.min_biased,
    }


def run_ratio_sweep(spec: ExperimentSpec, quiet: bool) -> int:
    """Estimate the propagation ratio across sizes of one family (or one edge-list graph)."""
    cfg = _estimator(spec, quiet, spec.reps or 2000)
    if spec.graph.edge_list is not None:
        g = spec.graph.build()
        row = _sweep_row(g.name, g.n, g, cfg, bool(spec.options.get("transitive")))
        _emit(spec, [row], SWEEP_COLUMNS)
        return 0

    family = spec.graph.family
    if family not in SWEEP_FAMILIES:
        raise InvalidSizeError(f"ratio-sweep supports {', '.join(SWEEP_FAMILIES)} or --edge-list")
    if family == "star":
        sizes = spec.options.get("leaves") or ([spec.graph.leaves] if spec.graph.leaves else None)
        sizes = _need(sizes, "--leaves")
        build = make_star
    else:
        sizes = spec.options.get("n") or ([spec.graph.n] if spec.graph.n else None)
        sizes = _need(sizes, "--n")
        build = make_complete if family == "complete" else make_ring

    rows = [_sweep_row(family, size, build(size), cfg, True) for size in sizes]
    _emit(spec, rows, SWEEP_COLUMNS)
    return 0


def run_convert(spec: ExperimentSpec, quiet: bool) -> int:
    """Convert an expected number of discrete steps into continuous flooding time."""
    options = spec.options
    if options.get("discrete_mean") is not None:
        edges = _need(options.get("edges"), "--edges")
        try:
            mean = mpq(options["discrete_mean"])
        except ValueError:
            raise InvalidSizeError(f"--discrete-mean must be a number or p/q, got {options['discrete_mean']!r}")
        value = continuous_flooding_expectation(mean, edges)
        text, decimal = render_exact(value)
        row = {"quantity": "flooding_time", "edges": edges, "discrete_mean": options["discrete_mean"],
               "value": text, "decimal": decimal, "provenance": "supplied"}
        _emit(spec, [row], CONVERT_COLUMNS)
        return 0

    if not spec.graph.given:
        raise InvalidSizeError("convert needs --discrete-mean and --edges, or a graph to simulate")
    g = _graph(spec)
    cfg = _estimator(spec, quiet, spec.reps or DEFAULT_REPS)
    total = estimate(g, Scenario.distinct_all(), StopSpec(want_total=True), cfg)["tau_V"]
    provenance = f"monte carlo reps={cfg.reps} seed={cfg.master_seed}"

    rows = []
    for quantity, discrete in (("flooding_time", total.mean), ("flooding_time_ci_low", total.ci_low),
                               ("flooding_time_ci_high", total.ci_high)):
        value = continuous_flooding_expectation(discrete, g.edge_count)
        rows.append({"quantity": quantity, "graph": g.name, "n": g.n, "edges": g.edge_count,
                     "discrete_mean": repr(discrete), "value": repr(value), "decimal": f"{value:.12g}",
                     "provenance": provenance})
    if spec.graph.family == "complete":
        reference = asymptotic_flooding_time(g.n)
        rows.append({"quantity": "flooding_time_asymptotic", "graph": g.name, "n": g.n, "edges": g.edge_count,
                     "value": repr(reference), "decimal": f"{reference:.12g}", "provenance": "closed form"})
    _emit(spec, rows, CONVERT_COLUMNS)
    return 0


HANDLERS = {
    "gen": run_gen,
    "simulate": run_simulate,
    "exact": run_exact,
    "oracle": run_oracle,
    "verify": run_verify,
    "ratio-sweep": run_ratio_sweep,
    "convert": run_convert,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="Output format")
    common.add_argument("--out", help="Output path (default: standard output)")
    common.add_argument("--seed", type=int, help="Master seed (or graph seed for gen)")
    common.add_argument("--workers", type=int, default=1, help="Worker processes for replications")
    common.add_argument("--quiet", action="store_true", help="Suppress progress on stderr")
    common.add_argument("--dump-spec", action="store_true", help="Print the parsed experiment spec and exit")

    graph = argparse.ArgumentParser(add_help=False)
    graph.add_argument("--family", choices=tuple(iter_families()), help="Graph family")
    graph.add_argument("--n", type=int, help="Site count")
    graph.add_argument("--leaves", type=int, help="Leaf count of a star")
    graph.add_argument("--p", type=float, help="Edge probability of an Erdos-Renyi graph")
    graph.add_argument("--graph-seed", type=int, help="Seed of an Erdos-Renyi graph (default: --seed)")
    graph.add_argument("--edge-list", help="Read the graph from an edge-list file")

    estimator = argparse.ArgumentParser(add_help=False)
    estimator.add_argument("--reps", type=int, help="Replications")
    estimator.add_argument("--step-cap", type=int, help="Step cap per replication")
    estimator.add_argument("--ci-level", type=float, help="Confidence level")

    parser = argparse.ArgumentParser(prog="gossip-flooding",
                                     description="Multi-information rumor propagation toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("gen", parents=[common, graph], help="Write a generated graph as an edge list")

    sim = sub.add_parser("simulate", parents=[common, graph, estimator], help="Estimate stopping times")
    sim.add_argument("--scenario", choices=("distinct", "duplicated"), default="distinct")
    sim.add_argument("--target", dest="targets", type=int_list, action="append",
                     help="Information subset H for tau_H, e.g. 0,1 (repeatable)")
    sim.add_argument("--total", action="store_true", help="Estimate tau_V")
    sim.add_argument("--y-site", dest="y_sites", type=int, action="append", help="Site x for Y_x (repeatable)")
    sim.add_argument("--record-n", action="store_true", help="Also report the mean N(t) trajectory")

    ex = sub.add_parser("exact", parents=[common], help="Evaluate a closed-form formula")
    ex.add_argument("--formula", choices=FORMULAS, required=True)
    ex.add_argument("--n", type=int)
    ex.add_argument("--leaves", type=int)
    ex.add_argument("--k", type=int)

    orc = sub.add_parser("oracle", parents=[common, graph], help="Exact Markov-chain computations")
    orc.add_argument("--scenario", choices=("distinct", "duplicated"), default="distinct")
    orc.add_argument("--tables", action="store_true", help="M_n(k) and A_n(k) tables on K_n")
    orc.add_argument("--cdf", help="CDF of a target: total, y:X or info:0,1")
    orc.add_argument("--horizon", type=int, default=50)
    orc.add_argument("--expect", action="append", help="Expected hitting time of a target (repeatable)")
    orc.add_argument("--float-path", action="store_true",
                     help=f"Solve in floats; allows n = 5 (exact cap is {ORACLE_CAP})")

    ver = sub.add_parser("verify", parents=[common], help="Run the built-in verification suite")
    ver.add_argument("--suite", choices=SUITES, default="exact")
    ver.add_argument("--reps", type=int, help="Replications per Monte Carlo quantity")
    ver.add_argument("--fresh-seed", action="store_true", help="Draw a fresh random master seed")
    ver.add_argument("--config", help="JSON file overriding the verify parameters")

    sweep = sub.add_parser("ratio-sweep", parents=[common, estimator], help="Propagation ratio across sizes")
    sweep.add_argument("--family", choices=SWEEP_FAMILIES)
    sweep.add_argument("--n", type=int_list, help="Site counts, e.g. 64,256")
    sweep.add_argument("--leaves", type=int_list, help="Star leaf counts, e.g. 4,16")
    sweep.add_argument("--edge-list", help="Estimate the ratio of one edge-list graph")
    sweep.add_argument("--transitive", action="store_true",
                       help="Treat the edge-list graph as vertex-transitive (denominator from site 0)")

    conv = sub.add_parser("convert", parents=[common, graph, estimator],
                          help="Discrete expectation to continuous flooding time")
    conv.add_argument("--discrete-mean", help="Expected discrete steps, e.g. 4 or 7/2")
    conv.add_argument("--edges", type=int, help="Edge count |E|")
    return parser


def main(argv: Optional[list] = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    spec = ExperimentSpec.from_args(args)

    if args.dump_spec:
        write_output(spec.to_json(), None)
        return 0

    try:
        return HANDLERS[spec.command](spec, args.quiet)
    except USAGE_ERRORS as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    except (GossipFloodingError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
