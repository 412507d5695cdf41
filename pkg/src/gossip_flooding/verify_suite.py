"""Built-in verification suite.

Two suites of named checks:
1. exact: closed forms against the Markov-chain oracle, the M/A recurrence,
   the ordering and monotonicity chains, time reversal duality, the bound
   intervals and a few pure identities. Fully deterministic.
2. mc: statistical checks with fixed default seeds and 3-sigma acceptance
   margins (K_3 total time, reversal gap on K_8, the universal 2x bound,
   star and complete ratio windows, ring ratio trend).

The report passes iff every check passes.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from gmpy2 import mpq

from .common.config import VERIFY_DEFAULTS
from .common.errors import ConfigError, DisconnectedGraphError, EmptyGraphError
from .common.progress import ProgressPrinter
from .exact_formulas import (continuous_flooding_expectation, delta_expectation, render_exact,
                             recurrence_residual, ring_single_info_expectation,
                             single_info_expectation_complete, star_hub_expectation, star_ratio,
                             star_total_expectation, total_time_bounds)
from .graphs import Graph, is_connected, make_complete, make_erdos_renyi, make_path, make_ring, make_star
from .markov_oracle import exact_tables, expected_hitting_time, hitting_time_cdf, reversal_gap
from .monte_carlo import (DENOMINATOR_STREAM, EstimatorConfig, estimate, estimate_propagation_ratio,
                          two_sample_mean_gap)
from .rumor_process import Scenario, StopSpec, Target

SUITES = ("exact", "mc", "all")


@dataclass(frozen=True)
class Check:
    """Outcome of one named check."""

    name: str
    passed: bool
    measured: str
    expected: str
    provenance: str

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass
class VerifyReport:
    """Ordered list of checks; passes iff every check passes."""

    checks: list = field(default_factory=list)

    def add(self, name: str, passed: bool, measured, expected, provenance: str) -> None:
        self.checks.append(Check(name, bool(passed), _show(measured), _show(expected), provenance))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def rows(self) -> list:
        return [{"check": c.name, "status": c.status, "measured": c.measured,
                 "expected": c.expected, "provenance": c.provenance} for c in self.checks]


def _show(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_show(v) for v in value) + "]"
    if isinstance(value, float):
        return f"{value:.6g}"
    return render_exact(value)[0]


def load_params(overrides: Optional[dict] = None) -> dict:
    """VERIFY_DEFAULTS with ``overrides`` applied.

    Raises:
        ConfigError: If overrides name an unknown parameter
    """
    params = dict(VERIFY_DEFAULTS)
    for key, value in (overrides or {}).items():
        if key not in params:
            raise ConfigError(f"unknown verify parameter {key!r} (known: {', '.join(sorted(params))})")
        params[key] = value
    return params


def run_exact_suite(report: VerifyReport, params: dict) -> None:
    distinct = Scenario.distinct_all()
    horizon = params["cdf_horizon"]

    for n in (2, 3, 4):
        got = expected_hitting_time(make_complete(n), distinct, [0])
        want = single_info_expectation_complete(n)
        report.add(f"single-info-K{n}", got == want, got, want, "oracle vs closed form")

    for leaves in (1, 2, 3):
        star = make_star(leaves)
        got = expected_hitting_time(star, distinct, "total")
        want = star_total_expectation(leaves)
        report.add(f"star-total-{leaves}", got == want, got, want, "oracle vs closed form")
        got = expected_hitting_time(star, distinct, [0])
        want = star_hub_expectation(leaves)
        report.add(f"star-hub-{leaves}", got == want, got, want, "oracle vs closed form")

    # Information 0 spreads the same way whatever else is around, so one information suffices
    for n in (3, 4, 5):
        lone = Scenario.custom([[0]] + [[] for _ in range(n - 1)])
        got = expected_hitting_time(make_ring(n), lone, [0])
        want = ring_single_info_expectation(n)
        report.add(f"ring-single-info-{n}", got == want, got, want, "oracle vs closed form")

    tables = {n: exact_tables(n) for n in (3, 4)}
    for n, table in tables.items():
        for k in range(2, n):
            residual = recurrence_residual(n, k, table.m_value(k), table.a_value(k + 1), table.a_value(k))
            report.add(f"recurrence-n{n}-k{k}", residual == 0, residual, 0, "oracle")
        report.add(f"interleaving-n{n}", table.interleaving_holds(), table.interleaving_chain(),
                   "non-decreasing", "oracle")
        report.add(f"m-monotone-n{n}", table.m_monotone(), table.M, "non-decreasing", "oracle")
        report.add(f"a-monotone-n{n}", table.a_monotone(), table.A, "non-decreasing", "oracle")
        report.add(f"y0-equals-m1-n{n}", table.Y0 == table.m_value(1), table.Y0, table.m_value(1), "oracle")

        bounds = total_time_bounds(n)
        mnn = table.m_value(n)
        report.add(f"bounds-n{n}", bounds.contains(mnn), mnn, [bounds.lower, bounds.upper],
                   "oracle vs closed form")

    for label, g, x in (("K3", make_complete(3), 0), ("path3", make_path(3), 0), ("star3", make_star(3), 1)):
        gap = reversal_gap(g, x, horizon)
        report.add(f"reversal-gap-{label}", gap == 0, gap, 0, "oracle")

    for n in (2, 3, 4):
        g = make_complete(n)
        for name, target in (("total", Target.total()), ("single", Target.propagation([0]))):
            tail = 1 - hitting_time_cdf(g, distinct, target, horizon)[-1]
            report.add(f"absorption-{name}-K{n}", tail < mpq(1, 1000), float(tail), "< 0.001", "oracle")

    bad = [n for n in range(2, 65)
           if sum((delta_expectation(n, k) for k in range(1, n)), mpq(0)) != single_info_expectation_complete(n)]
    report.add("telescoping-n2-64", not bad, bad or "all equal", "all equal", "closed form")

    ratios = [star_ratio(leaves) for leaves in range(1, 51)]
    increasing = all(a < b for a, b in zip(ratios, ratios[1:])) and ratios[-1] < 2
    report.add("star-ratio-increasing", increasing, ratios[-1], "< 2, increasing", "closed form")

    converted = continuous_flooding_expectation(tables[3].m_value(3), 3)
    report.add("convert-M3-3", converted == mpq(4, 3), converted, mpq(4, 3), "oracle vs closed form")


def _first_connected_er(n: int, p: float, seed: int) -> Graph:
    for s in range(seed, seed + 1000):
        try:
            g = make_erdos_renyi(n, p, s)
        except EmptyGraphError:
            continue
        if is_connected(g):
            return g
    raise DisconnectedGraphError(f"no connected G({n}, {p}) for seeds {seed}..{seed + 999}")


def _universal_bound(report: VerifyReport, g: Graph, sites: list, cfg: EstimatorConfig, k: float) -> None:
    spec = StopSpec(targets=tuple({x} for x in sites), want_total=True)
    est = estimate(g, Scenario.distinct_all(), spec, cfg)
    total = est["tau_V"]
    for x in sites:
        single = est[Target.propagation([x]).label]
        margin = k * math.sqrt(total.stderr**2 + 4 * single.stderr**2)
        report.add(f"universal-bound-{g.name}-x{x}", total.mean <= 2 * single.mean + margin,
                   total.mean, f"<= {2 * single.mean + margin:.6g}", "monte carlo")


def run_mc_suite(report: VerifyReport, params: dict, workers: int = 1, progress: bool = False) -> None:
    k = params["sigma_margin"]
    cfg = EstimatorConfig(reps=params["reps"], master_seed=params["seed"], workers=workers)
    distinct = Scenario.distinct_all()

    steps: list[Callable[[], None]] = []

    def k3_total():
        est = estimate(make_complete(3), distinct, StopSpec(want_total=True), cfg)["tau_V"]
        report.add("mc-K3-total", abs(est.mean - 4) <= k * est.stderr, est.mean,
                   f"4 +/- {k * est.stderr:.6g}", "monte carlo vs oracle")
    steps.append(k3_total)

    def reversal_k8():
        g = make_complete(8)
        tau = estimate(g, distinct, StopSpec(targets=({0},)), cfg)["tau_H[0]"]
        y = estimate(g, distinct, StopSpec(y_sites=(0,)), EstimatorConfig(
            reps=cfg.reps, master_seed=cfg.master_seed, workers=workers, stream=DENOMINATOR_STREAM))["Y[0]"]
        gap = two_sample_mean_gap(tau, y)
        report.add("mc-reversal-gap-K8", gap < params["reversal_gap_limit"], gap,
                   f"< {params['reversal_gap_limit']}", "monte carlo")
    steps.append(reversal_k8)

    er = _first_connected_er(params["er_n"], params["er_p"], params["er_seed"])
    for g, sites in ((make_complete(8), [0]), (make_star(8), [0, 1]), (make_ring(8), [0]),
                     (er, list(range(er.n)))):
        steps.append(lambda g=g, sites=sites: _universal_bound(report, g, sites, cfg, k))

    def ratio_floor(name: str, ratio) -> None:
        report.add(f"{name}-floor", ratio.ratio >= 1 - k * ratio.ratio_sigma, ratio.ratio,
                   f">= {1 - k * ratio.ratio_sigma:.6g}", "monte carlo")

    def star_window():
        leaves = params["ratio_star_leaves"]
        ratio = estimate_propagation_ratio(make_star(leaves), False, cfg, star_hub_expectation(leaves))
        want = star_ratio(leaves)
        report.add(f"mc-star-ratio-{leaves}", ratio.within(want, want, k), ratio.ratio,
                   f"{float(want):.6g} +/- {k * ratio.ratio_sigma:.6g}", "monte carlo vs closed form")
        ratio_floor(f"mc-star-ratio-{leaves}", ratio)
    steps.append(star_window)

    def complete_window():
        n = params["ratio_complete_n"]
        bounds = total_time_bounds(n)
        ratio = estimate_propagation_ratio(make_complete(n), True, cfg, bounds.m1)
        report.add(f"mc-complete-ratio-{n}", ratio.within(bounds.ratio_lower, bounds.ratio_upper, k),
                   ratio.ratio, [bounds.ratio_lower, bounds.ratio_upper], "monte carlo vs closed form")
        ratio_floor(f"mc-complete-ratio-{n}", ratio)
    steps.append(complete_window)

    def ring_trend():
        small, large = params["ring_trend_n"]
        ratios = [estimate_propagation_ratio(make_ring(n), True, cfg, ring_single_info_expectation(n))
                  for n in (small, large)]
        report.add(f"mc-ring-trend-{small}-{large}", ratios[1].ratio < ratios[0].ratio,
                   [r.ratio for r in ratios], "strictly decreasing", "monte carlo")
    steps.append(ring_trend)

    printer = ProgressPrinter("Monte Carlo checks", len(steps)) if progress else None
    for i, run_step in enumerate(steps):
        run_step()
        if printer:
            printer.update(i + 1)
    if printer:
        printer.done()


def run_suite(suite: str, params: dict, workers: int = 1, progress: bool = False) -> VerifyReport:
    """Run the "exact", "mc" or "all" suite.

    Args:
        suite: Which checks to run
        params: Parameters from load_params
        workers: Worker processes for the Monte Carlo checks
        progress: Show progress on stderr

    Raises:
        ConfigError: If suite is unknown
    """
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r} (expected one of {', '.join(SUITES)})")
    report = VerifyReport()
    if suite in ("exact", "all"):
        run_exact_suite(report, params)
    if suite in ("mc", "all"):
        run_mc_suite(report, params, workers, progress)
    return report
