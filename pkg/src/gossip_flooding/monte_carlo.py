"""Replicated estimation of expected stopping times and propagation ratios.

Replication i of an experiment is seeded with derive_seed(master_seed, i),
which hashes (master_seed, i) through numpy's SeedSequence. The derivation is
part of the contract: any worker that knows the master seed and a range of
replication indices reproduces exactly the same runs.

Estimates keep integer accumulators (count, sum, sum of squares), so merging
partial results from different workers is exact and the final numbers do
not depend on how many processes were used.
"""
import math
from dataclasses import dataclass, replace
from multiprocessing import Pool
from typing import Optional, Union

import numpy as np
from gmpy2 import mpq
from scipy.stats import norm

from .common.config import DEFAULT_CI_LEVEL, DEFAULT_MASTER_SEED, DEFAULT_STEP_CAP
from .common.errors import InvalidSizeError, QuantityMismatchError
from .common.progress import ProgressPrinter
from .common.validators import validate_min
from .graphs import Graph
from .rumor_process import Scenario, StopSpec, init_state, run


# Seed streams under one master seed: 0 for tau estimates and ratio numerators,
# then one stream each for the vertex-transitive denominator and N(t) trajectories,
# and SITE_STREAM_BASE + x for the per-site denominator of site x
DENOMINATOR_STREAM = 1
TRAJECTORY_STREAM = 2
SITE_STREAM_BASE = 3


def derive_seed(master_seed: int, index: int, stream: int = 0) -> int:
    """Seed of replication ``index`` of ``master_seed``.

    ``stream`` separates independent families of replications drawn from the
    same master seed (for example the numerator and denominator of a ratio).

    Returns:
        64-bit integer from SeedSequence(master_seed, spawn_key=(index[, stream]))
    """
    validate_min(master_seed, 0, "master seed")
    validate_min(index, 0, "replication index")
    key = (index,) if stream == 0 else (index, stream)
    seq = np.random.SeedSequence(master_seed, spawn_key=key)
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class EstimatorConfig:
    """How many replications to run and how to seed and summarize them.

    Attributes:
        reps: Replication count, at least 2
        master_seed: Master seed for derive_seed
        step_cap: Step cap of every replication
        ci_level: Two-sided normal confidence level in (0, 1)
        workers: Worker processes; 1 runs in-process
        stream: Seed stream, see derive_seed
        progress: Show a ProgressPrinter on stderr
    """

    reps: int = 10_000
    master_seed: int = DEFAULT_MASTER_SEED
    step_cap: int = DEFAULT_STEP_CAP
    ci_level: float = DEFAULT_CI_LEVEL
    workers: int = 1
    stream: int = 0
    progress: bool = False

    def __post_init__(self):
        validate_min(self.reps, 2, "reps")
        validate_min(self.master_seed, 0, "master seed")
        validate_min(self.step_cap, 1, "step cap")
        validate_min(self.workers, 1, "workers")
        if not 0.0 < self.ci_level < 1.0:
            raise InvalidSizeError(f"ci_level must lie in (0, 1), got {self.ci_level}")


@dataclass(frozen=True)
class Estimate:
    """Sample mean of one quantity with its normal-approximation confidence interval.

    Attributes:
        quantity: Label of the estimated quantity (e.g. "tau_V", "Y[0]")
        reps: Number of replications
        total: Sum of the observed integer times
        total_sq: Sum of their squares
        master_seed: Master seed the replications came from
        ci_level: Confidence level of ci_half_width
    """

    quantity: str
    reps: int = 0
    total: int = 0
    total_sq: int = 0
    master_seed: Optional[int] = None
    ci_level: float = DEFAULT_CI_LEVEL

    @classmethod
    def empty(cls, quantity: str, master_seed: Optional[int] = None,
              ci_level: float = DEFAULT_CI_LEVEL) -> "Estimate":
        return cls(quantity, 0, 0, 0, master_seed, ci_level)

    @classmethod
    def from_samples(cls, quantity: str, samples, master_seed: Optional[int] = None,
                     ci_level: float = DEFAULT_CI_LEVEL) -> "Estimate":
        values = [int(v) for v in samples]
        return cls(quantity, len(values), sum(values), sum(v * v for v in values), master_seed, ci_level)

    @property
    def mean(self) -> float:
        return self.total / self.reps if self.reps else math.nan

    @property
    def variance(self) -> float:
        """Unbiased sample variance, computed from the exact integer accumulators."""
        if self.reps < 2:
            return math.nan
        return float(mpq(self.reps * self.total_sq - self.total**2, self.reps * (self.reps - 1)))

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.reps) if self.reps >= 2 else math.nan

    @property
    def ci_half_width(self) -> float:
        return z_value(self.ci_level) * self.stderr

    @property
    def ci_low(self) -> float:
        return self.mean - self.ci_half_width

    @property
    def ci_high(self) -> float:
        return self.mean + self.ci_half_width

    def covers(self, value) -> bool:
        return self.ci_low <= float(value) <= self.ci_high


def z_value(ci_level: float) -> float:
    """Two-sided standard normal quantile for a confidence level."""
    return float(norm.ppf(0.5 + ci_level / 2.0))


def merge(a: Estimate, b: Estimate) -> Estimate:
    """Combine two estimates of the same quantity from disjoint replication ranges.

    Raises:
        QuantityMismatchError: If the quantities differ
    """
    if a.quantity != b.quantity:
        raise QuantityMismatchError(f"cannot merge {a.quantity!r} with {b.quantity!r}")
    if b.reps == 0:
        return a
    if a.reps == 0:
        return b
    seed = a.master_seed if a.master_seed == b.master_seed else None
    return Estimate(a.quantity, a.reps + b.reps, a.total + b.total, a.total_sq + b.total_sq, seed, a.ci_level)


def two_sample_mean_gap(a: Estimate, b: Estimate) -> float:
    """Standardized difference |a.mean - b.mean| / sqrt(a.stderr^2 + b.stderr^2)."""
    diff = abs(a.mean - b.mean)
    spread = math.sqrt(a.stderr**2 + b.stderr**2)
    if spread == 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return diff / spread


def _run_block(task: tuple) -> dict:
    g, s, spec, master_seed, stream, start, stop = task
    sums: dict = {}
    for i in range(start, stop):
        record = run(g, s, spec, derive_seed(master_seed, i, stream))
        for label, t in record.times().items():
            acc = sums.setdefault(label, [0, 0, 0])
            acc[0] += 1
            acc[1] += t
            acc[2] += t * t
    return sums


def _blocks(reps: int, workers: int) -> list:
    count = min(reps, workers * 8)
    cuts = [reps * i // count for i in range(count + 1)]
    return [(lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:]) if hi > lo]


def estimate(g: Graph, s: Scenario, spec: StopSpec, cfg: EstimatorConfig) -> dict:
    """Estimate every stopping time requested by ``spec``.

    Args:
        g: Connected graph
        s: Initial scenario
        spec: Requested stopping times (its step_cap is replaced by cfg.step_cap)
        cfg: Replication count, seeding and summary settings

    Returns:
        Dict from quantity label to Estimate, in StopSpec.requested() order.
        Identical for identical inputs whatever cfg.workers is.

    Raises:
        DisconnectedGraphError: If g is not connected
        StepCapExceededError: If any replication hits the cap (carries its seed)
    """
    state = init_state(g, s)
    spec = replace(spec, step_cap=cfg.step_cap)
    spec.validate(g.n, state.m)
    labels = [target.label for target in spec.requested()]

    tasks = [(g, s, spec, cfg.master_seed, cfg.stream, lo, hi) for lo, hi in _blocks(cfg.reps, cfg.workers)]
    progress = ProgressPrinter(f"{','.join(labels)} on {g.name}", len(tasks)) if cfg.progress else None

    results = {label: Estimate.empty(label, cfg.master_seed, cfg.ci_level) for label in labels}

    def absorb(block: dict) -> None:
        for label, (count, total, total_sq) in block.items():
            part = Estimate(label, count, total, total_sq, cfg.master_seed, cfg.ci_level)
            results[label] = merge(results[label], part)

    if cfg.workers == 1:
        for i, task in enumerate(tasks):
            absorb(_run_block(task))
            if progress:
                progress.update(i + 1)
    else:
        with Pool(cfg.workers) as pool:
            for i, block in enumerate(pool.imap(_run_block, tasks)):
                absorb(block)
                if progress:
                    progress.update(i + 1)
    if progress:
        progress.done()
    return results


@dataclass(frozen=True)
class RatioEstimate:
    """Estimated propagation ratio E[tau_V] / min_x E[tau_x].

    Attributes:
        numerator: Estimate of E[tau_V]
        denominator: Estimate of the smallest E[tau_x], or an exact mpq
        denominator_site: Site achieving the minimum (0 for transitive or exact)
        ratio: numerator.mean / denominator value
        ratio_low, ratio_high: Conservative interval from the component CIs
        ratio_sigma: Delta-method standard error, used for kσ acceptance margins
        min_biased: True when the denominator is a minimum over several
                    noisy per-site estimates (biased low)
    """

    numerator: Estimate
    denominator: Union[Estimate, "mpq"]
    denominator_site: int
    ratio: float
    ratio_low: float
    ratio_high: float
    ratio_sigma: float
    min_biased: bool = False

    @property
    def denominator_exact(self) -> bool:
        return not isinstance(self.denominator, Estimate)

    @property
    def denominator_value(self) -> float:
        return self.denominator.mean if isinstance(self.denominator, Estimate) else float(self.denominator)

    def within(self, low, high, k_sigma: float = 3.0) -> bool:
        """True if ratio lies in [low - kσ, high + kσ]."""
        margin = k_sigma * self.ratio_sigma
        return float(low) - margin <= self.ratio <= float(high) + margin


def _ratio(numerator: Estimate, denominator, site: int, min_biased: bool) -> RatioEstimate:
    num = numerator.mean
    if isinstance(denominator, Estimate):
        den, den_hw, den_se = denominator.mean, denominator.ci_half_width, denominator.stderr
    else:
        den, den_hw, den_se = float(denominator), 0.0, 0.0
    ratio = num / den
    low = (num - numerator.ci_half_width) / (den + den_hw)
    high = (num + numerator.ci_half_width) / (den - den_hw) if den > den_hw else math.inf
    sigma = ratio * math.sqrt((numerator.stderr / num) ** 2 + (den_se / den) ** 2)
    return RatioEstimate(numerator, denominator, site, ratio, low, high, sigma, min_biased)


def estimate_propagation_ratio(g: Graph, transitive_hint: bool, cfg: EstimatorConfig,
                               exact_denominator=None) -> RatioEstimate:
    """Estimate R(G) = E[tau_V] / min_x E[tau_x] from the all-distinct scenario.

    The numerator always comes from tau_V replications. The denominator is, in
    order of preference: ``exact_denominator`` when the family has a closed
    form; E[tau_0] alone when ``transitive_hint`` says every site has the same
    single-information time; otherwise the minimum over every site of
    per-site estimates with max(2, reps // n) replications each (flagged
    ``min_biased``). Denominator replications use separate seed streams.

    Raises:
        DisconnectedGraphError: If g is not connected
        StepCapExceededError: If any replication hits the cap
    """
    distinct = Scenario.distinct_all()
    numerator = estimate(g, distinct, StopSpec(want_total=True), cfg)["tau_V"]

    if exact_denominator is not None:
        return _ratio(numerator, mpq(exact_denominator), 0, False)

    if transitive_hint:
        den_cfg = replace(cfg, stream=DENOMINATOR_STREAM)
        den = estimate(g, distinct, StopSpec(targets=({0},)), den_cfg)
        return _ratio(numerator, next(iter(den.values())), 0, False)

    per_site_reps = max(2, cfg.reps // g.n)
    best_site, best = 0, None
    for x in range(g.n):
        site_cfg = replace(cfg, reps=per_site_reps, stream=SITE_STREAM_BASE + x)
        est = next(iter(estimate(g, distinct, StopSpec(targets=({x},)), site_cfg).values()))
        if best is None or est.mean < best.mean:
            best_site, best = x, est
    return _ratio(numerator, best, best_site, g.n > 1)


def mean_trajectory(g: Graph, s: Scenario, cfg: EstimatorConfig) -> np.ndarray:
    """Average N(t) over cfg.reps replications, for t = 0 until the longest run ends.

    Runs that finish early contribute N(t) = n afterwards. Replications use
    seed stream cfg.stream + TRAJECTORY_STREAM. With cfg.stream = 0 that is
    disjoint from every stream tau estimates and ratios draw from.

    Returns:
        float64 array of mean fully informed counts
    """
    spec = StopSpec(record_N=True, step_cap=cfg.step_cap)
    totals = np.zeros(1, dtype=np.int64)
    for i in range(cfg.reps):
        traj = run(g, s, spec, derive_seed(cfg.master_seed, i, cfg.stream + TRAJECTORY_STREAM)).N_trajectory
        if len(traj) > len(totals):
            # earlier runs were already complete on the new tail
            extra = np.full(len(traj) - len(totals), g.n * i, dtype=np.int64)
            totals = np.concatenate([totals, extra])
        totals[: len(traj)] += traj
        totals[len(traj):] += g.n
    return totals / cfg.reps
