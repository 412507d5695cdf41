import numpy as np
import pytest
from gmpy2 import mpq

from gossip_flooding.common.errors import InvalidSizeError, QuantityMismatchError
from gossip_flooding.exact_formulas import (asymptotic_flooding_time, continuous_flooding_expectation,
                                           propagation_ratio_bounds, ring_single_info_expectation,
                                           single_info_expectation_complete, star_hub_expectation, star_ratio)
from gossip_flooding.graphs import make_complete, make_ring, make_star
from gossip_flooding.monte_carlo import (DENOMINATOR_STREAM, SITE_STREAM_BASE, TRAJECTORY_STREAM, Estimate,
                                         EstimatorConfig, derive_seed, estimate, estimate_propagation_ratio,
                                         mean_trajectory, merge, two_sample_mean_gap)
from gossip_flooding.rumor_process import Scenario, StopSpec

DISTINCT = Scenario.distinct_all()


def test_derived_seeds_are_stable_and_distinct():
    seeds = [derive_seed(42, i) for i in range(2000)]
    assert len(set(seeds)) == len(seeds)
    assert derive_seed(42, 7) == derive_seed(42, 7)
    assert derive_seed(42, 7) != derive_seed(42, 7, stream=1)
    assert derive_seed(42, 7) != derive_seed(43, 7)


def test_seed_streams_do_not_overlap():
    n = 16
    streams = [0, DENOMINATOR_STREAM, TRAJECTORY_STREAM] + [SITE_STREAM_BASE + x for x in range(n)]
    assert len(set(streams)) == len(streams)
    seeds = {derive_seed(5, 3, s) for s in streams}
    assert len(seeds) == len(streams)


def test_estimate_from_samples():
    est = Estimate.from_samples("tau_V", [2, 4, 6])
    assert est.mean == 4
    assert est.variance == 4
    assert est.stderr == pytest.approx(2 / np.sqrt(3))
    assert est.ci_half_width == pytest.approx(1.959963984540054 * est.stderr)
    assert est.covers(4)


def test_merge_is_exact():
    a = Estimate.from_samples("tau_V", [1, 2, 3])
    b = Estimate.from_samples("tau_V", [4, 5])
    whole = Estimate.from_samples("tau_V", [1, 2, 3, 4, 5])
    assert merge(a, b) == whole
    assert merge(b, a) == whole
    assert merge(a, Estimate.empty("tau_V")) == a
    assert merge(Estimate.empty("tau_V"), a) == a


def test_merge_rejects_different_quantities():
    with pytest.raises(QuantityMismatchError):
        merge(Estimate.from_samples("tau_V", [1, 2]), Estimate.from_samples("Y[0]", [1, 2]))


def test_two_sample_mean_gap():
    a = Estimate.from_samples("x", [1, 2, 3, 4])
    assert two_sample_mean_gap(a, a) == 0


@pytest.mark.parametrize("kwargs", [{"reps": 1}, {"ci_level": 1.0}, {"workers": 0}, {"step_cap": 0}])
def test_invalid_estimator_config(kwargs):
    with pytest.raises(InvalidSizeError):
        EstimatorConfig(**kwargs)


def test_deterministic_outcome_has_zero_spread():
    est = estimate(make_complete(2), DISTINCT, StopSpec(want_total=True), EstimatorConfig(reps=100))["tau_V"]
    assert est.mean == 1
    assert est.stderr == 0
    assert est.reps == 100


def test_complete_three_total_time_is_four():
    cfg = EstimatorConfig(reps=4000, master_seed=42)
    est = estimate(make_complete(3), DISTINCT, StopSpec(want_total=True), cfg)["tau_V"]
    assert abs(est.mean - 4) <= 4 * est.stderr


def test_estimates_are_reproducible_and_independent_of_workers():
    g = make_complete(4)
    spec = StopSpec(targets=({0},), want_total=True, y_sites=(1,))
    one = estimate(g, DISTINCT, spec, EstimatorConfig(reps=60, master_seed=5))
    again = estimate(g, DISTINCT, spec, EstimatorConfig(reps=60, master_seed=5))
    two = estimate(g, DISTINCT, spec, EstimatorConfig(reps=60, master_seed=5, workers=2))
    assert one == again == two
    assert list(one) == ["tau_H[0]", "tau_V", "Y[1]"]


def test_ratio_with_exact_denominator():
    cfg = EstimatorConfig(reps=4000, master_seed=3)
    ratio = estimate_propagation_ratio(make_star(2), False, cfg, exact_denominator=star_hub_expectation(2))
    assert ratio.denominator_exact
    assert not ratio.min_biased
    assert ratio.within(star_ratio(2), star_ratio(2), k_sigma=4)
    assert ratio.ratio_low <= ratio.ratio <= ratio.ratio_high


def test_ratio_minimum_over_sites_finds_the_hub():
    cfg = EstimatorConfig(reps=3000, master_seed=8)
    ratio = estimate_propagation_ratio(make_star(2), False, cfg)
    assert ratio.min_biased
    assert ratio.denominator_site == 0
    assert ratio.denominator.reps == 1000


def test_transitive_ratio_uses_one_site():
    cfg = EstimatorConfig(reps=2000, master_seed=4)
    ratio = estimate_propagation_ratio(make_complete(3), True, cfg)
    assert not ratio.min_biased
    assert ratio.denominator.quantity == "tau_H[0]"
    assert ratio.within(mpq(4, 3), mpq(4, 3), k_sigma=4)


def test_mean_trajectory():
    traj = mean_trajectory(make_complete(3), DISTINCT, EstimatorConfig(reps=50, master_seed=1))
    assert traj[0] == 0
    assert traj[-1] == 3
    assert np.all(np.diff(traj) >= 0)


@pytest.mark.slow
def test_single_information_on_complete_eight():
    cfg = EstimatorConfig(reps=100_000, master_seed=1)
    est = estimate(make_complete(8), DISTINCT, StopSpec(targets=({0},)), cfg)["tau_H[0]"]
    assert abs(est.mean - float(single_info_expectation_complete(8))) <= 3 * est.stderr


@pytest.mark.slow
def test_time_reversal_on_complete_eight():
    g = make_complete(8)
    tau = estimate(g, DISTINCT, StopSpec(targets=({0},)), EstimatorConfig(reps=100_000, master_seed=2))
    y = estimate(g, DISTINCT, StopSpec(y_sites=(0,)), EstimatorConfig(reps=100_000, master_seed=2, stream=1))
    assert two_sample_mean_gap(tau["tau_H[0]"], y["Y[0]"]) < 4


def test_confidence_interval_coverage_on_three_sites():
    g, spec = make_complete(3), StopSpec(want_total=True)
    covered = sum(estimate(g, DISTINCT, spec, EstimatorConfig(reps=1000, master_seed=seed))["tau_V"].covers(4)
                  for seed in range(100))
    assert covered >= 90


@pytest.mark.slow
@pytest.mark.parametrize("n", [256, 1024])
def test_complete_ratio_inside_its_bounds(n):
    cfg = EstimatorConfig(reps=2000, master_seed=11)
    ratio = estimate_propagation_ratio(make_complete(n), True, cfg, single_info_expectation_complete(n))
    low, high = propagation_ratio_bounds(n)
    assert ratio.within(low, high, k_sigma=3)


@pytest.mark.slow
@pytest.mark.parametrize("leaves", [4, 16, 64])
def test_star_ratio_matches_closed_form(leaves):
    cfg = EstimatorConfig(reps=10_000, master_seed=12)
    ratio = estimate_propagation_ratio(make_star(leaves), False, cfg, star_hub_expectation(leaves))
    assert ratio.within(star_ratio(leaves), star_ratio(leaves), k_sigma=3)


@pytest.mark.slow
def test_ring_ratio_decreases_with_size():
    cfg = EstimatorConfig(reps=5000, master_seed=13)
    small, large = (estimate_propagation_ratio(make_ring(n), True, cfg, ring_single_info_expectation(n))
                    for n in (16, 256))
    assert large.ratio < small.ratio


@pytest.mark.slow
def test_continuous_flooding_time_on_complete_1024():
    n = 1024
    g = make_complete(n)
    cfg = EstimatorConfig(reps=2000, master_seed=14)
    total = estimate(g, DISTINCT, StopSpec(want_total=True), cfg)["tau_V"]
    m1 = float(single_info_expectation_complete(n))
    low, high = propagation_ratio_bounds(n)
    margin = 3 * total.stderr
    converted = continuous_flooding_expectation(total.mean, g.edge_count)
    assert (float(low) * m1 - margin) / g.edge_count <= converted <= (float(high) * m1 + margin) / g.edge_count
    # the window top 3 H(n-1) / n is about (1 + 0.58 / ln n) times 3 ln(n) / n
    assert 0.95 <= converted / asymptotic_flooding_time(n) <= 1.15
