import pytest
from gmpy2 import mpq

from gossip_flooding.common.errors import InvalidSizeError, OracleCapExceededError, UnreachableTargetError
from gossip_flooding.exact_formulas import recurrence_residual, star_total_expectation
from gossip_flooding.graphs import make_complete, make_path, make_star
from gossip_flooding.markov_oracle import (enumerate_reachable, exact_tables, expected_hitting_time,
                                           hitting_time_cdf, reversal_gap)
from gossip_flooding.rumor_process import Scenario, Target

DISTINCT = Scenario.distinct_all()


def test_two_sites_finish_in_one_step():
    assert expected_hitting_time(make_complete(2), DISTINCT, "total") == 1


def test_tables_for_three_sites():
    table = exact_tables(3)
    assert table.M == (3, mpq(7, 2), 4)
    assert table.A == (mpq(3, 2), 3)
    assert table.Y0 == 3


def test_tables_for_four_sites_satisfy_the_recurrence_and_chains():
    table = exact_tables(4)
    for k in (2, 3):
        assert recurrence_residual(4, k, table.m_value(k), table.a_value(k + 1), table.a_value(k)) == 0
    assert table.interleaving_holds()
    assert table.m_monotone()
    assert table.a_monotone()
    assert table.Y0 == table.m_value(1) == mpq(11, 2)
    assert 6 <= table.m_value(4) <= mpq(33, 4)


def test_table_size_limits():
    with pytest.raises(InvalidSizeError):
        exact_tables(2)
    with pytest.raises(OracleCapExceededError):
        exact_tables(5)


@pytest.mark.parametrize("leaves", [1, 2, 3])
def test_star_total_time_matches_closed_form(leaves):
    assert expected_hitting_time(make_star(leaves), DISTINCT, "total") == star_total_expectation(leaves)


def test_cdf_on_two_sites():
    assert hitting_time_cdf(make_complete(2), DISTINCT, "total", 3) == [0, 1, 1, 1]


def test_cdf_of_one_information_on_three_sites():
    # step 1 must touch site 0 (2 of 3 edges), step 2 must reach the third site (2 of 3 edges)
    cdf = hitting_time_cdf(make_complete(3), DISTINCT, [0], 2)
    assert cdf == [0, 0, mpq(4, 9)]


def test_cdf_is_a_distribution_function():
    cdf = hitting_time_cdf(make_complete(3), DISTINCT, Target.total(), 40)
    assert cdf[0] == 0
    assert all(a <= b for a, b in zip(cdf, cdf[1:]))
    assert 1 - cdf[-1] < mpq(1, 1000)


@pytest.mark.parametrize("g, x", [(make_complete(3), 0), (make_path(3), 0), (make_path(3), 1), (make_star(3), 1)])
def test_reversal_gap_is_zero(g, x):
    assert reversal_gap(g, x, 30) == 0


def test_expected_y_equals_expected_tau_on_a_path():
    g = make_path(3)
    assert expected_hitting_time(g, DISTINCT, Target.fully_informed(0)) == expected_hitting_time(g, DISTINCT, [0])


def test_float_path_agrees_with_exact():
    assert expected_hitting_time(make_complete(3), DISTINCT, "total", float_path=True) == pytest.approx(4.0)


def test_state_cap_reports_states_reached():
    with pytest.raises(OracleCapExceededError) as info:
        enumerate_reachable(make_complete(4), DISTINCT, state_cap=10)
    assert info.value.states_reached == 10


def test_unreachable_target():
    with pytest.raises(UnreachableTargetError):
        expected_hitting_time(make_complete(2), DISTINCT, [5])


def test_reversal_gap_rejects_unknown_site():
    with pytest.raises(InvalidSizeError):
        reversal_gap(make_path(3), 3, 10)
