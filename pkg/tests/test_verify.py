from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mcf.errors import InfeasibleFlow, NegativeCycle
from mcf.graph import build_network, residual_view
from mcf.minmean import min_mean_cycle
from mcf.solvers import solve
from mcf.verify import (check_feasible, complementary_slackness, epsilon_of_flow,
                        find_negative_cycle, is_epsilon_optimal, optimal_potentials,
                        reduced_cost_certificate, residual_min_mean, verify_optimality)

from oracles import T1_OPTIMAL_FLOW, T1_SUBOPTIMAL_FLOW, feasible_instance, zero_supply


def test_check_feasible(t1):
    assert check_feasible(t1, T1_OPTIMAL_FLOW) == (True, [])
    ok, problems = check_feasible(t1, np.zeros(t1.m))
    assert not ok
    assert any("node 0" in p for p in problems) and any("node 3" in p for p in problems)
    over = list(T1_OPTIMAL_FLOW)
    over[4] = 5
    ok, problems = check_feasible(t1, over)
    assert not ok and any("arc 4" in p for p in problems)


def test_t1_optimal(t1):
    report = verify_optimality(t1, T1_OPTIMAL_FLOW)
    assert report.feasible and report.optimal
    assert t1.objective(T1_OPTIMAL_FLOW) == 12
    assert set(report.verdicts.values()) == {True}
    store = residual_view(t1, T1_OPTIMAL_FLOW)
    assert reduced_cost_certificate(store, report.witness)


def test_t1_suboptimal(t1):
    report = verify_optimality(t1, T1_SUBOPTIMAL_FLOW)
    assert report.feasible and not report.optimal
    assert t1.objective(T1_SUBOPTIMAL_FLOW) == 14
    store = residual_view(t1, T1_SUBOPTIMAL_FLOW)
    cycle = report.witness
    assert sum(int(store.cost[a]) for a in cycle) < 0
    # the only negative residual cycle is 1->2->3 then back along 1->3 reversed
    nodes = {int(store.tail[a]) for a in cycle}
    assert nodes == {1, 2, 3}
    assert set(report.verdicts.values()) == {False}


def test_zero_supply_is_optimal():
    net = zero_supply()
    report = verify_optimality(net, np.zeros(net.m))
    assert report.optimal and net.objective(np.zeros(net.m)) == 0


def test_negative_triangle():
    net = build_network(3, [(0, 1), (1, 2), (2, 0)], [1, 1, 1], [-1, 2, -4], [0, 0, 0])
    store = residual_view(net)
    cycle = find_negative_cycle(store)
    assert sorted(int(store.arc[a]) for a in cycle) == [0, 1, 2]
    assert sum(int(store.cost[a]) for a in cycle) == -3
    with pytest.raises(NegativeCycle):
        optimal_potentials(store)


def test_no_cycle_with_nonnegative_costs(t1):
    assert find_negative_cycle(residual_view(t1)) is None


def test_zero_cost_potentials():
    net = build_network(3, [(0, 1), (1, 2)], [1, 1], [0, 0], [1, 0, -1])
    assert optimal_potentials(residual_view(net)) == [0, 0, 0]


def test_epsilon_examples(t1):
    assert epsilon_of_flow(t1, T1_OPTIMAL_FLOW).epsilon == 0
    cert = epsilon_of_flow(t1, T1_SUBOPTIMAL_FLOW)
    store = residual_view(t1, T1_SUBOPTIMAL_FLOW)
    _, mean = residual_min_mean(store, method="karp")
    assert cert.epsilon == -mean.as_fraction() == Fraction(1, 3)
    assert is_epsilon_optimal(store, cert.potentials, cert.epsilon)
    # any eps >= C works with zero potentials
    assert is_epsilon_optimal(store, [0] * t1.n, 3)
    with pytest.raises(InfeasibleFlow):
        epsilon_of_flow(t1, np.zeros(t1.m))


@given(st.integers(0, 10 ** 6))
def test_three_verdicts_agree(seed):
    net, flow = feasible_instance(seed, n_range=(2, 10), cap=(0, 6), cost=(-9, 9))
    report = verify_optimality(net, flow)
    assert len(set(report.verdicts.values())) == 1
    assert report.optimal == (report.epsilon == 0)
    if report.optimal:
        assert complementary_slackness(net, flow, report.witness)
    else:
        store = residual_view(net, flow)
        assert sum(int(store.cost[a]) for a in report.witness) < 0


@given(st.integers(0, 10 ** 6))
def test_epsilon_matches_min_mean(seed):
    net, flow = feasible_instance(seed, n_range=(2, 10), cap=(0, 6), cost=(-9, 9))
    eps = epsilon_of_flow(net, flow).epsilon
    store = residual_view(net, flow)
    live = np.flatnonzero(store.rescap > 0)
    found = min_mean_cycle(net.n, [(int(store.tail[a]), int(store.head[a])) for a in live],
                           [int(store.cost[a]) for a in live], method="hartmann-orlin")
    expected = Fraction(0) if found is None else max(Fraction(0), -found[1].as_fraction())
    assert eps == expected
    # below 1/n means optimal
    if eps < Fraction(1, net.n):
        assert verify_optimality(net, flow).optimal


@given(st.integers(0, 10 ** 6))
def test_solver_output_verifies(seed):
    net = feasible_instance(seed, n_range=(2, 12), cost=(-9, 9))[0]
    report, flow = solve(net, "ns")
    assert verify_optimality(net, flow).optimal
