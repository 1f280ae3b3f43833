import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcf.aug_path import initial_delta, solve_cas, solve_ssp
from mcf.errors import NegativeCost
from mcf.graph import build_network, magnitudes
from mcf.report import Status
from mcf.verify import verify_optimality

from oracles import feasible_network, infeasible_cut, lp_optimum, zero_supply


def test_ssp_t1(t1):
    report, flow = solve_ssp(t1)
    assert report.objective == 12
    assert report.counters["augmentations"] <= 4
    assert verify_optimality(t1, flow).optimal


def test_ssp_unit_path():
    net = build_network(6, [(i, i + 1) for i in range(5)], [1] * 5, [1] * 5, [1, 0, 0, 0, 0, -1])
    report, _ = solve_ssp(net)
    assert report.objective == 5
    assert report.counters["augmentations"] == 1


def test_zero_supply_no_augmentations():
    for solver in (solve_ssp, solve_cas):
        report, _ = solver(zero_supply())
        assert report.objective == 0 and report.counters["augmentations"] == 0


def test_negative_cost_rejected():
    net = build_network(2, [(0, 1)], [1], [-1], [0, 0])
    with pytest.raises(NegativeCost):
        solve_ssp(net)
    with pytest.raises(NegativeCost):
        solve_cas(net)


def test_initial_delta():
    assert initial_delta(4, 4) == 4
    assert initial_delta(1000, 4) == 256
    assert initial_delta(1, 4) == 1
    assert initial_delta(3, 4) == 1


def test_cas_t1(t1):
    phases = []
    report, _ = solve_cas(t1, on_phase=phases.append)
    assert magnitudes(t1)[0] == 4
    assert phases == [4, 1]
    assert report.objective == 12


def test_cas_phase_sequence():
    net = build_network(3, [(0, 1), (1, 2), (0, 2)], [1000, 1000, 300], [1, 1, 5], [700, 0, -700])
    phases = []
    report, _ = solve_cas(net, on_phase=phases.append)
    assert phases == [256, 64, 16, 4, 1]
    assert report.objective == lp_optimum(net)


def test_cas_unit_capacity_matches_ssp():
    net = build_network(4, [(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)], [1] * 5, [1, 2, 2, 1, 1],
                        [1, 0, 0, -1])
    phases = []
    cas, _ = solve_cas(net, on_phase=phases.append)
    ssp, _ = solve_ssp(net)
    assert phases == [1]
    assert cas.objective == ssp.objective
    assert cas.counters["augmentations"] == ssp.counters["augmentations"]


@pytest.mark.parametrize("seed", range(5))
def test_infeasible(seed):
    net = infeasible_cut(seed)
    for report, flow in (solve_ssp(net), solve_cas(net), solve_cas(net, extend_graph=True)):
        assert report.status is Status.INFEASIBLE and flow is None


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_ssp_keeps_reduced_costs_nonnegative(seed):
    net = feasible_network(seed, n_range=(2, 20))
    total = int(net.supply[net.supply > 0].sum())

    def check(event):
        s = event.store
        rc = s.cost + event.potential[s.tail] - event.potential[s.head]
        assert np.all(rc[s.rescap > 0] >= 0)

    report, flow = solve_ssp(net, on_augment=check)
    assert report.counters["augmentations"] <= total
    assert report.objective == lp_optimum(net)


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 4, 8]), st.booleans())
def test_cas_bottleneck_and_agreement(seed, alpha, extend):
    net = feasible_network(seed, n_range=(2, 20), cap=(0, 200))

    def check(event):
        assert event.bottleneck >= event.delta
        s = event.store
        rc = s.cost + event.potential[s.tail] - event.potential[s.head]
        assert np.all(rc[s.rescap >= event.delta] >= 0)

    report, flow = solve_cas(net, alpha=alpha, extend_graph=extend, on_augment=check)
    assert report.objective == solve_ssp(net)[0].objective
    assert verify_optimality(net, flow).optimal
