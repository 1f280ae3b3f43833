import numpy as np
import pytest
from hypothesis import given, strategies as st

from mcf.errors import Disconnected, InvalidArc, NegativeCapacity, OverflowRisk, UnbalancedSupply
from mcf.graph import (FlowState, build_network, excesses, magnitudes, node_excess,
                       reduced_cost, residual_view)

from oracles import feasible_instance


def test_minimal_network():
    net = build_network(2, [(0, 1)], [1], [5], [1, -1])
    assert net.n == 2 and net.m == 1
    assert magnitudes(net) == (1, 5)


@pytest.mark.parametrize("kwargs, error", [
    (dict(n=2, arcs=[(0, 1)], capacities=[1], costs=[5], supplies=[1, 0]), UnbalancedSupply),
    (dict(n=2, arcs=[(0, 1)], capacities=[-1], costs=[5], supplies=[0, 0]), NegativeCapacity),
    (dict(n=3, arcs=[(0, 1)], capacities=[1], costs=[5], supplies=[0, 0, 0]), Disconnected),
    (dict(n=2, arcs=[(0, 2)], capacities=[1], costs=[5], supplies=[0, 0]), InvalidArc),
    (dict(n=2, arcs=[(1, 1), (0, 1)], capacities=[1, 1], costs=[5, 5], supplies=[0, 0]),
     InvalidArc),
    (dict(n=2, arcs=[(0, 1)], capacities=[1], costs=[2 ** 60], supplies=[0, 0]), OverflowRisk),
])
def test_build_rejects(kwargs, error):
    with pytest.raises(error):
        build_network(**kwargs)


def test_t1_magnitudes(t1):
    assert magnitudes(t1) == (4, 3)
    zero = build_network(2, [(0, 1)], [3], [0], [0, 0])
    assert magnitudes(zero)[1] == 0


def test_network_is_immutable(t1):
    with pytest.raises(ValueError):
        t1.cost[0] = 7


def test_residual_of_zero_flow(t1):
    store = residual_view(t1)
    fwd = store.fwd_index
    assert np.array_equal(store.rescap[fwd], t1.capacity)
    assert np.all(store.rescap[store.sister[fwd]] == 0)


def test_residual_after_flow_on_first_arc(t1):
    flow = np.zeros(t1.m, dtype=np.int64)
    flow[0] = 2
    store = residual_view(t1, flow)
    a = store.fwd_index[0]
    assert store.rescap[a] == 1
    assert store.rescap[store.sister[a]] == 2
    assert store.tail[store.sister[a]] == 1 and store.head[store.sister[a]] == 0


def test_reduced_cost_examples():
    assert reduced_cost(5, 0, 0) == 5
    assert reduced_cost(5, 2, 7) == 0


def test_node_excess(t1):
    zero = np.zeros(t1.m, dtype=np.int64)
    assert list(excesses(t1, zero)) == [4, 0, 0, -4]
    flow = zero.copy()
    flow[0] = 3
    assert node_excess(t1, flow, 0) == 1
    assert node_excess(t1, flow, 1) == 3


@given(st.integers(0, 10 ** 6))
def test_residual_structure(seed):
    net, flow = feasible_instance(seed, n_range=(2, 12), cap=(0, 9), cost=(-9, 9))
    store = residual_view(net, flow)
    size = store.size
    assert size == 2 * net.m
    assert np.array_equal(store.sister[store.sister], np.arange(size))
    assert np.all(store.cost + store.cost[store.sister] == 0)
    fwd = store.fwd_index
    assert np.array_equal(store.rescap[fwd] + store.rescap[store.sister[fwd]], net.capacity)
    # per-node ranges partition [0, 2m)
    assert store.first[0] == 0 and store.first[-1] == size
    assert np.all(np.diff(store.first) >= 0)
    for v in range(net.n):
        assert np.all(store.tail[store.out_arcs(v)] == v)
    assert np.array_equal(store.flow(), flow)


@given(st.integers(0, 10 ** 6))
def test_cycle_reduced_costs_telescope(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    cycle = list(rng.permutation(n))
    costs = rng.integers(-20, 20, size=n)
    pi = rng.integers(-100, 100, size=n)
    total = sum(reduced_cost(int(costs[k]), int(pi[cycle[k]]), int(pi[cycle[(k + 1) % n]]))
                for k in range(n))
    assert total == costs.sum()


@given(st.integers(0, 10 ** 6))
def test_excess_sums_to_zero(seed):
    net, flow = feasible_instance(seed, n_range=(2, 10))
    rng = np.random.default_rng(seed)
    pseudo = rng.integers(0, net.capacity + 1)
    state = FlowState.from_flow(net, pseudo)
    assert state.excess.sum() == 0
    assert np.all(excesses(net, flow) == 0)
