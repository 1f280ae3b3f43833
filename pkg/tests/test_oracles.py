"""The reference oracles agree with each other, so disagreements point at solvers."""

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from oracles import (enumerate_optimum, lp_optimum, random_network, simple_cycles_min_mean, t1)


def test_t1_reference_values():
    assert enumerate_optimum(t1()) == 12
    assert lp_optimum(t1()) == 12


def test_cycle_enumeration_by_hand():
    assert simple_cycles_min_mean(3, [(0, 1), (1, 2), (2, 0)], [-1, 2, -4]) == -1
    assert simple_cycles_min_mean(2, [(0, 1), (1, 0), (0, 1)], [1, 4, 0]) == Fraction(2)
    assert simple_cycles_min_mean(3, [(0, 1), (1, 2)], [1, 1]) is None


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_enumeration_matches_lp(seed):
    net = random_network(seed, n_range=(2, 5), extra=(0, 4), cap=(0, 3), cost=(-5, 5),
                         max_arcs=8)
    assert enumerate_optimum(net) == lp_optimum(net)
