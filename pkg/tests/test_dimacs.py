import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mcf.dimacs import parse_dimacs, parse_solution, write_dimacs, write_solution
from mcf.errors import CapBelowLow, DimacsSyntaxError, IdOutOfRange, MissingProblemLine
from mcf.solvers import solve

from oracles import feasible_network, lp_optimum, zero_supply


def test_parse_minimal():
    net = parse_dimacs("p min 2 1\nn 1 1\nn 2 -1\na 1 2 0 1 5\n")
    assert net.n == 2 and net.m == 1
    assert list(net.supply) == [1, -1]
    assert net.arcs() == [(0, 1)]
    assert list(net.capacity) == [1] and list(net.cost) == [5]


def test_lower_bound_transform():
    net = parse_dimacs("c lower bound\np min 2 1\nn 1 4\nn 2 -4\na 1 2 2 5 7\n")
    assert list(net.capacity) == [3]
    assert list(net.supply) == [2, -2]
    assert net.objective_offset == 14
    report, flow = solve(net, "ns")
    assert report.objective == 4 * 7
    assert list(flow) == [2]


@pytest.mark.parametrize("text, error", [
    ("p max 2 1\na 1 2 0 1 5\n", DimacsSyntaxError),
    ("p min 2 1\np min 2 1\n", DimacsSyntaxError),
    ("a 1 2 0 1 5\np min 2 1\n", MissingProblemLine),
    ("c only a comment\n", MissingProblemLine),
    ("p min 2 1\na 1 3 0 1 5\n", IdOutOfRange),
    ("p min 2 1\nn 0 1\na 1 2 0 1 5\n", IdOutOfRange),
    ("p min 2 1\na 1 2 4 3 5\n", CapBelowLow),
    ("p min 2 1\na 1 2 -1 3 5\n", DimacsSyntaxError),
    ("p min 2 2\na 1 2 0 3 5\n", DimacsSyntaxError),
    ("p min 2 1\na 1 2 0 x 5\n", DimacsSyntaxError),
    ("p min 2 1\nn 1 1\nn 1 1\na 1 2 0 3 5\n", DimacsSyntaxError),
    ("p min 2 1\nq 1\n", DimacsSyntaxError),
])
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_dimacs(text)


def test_error_carries_line_number():
    with pytest.raises(IdOutOfRange) as info:
        parse_dimacs("c x\np min 2 1\na 1 9 0 1 5\n")
    assert "3" in str(info.value)


def test_zero_supply_solution():
    net = zero_supply()
    report, flow = solve(net, "ns")
    assert write_solution(net, report, flow) == "s 0\n"


def test_t1_solution_text(t1):
    report, flow = solve(t1, "ns")
    text = write_solution(t1, report, flow)
    lines = text.splitlines()
    assert lines[0] == "s 12"
    assert len(lines) == 5 and all(line.startswith("f ") for line in lines[1:])
    objective, back = parse_solution(t1, text)
    assert objective == 12 and list(back) == list(flow)


def test_parallel_arcs_in_solution():
    net = parse_dimacs("p min 2 2\nn 1 3\nn 2 -3\na 1 2 0 2 5\na 1 2 0 2 1\n")
    report, flow = solve(net, "ns")
    _, back = parse_solution(net, write_solution(net, report, flow))
    assert net.objective(back) == report.objective == 2 * 1 + 5


@given(st.integers(0, 10 ** 6))
def test_round_trip(seed):
    net = feasible_network(seed, n_range=(2, 20), cost=(-40, 40))
    assert parse_dimacs(write_dimacs(net)) == net


@given(st.integers(0, 10 ** 6))
def test_offset_bookkeeping(seed):
    net = feasible_network(seed, n_range=(2, 10), cap=(0, 8))
    rng = random.Random(seed)
    lows = [rng.randint(0, int(u)) for u in net.capacity]
    lines = [f"p min {net.n} {net.m}"]
    lines += [f"n {v + 1} {b}" for v, b in enumerate(net.supply.tolist()) if b]
    lines += [f"a {i + 1} {j + 1} {lo} {u} {c}" for (i, j), lo, u, c in
              zip(net.arcs(), lows, net.capacity.tolist(), net.cost.tolist())]
    shifted = parse_dimacs("\n".join(lines))
    again = parse_dimacs(write_dimacs(shifted))
    assert again == shifted and again.objective_offset == shifted.objective_offset
    expected = lp_optimum(net, lower=lows)
    report, flow = solve(again, "cos")
    assert (report.objective if report.optimal else None) == expected
    if expected is not None:
        original = np.asarray(flow) + np.asarray(lows)
        assert int(original @ net.cost) == expected
