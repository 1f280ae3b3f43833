"""DIMACS minimum-cost flow format.

Input lines::

    c <comment>
    p min <n> <m>
    n <id> <supply>
    a <src> <dst> <low> <cap> <cost>

Node ids are 1-based.  Lower bounds are removed on input (``x' = x - low``)
and their cost ``sum(low * cost)`` is kept as the network's objective offset.
The writer emits lower bounds of zero and records a nonzero offset in a
``c offset <value>`` comment, which the parser reads back.
"""

from __future__ import annotations

import numpy as np

from .errors import CapBelowLow, DimacsSyntaxError, IdOutOfRange, MissingProblemLine
from .graph import Network, build_network
from .report import SolverReport


def _ints(fields: list[str], count: int, lineno: int) -> list[int]:
    if len(fields) != count:
        raise DimacsSyntaxError(f"expected {count} fields, got {len(fields)}", lineno)
    try:
        return [int(f) for f in fields]
    except ValueError as exc:
        raise DimacsSyntaxError(f"not an integer: {exc}", lineno) from None


def parse_dimacs(text: str) -> Network:
    """Parse a DIMACS min-cost flow problem.

    Raises:
        DimacsSyntaxError, IdOutOfRange, CapBelowLow, MissingProblemLine, and
        the network validation errors of :func:`build_network`.
    """
    n = m = None
    supply: list[int] = []
    seen_node: set[int] = set()
    arcs: list[tuple[int, int]] = []
    caps: list[int] = []
    costs: list[int] = []
    offset = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split()
        if not fields:
            continue
        kind = fields[0]
        if kind == "c":
            if len(fields) == 3 and fields[1] == "offset":
                offset += _ints(fields[2:], 1, lineno)[0]
            continue
        if kind == "p":
            if n is not None:
                raise DimacsSyntaxError("second problem line", lineno)
            if len(fields) != 4 or fields[1] != "min":
                raise DimacsSyntaxError("problem line must read 'p min <n> <m>'", lineno)
            n, m = _ints(fields[2:], 2, lineno)
            if n < 1 or m < 0:
                raise DimacsSyntaxError("node count must be positive", lineno)
            supply = [0] * n
            continue
        if n is None:
            raise MissingProblemLine(f"'{kind}' line before the problem line", lineno)
        if kind == "n":
            node, b = _ints(fields[1:], 2, lineno)
            if not 1 <= node <= n:
                raise IdOutOfRange(f"node id {node} outside 1..{n}", lineno)
            if node in seen_node:
                raise DimacsSyntaxError(f"node {node} listed twice", lineno)
            seen_node.add(node)
            supply[node - 1] += b
        elif kind == "a":
            src, dst, low, cap, cost = _ints(fields[1:], 5, lineno)
            for node in (src, dst):
                if not 1 <= node <= n:
                    raise IdOutOfRange(f"node id {node} outside 1..{n}", lineno)
            if cap < low:
                raise CapBelowLow(f"capacity {cap} below lower bound {low}", lineno)
            if low < 0:
                raise DimacsSyntaxError("negative lower bound", lineno)
            arcs.append((src - 1, dst - 1))
            caps.append(cap - low)
            costs.append(cost)
            supply[src - 1] -= low
            supply[dst - 1] += low
            offset += low * cost
        else:
            raise DimacsSyntaxError(f"unknown line type '{kind}'", lineno)
    if n is None:
        raise MissingProblemLine("no problem line")
    if len(arcs) != m:
        raise DimacsSyntaxError(f"problem line promises {m} arcs, found {len(arcs)}")
    return build_network(n, arcs, caps, costs, supply, objective_offset=offset)


def write_dimacs(network: Network) -> str:
    lines = []
    if network.objective_offset:
        lines.append(f"c offset {network.objective_offset}")
    lines.append(f"p min {network.n} {network.m}")
    for v, b in enumerate(network.supply.tolist()):
        if b:
            lines.append(f"n {v + 1} {b}")
    for (i, j), u, c in zip(network.arcs(), network.capacity.tolist(), network.cost.tolist()):
        lines.append(f"a {i + 1} {j + 1} 0 {u} {c}")
    return "\n".join(lines) + "\n"


def write_solution(network: Network, report: SolverReport, flow) -> str:
    """``s <objective>`` then ``f <src> <dst> <flow>`` per nonzero arc, in arc order."""
    lines = [f"s {report.objective}"]
    flow = np.asarray(flow, dtype=np.int64)
    for a in np.flatnonzero(flow).tolist():
        lines.append(f"f {network.tail[a] + 1} {network.head[a] + 1} {flow[a]}")
    return "\n".join(lines) + "\n"


def parse_solution(network: Network, text: str) -> tuple[int | None, np.ndarray]:
    """Read a solution file back into a per-arc flow vector.

    ``f`` lines for the same node pair are added up.  When parallel arcs join
    that pair, the total is spread over them cheapest first (lowest index on
    ties), which is how an optimal flow uses them.
    """
    by_pair: dict[tuple[int, int], list[int]] = {}
    for a, pair in enumerate(network.arcs()):
        by_pair.setdefault(pair, []).append(a)
    totals: dict[tuple[int, int], int] = {}
    objective = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split()
        if not fields or fields[0] == "c":
            continue
        if fields[0] == "s":
            objective = _ints(fields[1:], 1, lineno)[0]
        elif fields[0] == "f":
            src, dst, x = _ints(fields[1:], 3, lineno)
            pair = (src - 1, dst - 1)
            if pair not in by_pair:
                raise DimacsSyntaxError(f"no arc {src}->{dst}", lineno)
            totals[pair] = totals.get(pair, 0) + x
        else:
            raise DimacsSyntaxError(f"unknown line type '{fields[0]}'", lineno)
    flow = np.zeros(network.m, dtype=np.int64)
    for pair, total in totals.items():
        arcs = sorted(by_pair[pair], key=lambda a: (network.cost[a], a))
        for a in arcs:
            x = min(total, int(network.capacity[a]))
            flow[a] = x
            total -= x
        # anything left over lands on the last arc and shows up as a capacity violation
        flow[arcs[-1]] += total
    return objective, flow
