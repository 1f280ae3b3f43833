"""Problem instances, the residual network and shared arithmetic.

Nodes are ``0..n-1`` and arcs ``0..m-1``.  All numeric data are 64-bit signed
integers; a build-time headroom check rejects instances whose magnitudes could
overflow the scaled arithmetic used by the solvers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    Disconnected,
    InvalidArc,
    NegativeCapacity,
    NetworkError,
    OverflowRisk,
    UnbalancedSupply,
)

INT64_MAX = np.iinfo(np.int64).max
# largest cost-scaling factor any solver may request
ALPHA_MAX = 64


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.int64).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable min-cost flow instance.

    ``objective_offset`` is a constant added to every reported objective; it is
    nonzero only for instances produced by lower-bound elimination.
    """

    n: int
    tail: np.ndarray
    head: np.ndarray
    capacity: np.ndarray
    cost: np.ndarray
    supply: np.ndarray
    objective_offset: int = 0

    @property
    def m(self) -> int:
        return len(self.tail)

    def arcs(self) -> list[tuple[int, int]]:
        return list(zip(self.tail.tolist(), self.head.tolist()))

    def objective(self, flow) -> int:
        flow = np.asarray(flow, dtype=np.int64)
        return int(np.dot(flow, self.cost)) + self.objective_offset

    def __eq__(self, other) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.n == other.n
            and self.objective_offset == other.objective_offset
            and np.array_equal(self.tail, other.tail)
            and np.array_equal(self.head, other.head)
            and np.array_equal(self.capacity, other.capacity)
            and np.array_equal(self.cost, other.cost)
            and np.array_equal(self.supply, other.supply)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Network(n={self.n}, m={self.m})"


def build_network(
    n: int,
    arcs: Sequence[tuple[int, int]] | np.ndarray,
    capacities: Sequence[int] | np.ndarray,
    costs: Sequence[int] | np.ndarray,
    supplies: Sequence[int] | np.ndarray,
    *,
    objective_offset: int = 0,
) -> Network:
    """Validate raw data and return a :class:`Network`.

    Raises:
        UnbalancedSupply: supplies do not sum to zero.
        NegativeCapacity: some capacity is below zero.
        Disconnected: the underlying undirected graph is not connected.
        InvalidArc: an endpoint is out of range, or an arc is a self-loop.
        OverflowRisk: magnitudes exceed the 64-bit headroom.
    """
    if n < 1:
        raise NetworkError("a network needs at least one node")
    arc_arr = np.array(arcs, dtype=np.int64).reshape(-1, 2)
    m = len(arc_arr)
    tail, head = arc_arr[:, 0], arc_arr[:, 1]
    if not (len(capacities) == len(costs) == m):
        raise NetworkError("arcs, capacities and costs differ in length")
    if len(supplies) != n:
        raise NetworkError("supplies must have one entry per node")

    # bounds are checked on Python ints before the int64 conversion can wrap
    cap_py = [int(u) for u in capacities]
    cost_py = [int(c) for c in costs]
    sup_py = [int(b) for b in supplies]
    if sum(sup_py) != 0:
        raise UnbalancedSupply(f"supplies sum to {sum(sup_py)}, expected 0")
    if any(u < 0 for u in cap_py):
        raise NegativeCapacity("arc capacities must be nonnegative")
    if m and (tail.min() < 0 or head.min() < 0 or tail.max() >= n or head.max() >= n):
        raise InvalidArc(f"arc endpoint outside [0, {n})")
    if m and np.any(tail == head):
        raise InvalidArc("self-loops are not allowed")

    U = max([abs(b) for b in sup_py] + cap_py + [0])
    C = max([abs(c) for c in cost_py] + [0])
    if 2 * ALPHA_MAX * n * max(C, 1) > INT64_MAX or n * U * C > INT64_MAX:
        raise OverflowRisk(f"n={n}, U={U}, C={C} exceed 64-bit headroom")

    if n > 1:
        graph = coo_matrix((np.ones(m, dtype=np.int8), (tail, head)), shape=(n, n))
        ncomp, _ = connected_components(graph, directed=True, connection="weak")
        if ncomp != 1:
            raise Disconnected(f"graph has {ncomp} weakly connected components")

    return Network(
        n=n,
        tail=_frozen(tail, "tail"),
        head=_frozen(head, "head"),
        capacity=_frozen(cap_py, "capacity"),
        cost=_frozen(cost_py, "cost"),
        supply=_frozen(sup_py, "supply"),
        objective_offset=int(objective_offset),
    )


def magnitudes(network: Network) -> tuple[int, int]:
    """Return ``(U, C)``: the largest |supply| or capacity, the largest |cost|."""
    U = 0
    if network.n:
        U = int(np.abs(network.supply).max())
    if network.m:
        U = max(U, int(network.capacity.max()))
    C = int(np.abs(network.cost).max()) if network.m else 0
    return U, C


def reduced_cost(cost: int, pi_tail: int, pi_head: int) -> int:
    return cost + pi_tail - pi_head


def excesses(network: Network, flow) -> np.ndarray:
    """Signed excess of every node: supply plus inflow minus outflow."""
    flow = np.asarray(flow, dtype=np.int64)
    e = network.supply.copy()
    np.add.at(e, network.head, flow)
    np.subtract.at(e, network.tail, flow)
    return e


def node_excess(network: Network, flow, node: int) -> int:
    flow = np.asarray(flow, dtype=np.int64)
    inflow = int(flow[network.head == node].sum())
    outflow = int(flow[network.tail == node].sum())
    return int(network.supply[node]) + inflow - outflow


@dataclass
class FlowState:
    """Mutable solver state over the original arcs."""

    flow: np.ndarray
    potential: np.ndarray
    excess: np.ndarray

    @classmethod
    def zero(cls, network: Network) -> "FlowState":
        return cls(
            flow=np.zeros(network.m, dtype=np.int64),
            potential=np.zeros(network.n, dtype=np.int64),
            excess=network.supply.copy(),
        )

    @classmethod
    def from_flow(cls, network: Network, flow, potential=None) -> "FlowState":
        flow = np.array(flow, dtype=np.int64)
        if potential is None:
            potential = np.zeros(network.n, dtype=np.int64)
        return cls(flow=flow, potential=np.array(potential, dtype=np.int64),
                   excess=excesses(network, flow))


@dataclass
class ResidualStore:
    """Paired forward/backward residual arcs in per-node contiguous ranges.

    Residual arc ``a`` leaves ``tail[a]``, enters ``head[a]`` and has residual
    capacity ``rescap[a]``; ``sister[a]`` is its reverse.  The outgoing arcs of
    node ``v`` are ``first[v]..first[v+1]-1``.  ``arc[a]`` is the original arc
    and ``forward[a]`` tells the orientation.  Arcs with zero residual capacity
    stay in the store and are simply skipped by traversals.
    """

    n: int
    first: np.ndarray
    tail: np.ndarray
    head: np.ndarray
    sister: np.ndarray
    cost: np.ndarray
    rescap: np.ndarray
    arc: np.ndarray
    forward: np.ndarray
    fwd_index: np.ndarray  # original arc -> its forward residual arc

    @property
    def size(self) -> int:
        return len(self.head)

    def out_arcs(self, v: int) -> range:
        return range(int(self.first[v]), int(self.first[v + 1]))

    def push(self, a: int, delta: int) -> None:
        self.rescap[a] -= delta
        self.rescap[self.sister[a]] += delta

    def flow(self) -> np.ndarray:
        """Flow on the original arcs (the residual capacity of each backward arc)."""
        return self.rescap[self.sister[self.fwd_index]].copy()

    def reduced_costs(self, potential) -> np.ndarray:
        potential = np.asarray(potential)
        return self.cost + potential[self.tail] - potential[self.head]


def residual_view(network: Network, flow=None, cost_scale: int = 1) -> ResidualStore:
    """Build the residual store for ``flow`` (zero flow if omitted)."""
    m = network.m
    if flow is None:
        flow = np.zeros(m, dtype=np.int64)
    flow = np.asarray(flow, dtype=np.int64)
    if np.any(flow < 0) or np.any(flow > network.capacity):
        raise NetworkError("flow violates capacity bounds")
    # provisional id 2a is the forward copy of arc a, 2a+1 the backward copy
    tails = np.empty(2 * m, dtype=np.int64)
    heads = np.empty(2 * m, dtype=np.int64)
    tails[0::2], tails[1::2] = network.tail, network.head
    heads[0::2], heads[1::2] = network.head, network.tail
    order = np.argsort(tails, kind="stable")
    pos = np.empty(2 * m, dtype=np.int64)
    pos[order] = np.arange(2 * m, dtype=np.int64)

    cost = np.empty(2 * m, dtype=np.int64)
    cost[0::2], cost[1::2] = network.cost * cost_scale, -network.cost * cost_scale
    rescap = np.empty(2 * m, dtype=np.int64)
    rescap[0::2], rescap[1::2] = network.capacity - flow, flow
    orig = np.repeat(np.arange(m, dtype=np.int64), 2)
    fwd = np.zeros(2 * m, dtype=bool)
    fwd[0::2] = True

    first = np.zeros(network.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(tails, minlength=network.n), out=first[1:])
    return ResidualStore(
        n=network.n,
        first=first,
        tail=tails[order],
        head=heads[order],
        sister=pos[order ^ 1],
        cost=cost[order],
        rescap=rescap[order],
        arc=orig[order],
        forward=fwd[order],
        fwd_index=pos[0::2].copy(),
    )
