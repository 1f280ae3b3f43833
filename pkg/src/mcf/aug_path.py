"""Augmenting-path solvers: successive shortest path (SSP) and capacity scaling (CAS).

Both maintain a pseudoflow and potentials with nonnegative reduced costs on the
(Delta-)residual network.  Each augmentation runs Dijkstra from the lowest-index
excess node and stops as soon as a deficit node is permanently labelled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from .errors import NegativeCost
from .graph import Network, build_network, magnitudes, residual_view
from .report import Deadline, SolverReport, Status

CHUNK = 512  # augmentations per kernel call between timeout checks


@njit(cache=True)
def _sift_up(heap, pos, key, i):
    v = heap[i]
    k = key[v]
    while i > 0:
        p = (i - 1) >> 1
        u = heap[p]
        if key[u] <= k:
            break
        heap[i] = u
        pos[u] = i
        i = p
    heap[i] = v
    pos[v] = i


@njit(cache=True)
def _pop(heap, pos, key, size):
    top = heap[0]
    size -= 1
    if size > 0:
        v = heap[size]
        k = key[v]
        i = 0
        while True:
            c = 2 * i + 1
            if c >= size:
                break
            if c + 1 < size and key[heap[c + 1]] < key[heap[c]]:
                c += 1
            if key[heap[c]] >= k:
                break
            heap[i] = heap[c]
            pos[heap[i]] = i
            i = c
        heap[i] = v
        pos[v] = i
    return top, size


@njit(cache=True)
def _saturate_negative(first, head, sister, cost, rescap, pi, excess, delta):
    """Saturate Delta-residual arcs with negative reduced cost (phase start)."""
    n = len(pi)
    for u in range(n):
        for a in range(first[u], first[u + 1]):
            r = rescap[a]
            if r >= delta and cost[a] + pi[u] - pi[head[a]] < 0:
                rescap[a] = 0
                rescap[sister[a]] += r
                excess[u] -= r
                excess[head[a]] += r


@njit(cache=True)
def _phase(first, tail, head, sister, cost, rescap, pi, excess, delta, budget,
           skipped, ws_dist, ws_pred, ws_seen, ws_done, ws_heap, ws_pos, ws_order,
           stamp0, stats):
    """Run up to ``budget`` augmentations of one Delta-phase.

    Returns (code, stamp, last_bottleneck): code 0 means the phase is over,
    1 means the budget ran out.  ``skipped`` marks excess nodes that reach no
    deficit node in this phase.  stats: [augmentations, labelled, skips].
    """
    n = len(pi)
    stamp = stamp0
    done_count = 0
    last = 0
    while done_count < budget:
        s = -1
        for v in range(n):
            if excess[v] >= delta and skipped[v] == 0:
                s = v
                break
        if s < 0:
            return 0, stamp, last
        stamp += 1
        ws_seen[s] = stamp
        ws_dist[s] = 0
        ws_pred[s] = -1
        ws_heap[0] = s
        ws_pos[s] = 0
        size = 1
        nl = 0
        w = -1
        while size > 0:
            u, size = _pop(ws_heap, ws_pos, ws_dist, size)
            ws_done[u] = stamp
            ws_order[nl] = u
            nl += 1
            if excess[u] <= -delta:
                w = u
                break
            du = ws_dist[u] + pi[u]
            for a in range(first[u], first[u + 1]):
                if rescap[a] < delta:
                    continue
                v = head[a]
                if ws_done[v] == stamp:
                    continue
                nd = du + cost[a] - pi[v]
                if ws_seen[v] != stamp:
                    ws_seen[v] = stamp
                    ws_dist[v] = nd
                    ws_pred[v] = a
                    ws_heap[size] = v
                    ws_pos[v] = size
                    size += 1
                    _sift_up(ws_heap, ws_pos, ws_dist, size - 1)
                elif nd < ws_dist[v]:
                    ws_dist[v] = nd
                    ws_pred[v] = a
                    _sift_up(ws_heap, ws_pos, ws_dist, ws_pos[v])
        stats[1] += nl
        if w < 0:
            skipped[s] = 1
            stats[2] += 1
            continue
        dw = ws_dist[w]
        for j in range(nl):
            i = ws_order[j]
            pi[i] += ws_dist[i] - dw
        amount = min(excess[s], -excess[w])
        v = w
        while v != s:
            a = ws_pred[v]
            if rescap[a] < amount:
                amount = rescap[a]
            v = tail[a]
        v = w
        while v != s:
            a = ws_pred[v]
            rescap[a] -= amount
            rescap[sister[a]] += amount
            v = tail[a]
        excess[s] -= amount
        excess[w] += amount
        stats[0] += 1
        done_count += 1
        last = amount
    return 1, stamp, last


@dataclass
class DijkstraWorkspace:
    """Arrays reused by every Dijkstra run; ``stamp`` avoids per-run resets."""

    dist: np.ndarray
    pred: np.ndarray
    seen: np.ndarray
    done: np.ndarray
    heap: np.ndarray
    pos: np.ndarray
    order: np.ndarray
    stamp: int = 0

    @classmethod
    def for_nodes(cls, n: int) -> "DijkstraWorkspace":
        return cls(
            dist=np.zeros(n, dtype=np.int64),
            pred=np.full(n, -1, dtype=np.int64),
            seen=np.zeros(n, dtype=np.int64),
            done=np.zeros(n, dtype=np.int64),
            heap=np.zeros(n, dtype=np.int64),
            pos=np.zeros(n, dtype=np.int64),
            order=np.zeros(n, dtype=np.int64),
        )


@dataclass
class AugmentEvent:
    """Snapshot handed to ``on_augment`` after each augmentation."""

    delta: int
    bottleneck: int
    store: object
    potential: np.ndarray
    excess: np.ndarray


def _extended(network: Network) -> Network:
    """Add a hub node joined to every node in both directions at a prohibitive cost."""
    n = network.n
    U, C = magnitudes(network)
    big_u, big_c = max(n * U, 1), n * max(C, 1)
    arcs = network.arcs() + [(i, n) for i in range(n)] + [(n, i) for i in range(n)]
    caps = network.capacity.tolist() + [big_u] * (2 * n)
    costs = network.cost.tolist() + [big_c] * (2 * n)
    return build_network(n + 1, arcs, caps, costs, network.supply.tolist() + [0])


def _run(name, network, alpha, extend_graph, timeout, on_augment, on_phase, scaling):
    deadline = Deadline(timeout)
    if network.m and int(network.cost.min()) < 0:
        raise NegativeCost(f"{name} requires nonnegative arc costs")
    work = _extended(network) if extend_graph else network
    n = work.n
    store = residual_view(work)
    pi = np.zeros(n, dtype=np.int64)
    excess = work.supply.copy()
    ws = DijkstraWorkspace.for_nodes(n)
    stats = np.zeros(3, dtype=np.int64)
    U, _ = magnitudes(work)
    delta = initial_delta(U, alpha) if scaling else 1
    phases = []
    budget = 1 if on_augment is not None else CHUNK
    counters = {"phases": 0}

    def report(status, flow):
        counters.update(iterations=int(stats[0]), augmentations=int(stats[0]),
                        labelled=int(stats[1]), skips=int(stats[2]))
        objective = network.objective(flow) if status is Status.OPTIMAL else None
        return SolverReport(name, status, objective, dict(counters), deadline.elapsed_ms())

    while True:
        phases.append(delta)
        counters["phases"] += 1
        if on_phase is not None:
            on_phase(delta)
        _saturate_negative(store.first, store.head, store.sister, store.cost,
                           store.rescap, pi, excess, delta)
        skipped = np.zeros(n, dtype=np.int8)
        while True:
            code, ws.stamp, last = _phase(
                store.first, store.tail, store.head, store.sister, store.cost,
                store.rescap, pi, excess, delta, budget, skipped, ws.dist, ws.pred,
                ws.seen, ws.done, ws.heap, ws.pos, ws.order, ws.stamp, stats)
            if on_augment is not None and code == 1:
                on_augment(AugmentEvent(delta, int(last), store, pi, excess))
            if code == 0:
                break
            if deadline.expired():
                return report(Status.TIMEOUT, None), None
        if delta == 1:
            break
        delta //= alpha
    counters["first_delta"] = phases[0]
    if np.any(excess != 0):
        return report(Status.INFEASIBLE, None), None
    flow = store.flow()
    if extend_graph:
        if np.any(flow[network.m:] != 0):
            return report(Status.INFEASIBLE, None), None
        flow = flow[: network.m].copy()
    return report(Status.OPTIMAL, flow), flow


def solve_ssp(
    network: Network,
    timeout: float | None = None,
    on_augment: Callable[[AugmentEvent], None] | None = None,
) -> tuple[SolverReport, np.ndarray | None]:
    """Successive shortest path.

    Raises:
        NegativeCost: some arc cost is negative.
    """
    return _run("ssp", network, 1, False, timeout, on_augment, None, scaling=False)


def solve_cas(
    network: Network,
    alpha: int = 4,
    extend_graph: bool = False,
    timeout: float | None = None,
    on_augment: Callable[[AugmentEvent], None] | None = None,
    on_phase: Callable[[int], None] | None = None,
) -> tuple[SolverReport, np.ndarray | None]:
    """Capacity scaling with Delta starting at ``alpha**floor(log_alpha U)``.

    Each path carries the maximum amount it can, not just Delta.  With
    ``extend_graph`` a hub node with arcs of capacity ``nU`` and cost ``nC`` in
    both directions is added; flow left on those arcs means infeasibility.

    Raises:
        NegativeCost: some arc cost is negative.
    """
    if alpha < 2:
        raise ValueError("alpha must be at least 2")
    return _run("cas", network, alpha, extend_graph, timeout, on_augment, on_phase, scaling=True)


def initial_delta(U: int, alpha: int = 4) -> int:
    delta = 1
    while delta * alpha <= U:
        delta *= alpha
    return delta
