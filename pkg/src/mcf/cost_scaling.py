"""Cost scaling (COS): push-relabel, augment-relabel and partial augment-relabel.

Costs are multiplied by ``alpha * n`` so every epsilon is an integer.  Starting
from ``eps0 = alpha**ceil(log_alpha(alpha*n*C))`` each phase divides epsilon by
``alpha`` and runs refine; the phase with epsilon 1 yields an optimal flow.

The hot loops are numba kernels working on the residual-store arrays.  They
process at most ``budget`` active nodes per call so the driver can poll the
deadline and run debug checks between calls.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numba import njit

from .aug_path import _pop, _sift_up
from .graph import Network, ResidualStore, magnitudes, residual_view
from .maxflow import feasible_flow
from .report import Deadline, SolverReport, Status

BIG = np.int64(2**62)
BUDGET = 4096

# layout of the kernel state vector
Q_HEAD, Q_LEN, SINCE_GU, PUSHES, RELABELS, UPDATES, GU_EVERY, PATH_K, LOOKAHEAD, USE_GU = range(10)
STATE_LEN = 10

DONE, MORE, INFEASIBLE = 0, 1, 2


class Variant(str, enum.Enum):
    PUSH_RELABEL = "pr"
    AUGMENT_RELABEL = "ar"
    PARTIAL_AUGMENT_RELABEL = "par"


@dataclass(frozen=True)
class Heuristics:
    price_refine: bool = True
    global_update: bool = True
    push_look_ahead: bool = True


# ---------------------------------------------------------------- kernels


@njit(cache=True)
def _saturate(first, head, sister, cost, rescap, pi, excess):
    for u in range(len(pi)):
        for a in range(first[u], first[u + 1]):
            r = rescap[a]
            if r > 0 and cost[a] + pi[u] - pi[head[a]] < 0:
                rescap[a] = 0
                rescap[sister[a]] += r
                excess[u] -= r
                excess[head[a]] += r


@njit(cache=True)
def _enqueue(v, queue, inq, st):
    n = len(queue)
    queue[(st[Q_HEAD] + st[Q_LEN]) % n] = v
    st[Q_LEN] += 1
    inq[v] = 1


@njit(cache=True)
def _find_admissible(v, cur, first, head, cost, rescap, pi):
    pv = pi[v]
    end = first[v + 1]
    a = cur[v]
    while a < end:
        if rescap[a] > 0 and cost[a] + pv - pi[head[a]] < 0:
            cur[v] = a
            return a
        a += 1
    cur[v] = end
    return -1


@njit(cache=True)
def _relabel(v, cur, first, head, cost, rescap, pi, eps):
    """Strict relabel; returns False (and leaves pi) when v has no residual arc."""
    best = BIG
    pv = pi[v]
    for a in range(first[v], first[v + 1]):
        if rescap[a] > 0:
            rc = cost[a] + pv - pi[head[a]]
            if rc < best:
                best = rc
    cur[v] = first[v]
    if best == BIG:
        return False
    pi[v] -= best + eps
    return True


@njit(cache=True)
def _look_ahead_limit(j, first, head, cost, rescap, pi, excess):
    lim = -excess[j] if excess[j] < 0 else 0
    pj = pi[j]
    for a in range(first[j], first[j + 1]):
        if rescap[a] > 0 and cost[a] + pj - pi[head[a]] < 0:
            lim += rescap[a]
    return lim


@njit(cache=True)
def _global_update(first, head, sister, cost, rescap, pi, excess, cur, eps,
                   label, done, heap, pos):
    """Set-relabel from the deficit nodes; False if an active node is cut off."""
    n = len(pi)
    active = 0
    for v in range(n):
        if excess[v] > 0:
            active += 1
    if active == 0:
        return True
    size = 0
    for v in range(n):
        done[v] = 0
        if excess[v] < 0:
            label[v] = 0
            heap[size] = v
            pos[v] = size
            size += 1
        else:
            label[v] = BIG
    top = 0
    while size > 0 and active > 0:
        v, size = _pop(heap, pos, label, size)
        done[v] = 1
        if excess[v] > 0:
            active -= 1
            top = label[v]
        lv = label[v]
        pv = pi[v]
        for a in range(first[v], first[v + 1]):
            s = sister[a]
            if rescap[s] <= 0:
                continue
            w = head[a]
            if done[w]:
                continue
            rc = cost[s] + pi[w] - pv
            step = rc // eps + 1
            if step < 0:
                step = 0
            nl = lv + step
            if nl < label[w]:
                if label[w] == BIG:
                    heap[size] = w
                    pos[w] = size
                    size += 1
                label[w] = nl
                _sift_up(heap, pos, label, pos[w])
    if active > 0:
        return False
    for v in range(n):
        if done[v] and label[v] < top:
            pi[v] += eps * (top - label[v])
        cur[v] = first[v]
    return True


@njit(cache=True)
def _maybe_update(first, head, sister, cost, rescap, pi, excess, cur, eps, st,
                  label, done, heap, pos):
    if st[USE_GU] and st[SINCE_GU] >= st[GU_EVERY]:
        st[SINCE_GU] = 0
        st[UPDATES] += 1
        return _global_update(first, head, sister, cost, rescap, pi, excess, cur,
                              eps, label, done, heap, pos)
    return True


@njit(cache=True)
def _discharge_pr(i, first, tail, head, sister, cost, rescap, pi, excess, cur, eps,
                  queue, inq, st, label, done, heap, pos):
    """Push/relabel node i until its excess is gone (or look-ahead defers it)."""
    while excess[i] > 0:
        a = _find_admissible(i, cur, first, head, cost, rescap, pi)
        if a < 0:
            if not _relabel(i, cur, first, head, cost, rescap, pi, eps):
                return False
            st[RELABELS] += 1
            st[SINCE_GU] += 1
            if not _maybe_update(first, head, sister, cost, rescap, pi, excess, cur, eps,
                                 st, label, done, heap, pos):
                return False
            continue
        j = head[a]
        d = min(excess[i], rescap[a])
        if st[LOOKAHEAD]:
            lim = _look_ahead_limit(j, first, head, cost, rescap, pi, excess)
            room = lim - (excess[j] if excess[j] > 0 else 0)
            if room <= 0:
                if lim > (-excess[j] if excess[j] < 0 else 0):
                    # j can still forward flow; come back to i later
                    _enqueue(i, queue, inq, st)
                    return True
                if _relabel(j, cur, first, head, cost, rescap, pi, eps):
                    st[RELABELS] += 1
                    st[SINCE_GU] += 1
                    if not _maybe_update(first, head, sister, cost, rescap, pi, excess, cur,
                                         eps, st, label, done, heap, pos):
                        return False
                    continue
            elif room < d:
                d = room
        rescap[a] -= d
        rescap[sister[a]] += d
        excess[i] -= d
        excess[j] += d
        st[PUSHES] += 1
        if excess[j] > 0 and inq[j] == 0:
            _enqueue(j, queue, inq, st)
        if not _maybe_update(first, head, sister, cost, rescap, pi, excess, cur, eps, st,
                             label, done, heap, pos):
            return False
    return True


@njit(cache=True)
def _discharge_par(u, first, tail, head, sister, cost, rescap, pi, excess, cur, eps,
                   queue, inq, st, label, done, heap, pos, pnodes, parcs):
    """Partial augment-relabel from u; path length limit st[PATH_K] (<=0: none)."""
    k = st[PATH_K]
    while excess[u] > 0:
        plen = 0
        pnodes[0] = u
        while True:
            tip = pnodes[plen]
            if plen > 0 and excess[tip] < 0:
                break
            if k > 0 and plen >= k:
                break
            a = _find_admissible(tip, cur, first, head, cost, rescap, pi)
            if a >= 0:
                parcs[plen] = a
                plen += 1
                pnodes[plen] = head[a]
                continue
            if not _relabel(tip, cur, first, head, cost, rescap, pi, eps):
                if plen == 0:
                    return False
                pi[tip] -= eps
            st[RELABELS] += 1
            st[SINCE_GU] += 1
            if plen > 0:
                plen -= 1
            if st[USE_GU] and st[SINCE_GU] >= st[GU_EVERY]:
                # potentials move, so the partial path is dropped
                if not _maybe_update(first, head, sister, cost, rescap, pi, excess, cur,
                                     eps, st, label, done, heap, pos):
                    return False
                plen = 0
        for t in range(plen):
            a = parcs[t]
            v = tail[a]
            d = min(excess[v], rescap[a])
            if d <= 0:
                break
            rescap[a] -= d
            rescap[sister[a]] += d
            excess[v] -= d
            excess[head[a]] += d
            st[PUSHES] += 1
        for t in range(1, plen + 1):
            w = pnodes[t]
            if excess[w] > 0 and inq[w] == 0:
                _enqueue(w, queue, inq, st)
        if not _maybe_update(first, head, sister, cost, rescap, pi, excess, cur, eps, st,
                             label, done, heap, pos):
            return False
    return True


@njit(cache=True)
def _refine_run(first, tail, head, sister, cost, rescap, pi, excess, cur, eps,
                queue, inq, st, label, done, heap, pos, pnodes, parcs, budget):
    n = len(pi)
    for _ in range(budget):
        if st[Q_LEN] == 0:
            return DONE
        u = queue[st[Q_HEAD]]
        st[Q_HEAD] = (st[Q_HEAD] + 1) % n
        st[Q_LEN] -= 1
        # u stays flagged while processed so pushes never requeue it
        if st[PATH_K] == 0:
            ok = _discharge_pr(u, first, tail, head, sister, cost, rescap, pi, excess,
                               cur, eps, queue, inq, st, label, done, heap, pos)
        else:
            ok = _discharge_par(u, first, tail, head, sister, cost, rescap, pi, excess,
                                cur, eps, queue, inq, st, label, done, heap, pos,
                                pnodes, parcs)
        if not ok:
            return INFEASIBLE
        if not (st[Q_LEN] > 0 and queue[(st[Q_HEAD] + st[Q_LEN] - 1) % n] == u):
            inq[u] = 0
    return DONE if st[Q_LEN] == 0 else MORE


@njit(cache=True)
def _price_refine(first, tail, head, cost, rescap, pi, eps, dist, pred, stamp):
    """Bellman-Ford on lengths rc + eps; True and shifted pi if no negative cycle."""
    n = len(pi)
    m2 = len(head)
    for v in range(n):
        dist[v] = 0
        pred[v] = -1
    k = 0
    check = 2
    for p in range(1, n + 1):
        changed = False
        for a in range(m2):
            if rescap[a] > 0:
                u = tail[a]
                v = head[a]
                nd = dist[u] + cost[a] + pi[u] - pi[v] + eps
                if nd < dist[v]:
                    dist[v] = nd
                    pred[v] = a
                    changed = True
        if not changed:
            for v in range(n):
                pi[v] += dist[v]
            return True
        if p >= check:
            k += 1
            check = int(2 * 1.5**k)
            # a cycle of predecessor arcs is a negative cycle
            for v in range(n):
                stamp[v] = -1
            for s in range(n):
                v = s
                while v >= 0 and stamp[v] < 0:
                    stamp[v] = s
                    a = pred[v]
                    v = tail[a] if a >= 0 else -1
                if v >= 0 and stamp[v] == s:
                    return False
    return False


# ---------------------------------------------------------------- state


@dataclass
class CosState:
    """Everything refine needs: residual store over scaled costs plus queues."""

    store: ResidualStore
    potential: np.ndarray
    excess: np.ndarray
    eps: int
    scale: int
    alpha: int
    cur: np.ndarray
    queue: np.ndarray
    inq: np.ndarray
    st: np.ndarray
    work: dict = field(default_factory=dict)

    @classmethod
    def create(cls, network: Network, variant: Variant = Variant.PARTIAL_AUGMENT_RELABEL,
               alpha: int = 16, k: int = 4, heuristics: Heuristics = Heuristics()) -> "CosState":
        n = network.n
        scale = alpha * n
        store = residual_view(network, cost_scale=scale)
        _, C = magnitudes(network)
        eps = 1
        while eps < alpha * n * max(C, 1):
            eps *= alpha
        st = np.zeros(STATE_LEN, dtype=np.int64)
        st[GU_EVERY] = max(1, n // 2)
        if variant is Variant.PUSH_RELABEL:
            st[PATH_K] = 0
        elif variant is Variant.AUGMENT_RELABEL:
            st[PATH_K] = -1
        else:
            st[PATH_K] = k
        st[LOOKAHEAD] = int(heuristics.push_look_ahead and variant is Variant.PUSH_RELABEL)
        st[USE_GU] = int(heuristics.global_update)
        work = {name: np.zeros(n, dtype=np.int64) for name in ("label", "done", "heap", "pos")}
        work["pnodes"] = np.zeros(n + 1, dtype=np.int64)
        work["parcs"] = np.zeros(n + 1, dtype=np.int64)
        return cls(
            store=store,
            potential=np.zeros(n, dtype=np.int64),
            excess=network.supply.copy(),
            eps=eps,
            scale=scale,
            alpha=alpha,
            cur=store.first[:-1].copy(),
            queue=np.zeros(n, dtype=np.int64),
            inq=np.zeros(n, dtype=np.int8),
            st=st,
            work=work,
        )

    @property
    def n(self) -> int:
        return len(self.potential)

    def reduced_costs(self) -> np.ndarray:
        return self.store.reduced_costs(self.potential)

    def is_epsilon_optimal(self, eps: int | None = None) -> bool:
        eps = self.eps if eps is None else eps
        live = self.store.rescap > 0
        return bool(np.all(self.reduced_costs()[live] >= -eps))

    def active_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.excess > 0)


def push_look_ahead_limit(state: CosState, node: int) -> int:
    """Deficit of ``node`` plus the residual capacity of its admissible arcs."""
    s = state.store
    return int(_look_ahead_limit(node, s.first, s.head, s.cost, s.rescap,
                                 state.potential, state.excess))


def global_update(state: CosState) -> bool:
    """Raise potentials around the deficit nodes; False if some active node is cut off."""
    s, w = state.store, state.work
    return bool(_global_update(s.first, s.head, s.sister, s.cost, s.rescap, state.potential,
                               state.excess, state.cur, state.eps, w["label"], w["done"],
                               w["heap"], w["pos"]))


def price_refinement(state: CosState) -> bool:
    """Try to certify eps-optimality of the current flow by moving potentials only.

    Uses Bellman-Ford with periodic predecessor-cycle checks.  Potentials are
    left untouched on failure.
    """
    s, w = state.store, state.work
    trial = state.potential.copy()
    ok = _price_refine(s.first, s.tail, s.head, s.cost, s.rescap, trial, state.eps,
                       w["label"], w["heap"], w["pos"])
    if ok:
        state.potential[:] = trial
    return bool(ok)


def _start_refine(state: CosState) -> bool:
    s, w = state.store, state.work
    _saturate(s.first, s.head, s.sister, s.cost, s.rescap, state.potential, state.excess)
    state.cur[:] = s.first[:-1]
    state.inq[:] = 0
    state.st[Q_HEAD] = 0
    state.st[Q_LEN] = 0
    state.st[SINCE_GU] = 0
    active = state.active_nodes()
    state.queue[: len(active)] = active
    state.inq[active] = 1
    state.st[Q_LEN] = len(active)
    if state.st[USE_GU] and len(active):
        state.st[UPDATES] += 1
        return global_update(state)
    return True


def _refine_chunk(state: CosState, budget: int) -> int:
    s, w = state.store, state.work
    return int(_refine_run(s.first, s.tail, s.head, s.sister, s.cost, s.rescap,
                           state.potential, state.excess, state.cur, state.eps,
                           state.queue, state.inq, state.st, w["label"], w["done"],
                           w["heap"], w["pos"], w["pnodes"], w["parcs"], budget))


def refine(state: CosState, deadline: Deadline | None = None) -> Status | None:
    """One phase at ``state.eps``: returns None on success, else the failure status."""
    if not _start_refine(state):
        return Status.INFEASIBLE
    while True:
        code = _refine_chunk(state, BUDGET)
        if code == DONE:
            return None
        if code == INFEASIBLE:
            return Status.INFEASIBLE
        if deadline is not None and deadline.expired():
            return Status.TIMEOUT


@dataclass
class PhaseInfo:
    index: int
    eps: int
    scale: int
    skipped: bool
    state: CosState


def solve_cos(
    network: Network,
    variant: Variant | str = Variant.PARTIAL_AUGMENT_RELABEL,
    alpha: int = 16,
    k: int = 4,
    heuristics: Heuristics = Heuristics(),
    timeout: float | None = None,
    debug: bool = False,
    on_phase: Callable[[PhaseInfo], None] | None = None,
) -> tuple[SolverReport, np.ndarray | None]:
    """Cost scaling.

    ``variant`` selects push-relabel ("pr"), augment-relabel ("ar") or partial
    augment-relabel ("par", path length ``k``).  Look-ahead only applies to
    push-relabel.  In ``debug`` mode the eps-optimality scan runs after every
    phase and raises AssertionError on failure.
    """
    variant = Variant(variant)
    if alpha < 2:
        raise ValueError("alpha must be at least 2")
    if k < 1:
        raise ValueError("k must be at least 1")
    deadline = Deadline(timeout)
    name = f"cos-{variant.value}"
    counters = {"phases": 0, "price_refine_skips": 0, "phase_pushes": [], "phase_relabels": []}

    def finish(status, flow=None):
        st = state.st if state is not None else np.zeros(STATE_LEN, dtype=np.int64)
        counters.update(pushes=int(st[PUSHES]), relabels=int(st[RELABELS]),
                        global_updates=int(st[UPDATES]))
        counters["iterations"] = counters["pushes"] + counters["relabels"]
        objective = network.objective(flow) if status is Status.OPTIMAL else None
        return SolverReport(name, status, objective, counters, deadline.elapsed_ms()), flow

    state = None
    if not heuristics.global_update and feasible_flow(network) is None:
        return finish(Status.INFEASIBLE)
    state = CosState.create(network, variant, alpha, k, heuristics)
    counters["initial_eps"] = state.eps
    while state.eps > 1:
        state.eps //= alpha
        counters["phases"] += 1
        before = state.st[[PUSHES, RELABELS]].copy()
        skipped = False
        if heuristics.price_refine and not np.any(state.excess) and price_refinement(state):
            counters["price_refine_skips"] += 1
            skipped = True
        else:
            status = refine(state, deadline)
            if status is not None:
                return finish(status)
        after = state.st[[PUSHES, RELABELS]]
        counters["phase_pushes"].append(int(after[0] - before[0]))
        counters["phase_relabels"].append(int(after[1] - before[1]))
        if debug and not state.is_epsilon_optimal():
            raise AssertionError(f"phase {counters['phases']} is not {state.eps}-optimal")
        if on_phase is not None:
            on_phase(PhaseInfo(counters["phases"], state.eps, state.scale, skipped, state))
        if deadline.expired():
            return finish(Status.TIMEOUT)
    if np.any(state.excess):
        return finish(Status.INFEASIBLE)
    return finish(Status.OPTIMAL, state.store.flow())


def phase_count(n: int, C: int, alpha: int = 16) -> int:
    """Number of refine phases, ceil(log_alpha(alpha * n * max(C, 1)))."""
    eps, count = 1, 0
    while eps < alpha * n * max(C, 1):
        eps *= alpha
        count += 1
    return count
