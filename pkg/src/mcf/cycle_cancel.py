"""Primal cycle-canceling solvers: SCC, MMCC and cancel-and-tighten (CAT).

All three start from a feasible flow obtained by a maximum-flow computation and
keep it feasible while canceling negative residual cycles.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import InternalInconsistency
from .graph import FlowState, Network, residual_view
from .maxflow import feasible_flow
from .minmean import min_mean_cycle
from .report import Deadline, SolverReport, Status


class _Lists:
    """Residual store copied to Python lists; indexing lists is much faster."""

    def __init__(self, network: Network, flow, cost_scale: int = 1):
        store = residual_view(network, flow, cost_scale=cost_scale)
        self.store = store
        self.n = network.n
        self.first = store.first.tolist()
        self.tail = store.tail.tolist()
        self.head = store.head.tolist()
        self.sister = store.sister.tolist()
        self.cost = store.cost.tolist()
        self.rescap = store.rescap.tolist()
        self.size = len(self.head)

    def cancel(self, cycle: list[int]) -> int:
        delta = min(self.rescap[a] for a in cycle)
        for a in cycle:
            self.rescap[a] -= delta
            self.rescap[self.sister[a]] += delta
        return delta

    def flow(self) -> np.ndarray:
        self.store.rescap[:] = self.rescap
        return self.store.flow()

    def min_mean(self, stats: dict | None = None):
        live = [a for a in range(self.size) if self.rescap[a] > 0]
        found = min_mean_cycle(
            self.n,
            [(self.tail[a], self.head[a]) for a in live],
            [self.cost[a] for a in live],
            method="combined",
            stats=stats,
        )
        if found is None:
            return None
        cyc, value = found
        return [live[j] for j in cyc], value


def _report(name, status, network, flow, counters, deadline) -> tuple[SolverReport, np.ndarray | None]:
    objective = network.objective(flow) if status is Status.OPTIMAL else None
    counters = dict(counters)
    report = SolverReport(name, status, objective, counters, deadline.elapsed_ms())
    return report, flow


def initial_feasible_flow(network: Network) -> FlowState | None:
    """A feasible flow from a super-source/super-sink maximum flow, or None."""
    flow = feasible_flow(network)
    if flow is None:
        return None
    return FlowState.from_flow(network, flow)


def _checkpoints(n: int):
    """Bellman-Ford pass counts at which predecessor cycles are searched."""
    k = 0
    last = 0
    while True:
        c = min(int(2 * 1.5**k), n)
        k += 1
        if c > last:
            last = c
            yield c
        if c >= n:
            break
    while True:
        last += max(n, 1)
        yield last


def solve_scc(network: Network, timeout: float | None = None) -> tuple[SolverReport, np.ndarray | None]:
    """Simple cycle canceling with checkpointed Bellman-Ford."""
    deadline = Deadline(timeout)
    counters = {"iterations": 0, "bf_passes": 0, "pauses": 0}
    start = initial_feasible_flow(network)
    if start is None:
        return _report("scc", Status.INFEASIBLE, network, None, counters, deadline)
    R = _Lists(network, start.flow)
    n, tail, head, cost, rescap = R.n, R.tail, R.head, R.cost, R.rescap
    arcs = range(R.size)

    while True:
        dist = [0] * n
        pred = [-1] * n
        passes = 0
        schedule = _checkpoints(n)
        pause_at = next(schedule)
        restart = False
        while not restart:
            changed = False
            for a in arcs:
                if rescap[a] > 0:
                    cand = dist[tail[a]] + cost[a]
                    v = head[a]
                    if cand < dist[v]:
                        dist[v] = cand
                        pred[v] = a
                        changed = True
            passes += 1
            counters["bf_passes"] += 1
            if not changed:
                flow = R.flow()
                return _report("scc", Status.OPTIMAL, network, flow, counters, deadline)
            if deadline.expired():
                return _report("scc", Status.TIMEOUT, network, None, counters, deadline)
            if passes < pause_at:
                continue
            pause_at = next(schedule)
            counters["pauses"] += 1
            # harvest node-disjoint cycles from the predecessor graph
            stamp = [-1] * n
            for s in range(n):
                v = s
                while v >= 0 and stamp[v] < 0:
                    stamp[v] = s
                    a = pred[v]
                    v = tail[a] if a >= 0 else -1
                if v < 0 or stamp[v] != s:
                    continue
                cycle = []
                u = v
                while True:
                    a = pred[u]
                    cycle.append(a)
                    u = tail[a]
                    if u == v:
                        break
                if sum(cost[a] for a in cycle) < 0:
                    R.cancel(cycle)
                    counters["iterations"] += 1
                    restart = True


def solve_mmcc(network: Network, timeout: float | None = None) -> tuple[SolverReport, np.ndarray | None]:
    """Minimum-mean cycle canceling."""
    deadline = Deadline(timeout)
    counters = {"iterations": 0, "mmc_relaxations": 0}
    start = initial_feasible_flow(network)
    if start is None:
        return _report("mmcc", Status.INFEASIBLE, network, None, counters, deadline)
    R = _Lists(network, start.flow)
    stats: dict = {}
    while True:
        found = R.min_mean(stats)
        if found is None or found[1].total_cost >= 0:
            break
        R.cancel(found[0])
        counters["iterations"] += 1
        if deadline.expired():
            return _report("mmcc", Status.TIMEOUT, network, None, counters, deadline)
    counters["mmc_relaxations"] = stats.get("relaxations", 0)
    return _report("mmcc", Status.OPTIMAL, network, R.flow(), counters, deadline)


class _CancelAndTighten:
    def __init__(self, network: Network, flow, alpha: int, debug: bool):
        self.scale = alpha * network.n
        self.alpha = alpha
        self.R = _Lists(network, flow, cost_scale=self.scale)
        self.n = network.n
        self.pi = [0] * self.n
        self.eps = 0
        self.debug = debug
        self.counters = {
            "iterations": 0,
            "cancellations": 0,
            "strict_tightens": 0,
            "relaxed_tightens": 0,
        }

    def rc(self, a: int) -> int:
        R = self.R
        return R.cost[a] + self.pi[R.tail[a]] - self.pi[R.head[a]]

    def cancel_step(self) -> None:
        """Cancel admissible cycles until the admissible network is acyclic."""
        R, pi = self.R, self.pi
        first, head, cost, rescap = R.first, R.head, R.cost, R.rescap
        n = self.n
        color = [0] * n  # 0 unvisited, 1 on the DFS stack, 2 finished
        depth = [0] * n
        cur = first[:-1]
        for s in range(n):
            if color[s]:
                continue
            nodes = [s]
            path: list[int] = []
            color[s] = 1
            depth[s] = 0
            while nodes:
                u = nodes[-1]
                end = first[u + 1]
                pu = pi[u]
                moved = False
                while cur[u] < end:
                    a = cur[u]
                    if rescap[a] > 0 and cost[a] + pu - pi[head[a]] < 0:
                        v = head[a]
                        if color[v] == 0:
                            color[v] = 1
                            depth[v] = len(nodes)
                            nodes.append(v)
                            path.append(a)
                            moved = True
                            break
                        if color[v] == 1:
                            i = depth[v]
                            R.cancel(path[i:] + [a])
                            self.counters["cancellations"] += 1
                            for w in nodes[i + 1:]:
                                color[w] = 0
                            del nodes[i + 1:]
                            del path[i:]
                            moved = True
                            break
                    cur[u] += 1
                if moved:
                    continue
                color[u] = 2
                nodes.pop()
                if path:
                    path.pop()
                    cur[nodes[-1]] += 1

    def _admissible_levels(self) -> list[int]:
        """Longest admissible path length ending at each node (network is a DAG)."""
        R, n = self.R, self.n
        indeg = [0] * n
        adm: list[list[int]] = [[] for _ in range(n)]
        for a in range(R.size):
            if R.rescap[a] > 0 and self.rc(a) < 0:
                adm[R.tail[a]].append(R.head[a])
                indeg[R.head[a]] += 1
        level = [0] * n
        queue = [v for v in range(n) if indeg[v] == 0]
        seen = 0
        while queue:
            u = queue.pop()
            seen += 1
            for v in adm[u]:
                if level[u] + 1 > level[v]:
                    level[v] = level[u] + 1
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        if seen != n:
            raise InternalInconsistency("admissible network has a cycle after the cancel step")
        return level

    def relaxed_tighten(self) -> bool:
        """Shift potentials by ``t * level``; returns False when epsilon cannot drop."""
        R = self.R
        level = self._admissible_levels()
        # eps(t) = max(0, max over arcs of (-rc) + t*(level[tail] - level[head]));
        # keep only the largest intercept per slope
        best: dict[int, int] = {}
        for a in range(R.size):
            if R.rescap[a] > 0:
                slope = level[R.tail[a]] - level[R.head[a]]
                icpt = -self.rc(a)
                if best.get(slope, icpt - 1) < icpt:
                    best[slope] = icpt
        lines = list(best.items())

        def f(t: int) -> int:
            return max(0, max((b + s * t for s, b in lines), default=0))

        lo, hi = 0, max(self.eps, 0)
        while hi - lo > 2:
            m1 = lo + (hi - lo) // 3
            m2 = hi - (hi - lo) // 3
            f1, f2 = f(m1), f(m2)
            if f1 < f2:
                hi = m2 - 1
            elif f1 > f2:
                lo = m1 + 1
            else:
                lo, hi = m1, m2
        t = min(range(lo, hi + 1), key=lambda x: (f(x), x))
        new_eps = f(t)
        if new_eps >= self.eps:
            return False
        if t:
            for v in range(self.n):
                self.pi[v] -= t * level[v]
        self.eps = new_eps
        self.counters["relaxed_tightens"] += 1
        return True

    def strict_tighten(self) -> None:
        """Exact epsilon from a minimum-mean cycle, potentials by Bellman-Ford."""
        R = self.R
        self.counters["strict_tightens"] += 1
        found = R.min_mean()
        if found is None or found[1].total_cost >= 0:
            self.eps = 0
            weight = R.cost
        else:
            cyc, mean = found
            # costs are already scaled, so the mean is in scaled units
            self.eps = -((mean.total_cost) // mean.length)  # ceil(-mean)
            weight = [c + self.eps for c in R.cost]
        live = [a for a in range(R.size) if R.rescap[a] > 0]
        dist = [0] * self.n
        for _ in range(self.n):
            changed = False
            for a in live:
                cand = dist[R.tail[a]] + weight[a]
                if cand < dist[R.head[a]]:
                    dist[R.head[a]] = cand
                    changed = True
            if not changed:
                break
        else:
            raise InternalInconsistency("strict tighten produced a negative cycle")
        self.pi = dist
        if found is not None and found[1].total_cost < 0:
            cyc = found[0]
            if any(self.rc(a) >= 0 for a in cyc):
                # rounding left the minimum-mean cycle inadmissible; cancel it directly
                R.cancel(cyc)
                self.counters["cancellations"] += 1

    def epsilon_optimal(self) -> bool:
        R = self.R
        return all(R.rescap[a] == 0 or self.rc(a) >= -self.eps for a in range(R.size))


def solve_cat(
    network: Network,
    alpha: int = 16,
    timeout: float | None = None,
    debug: bool = False,
    on_strict_tighten: Callable[[np.ndarray, Fraction], None] | None = None,
) -> tuple[SolverReport, np.ndarray | None]:
    """Cancel-and-tighten.

    Costs are multiplied by ``alpha * n`` so epsilon stays integral; the run
    stops once the scaled epsilon drops below ``alpha``, i.e. below ``1/n`` in
    original units.  A strict tighten (exact epsilon via a minimum-mean cycle)
    happens every ``floor(sqrt(n))`` iterations and whenever the relaxed,
    topological-order tighten cannot decrease epsilon.  ``on_strict_tighten``
    receives the current flow and epsilon in original cost units.
    """
    deadline = Deadline(timeout)
    start = initial_feasible_flow(network)
    if start is None:
        return _report("cat", Status.INFEASIBLE, network, None, {}, deadline)
    cat = _CancelAndTighten(network, start.flow, alpha, debug)
    period = max(1, math.isqrt(network.n))

    def strict():
        cat.strict_tighten()
        if on_strict_tighten is not None:
            on_strict_tighten(cat.R.flow(), Fraction(cat.eps, cat.scale))

    strict()
    while cat.eps >= alpha:
        cat.cancel_step()
        cat.counters["iterations"] += 1
        if cat.counters["iterations"] % period == 0 or not cat.relaxed_tighten():
            strict()
        if debug and not cat.epsilon_optimal():
            raise InternalInconsistency("epsilon-optimality lost")
        if deadline.expired():
            return _report("cat", Status.TIMEOUT, network, None, cat.counters, deadline)
    return _report("cat", Status.OPTIMAL, network, cat.R.flow(), cat.counters, deadline)
