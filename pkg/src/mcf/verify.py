"""Independent optimality checking.

Everything here runs on exact Python integers (or fractions) and shares no code
with the solvers beyond the residual-store layout, so it can serve as the test
oracle for all of them.  A flow is judged three ways: absence of a negative
residual cycle, nonnegative residual reduced costs under shortest-path
potentials, and complementary slackness on the original arcs.  The three
verdicts must coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InfeasibleFlow, InternalInconsistency, NegativeCycle
from .graph import Network, ResidualStore, excesses, residual_view
from .minmean import MeanValue, min_mean_cycle


@dataclass
class VerifyReport:
    feasible: bool
    optimal: bool
    witness: list | None = None  # negative cycle (residual arcs) or potentials
    epsilon: Fraction | None = None
    verdicts: dict[str, bool] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    @property
    def witness_is_cycle(self) -> bool:
        return self.witness is not None and not self.optimal


@dataclass
class EpsilonCertificate:
    epsilon: Fraction
    potentials: list[Fraction]


def check_feasible(network: Network, flow) -> tuple[bool, list[str]]:
    """Capacity and conservation check; returns the verdict and every violation."""
    flow = np.asarray(flow, dtype=np.int64)
    problems = []
    if flow.shape != (network.m,):
        return False, [f"flow has shape {flow.shape}, expected ({network.m},)"]
    for a in np.flatnonzero((flow < 0) | (flow > network.capacity)).tolist():
        problems.append(
            f"arc {a} ({network.tail[a]}->{network.head[a]}): flow {flow[a]} "
            f"outside [0, {network.capacity[a]}]"
        )
    e = excesses(network, flow)
    for v in np.flatnonzero(e).tolist():
        problems.append(f"node {v}: conservation violated by {e[v]}")
    return not problems, problems


def _residual_lists(store: ResidualStore):
    live = [a for a in range(store.size) if store.rescap[a] > 0]
    tails = store.tail.tolist()
    heads = store.head.tolist()
    costs = store.cost.tolist()
    return live, tails, heads, costs


def _bellman_ford(n, live, tails, heads, weight, passes):
    """Distances from a virtual source joined to every node by zero-cost arcs."""
    dist = [0] * n
    pred = [-1] * n
    for _ in range(passes):
        changed = False
        for a in live:
            cand = dist[tails[a]] + weight[a]
            if cand < dist[heads[a]]:
                dist[heads[a]] = cand
                pred[heads[a]] = a
                changed = True
        if not changed:
            return dist, pred, False
    return dist, pred, True


def find_negative_cycle(store: ResidualStore) -> list[int] | None:
    """A simple negative-cost cycle of positive-residual arcs, or None.

    Bellman-Ford scans arcs in index order; the returned cycle is the first one
    met when following predecessor arcs from nodes in index order.
    """
    n = store.n
    live, tails, heads, costs = _residual_lists(store)
    dist, pred, still_changing = _bellman_ford(n, live, tails, heads, costs, n)
    while still_changing:
        stamp = [-1] * n
        for s in range(n):
            v = s
            while v >= 0 and stamp[v] < 0:
                stamp[v] = s
                a = pred[v]
                v = tails[a] if a >= 0 else -1
            if v >= 0 and stamp[v] == s:
                cycle = []
                u = v
                while True:
                    a = pred[u]
                    cycle.append(a)
                    u = tails[a]
                    if u == v:
                        break
                cycle.reverse()
                assert sum(costs[a] for a in cycle) < 0
                return cycle
        dist, pred, still_changing = _bellman_ford(n, live, tails, heads, costs, n)
    return None


def optimal_potentials(store: ResidualStore) -> list[int]:
    """Potentials with every positive-residual reduced cost nonnegative.

    ``pi[v]`` is the shortest-path distance to ``v`` from a virtual source with
    zero-cost arcs to all nodes, so ``c + pi[tail] - pi[head] >= 0``.

    Raises:
        NegativeCycle: the residual network has a negative cycle.
    """
    live, tails, heads, costs = _residual_lists(store)
    dist, _, changing = _bellman_ford(store.n, live, tails, heads, costs, store.n)
    if changing:
        raise NegativeCycle("residual network contains a negative cycle")
    return dist


def reduced_cost_certificate(store: ResidualStore, potentials) -> bool:
    """True when every positive-residual arc has nonnegative reduced cost."""
    for a in range(store.size):
        if store.rescap[a] > 0:
            rc = int(store.cost[a]) + potentials[int(store.tail[a])] - potentials[int(store.head[a])]
            if rc < 0:
                return False
    return True


def complementary_slackness(network: Network, flow, potentials) -> bool:
    for a in range(network.m):
        i, j = int(network.tail[a]), int(network.head[a])
        rc = int(network.cost[a]) + potentials[i] - potentials[j]
        x, u = int(flow[a]), int(network.capacity[a])
        if rc > 0 and x != 0:
            return False
        if 0 < x < u and rc != 0:
            return False
        if rc < 0 and x != u:
            return False
    return True


def is_epsilon_optimal(store: ResidualStore, potentials, epsilon) -> bool:
    """Every positive-residual arc has reduced cost at least ``-epsilon``."""
    for a in range(store.size):
        if store.rescap[a] > 0:
            rc = int(store.cost[a]) + potentials[int(store.tail[a])] - potentials[int(store.head[a])]
            if rc < -epsilon:
                return False
    return True


def residual_min_mean(store: ResidualStore, method: str = "combined", stats=None):
    """Minimum-mean cycle of the positive-residual arcs, as residual arc ids."""
    live, tails, heads, costs = _residual_lists(store)
    found = min_mean_cycle(
        store.n,
        [(tails[a], heads[a]) for a in live],
        [costs[a] for a in live],
        method=method,
        stats=stats,
    )
    if found is None:
        return None
    cyc, value = found
    return [live[j] for j in cyc], value


def epsilon_of_flow(network: Network, flow) -> EpsilonCertificate:
    """Smallest epsilon for which ``flow`` is epsilon-optimal, with potentials.

    Raises:
        InfeasibleFlow: ``flow`` breaks a capacity or conservation constraint.
    """
    ok, problems = check_feasible(network, flow)
    if not ok:
        raise InfeasibleFlow("; ".join(problems[:3]))
    store = residual_view(network, flow)
    found = residual_min_mean(store)
    if found is None or found[1] >= MeanValue(0, 1):
        return EpsilonCertificate(Fraction(0), [Fraction(p) for p in optimal_potentials(store)])
    _, mean = found
    eps = -mean.as_fraction()
    p, q = eps.numerator, eps.denominator
    live, tails, heads, costs = _residual_lists(store)
    weight = [q * c + p for c in costs]
    dist, _, changing = _bellman_ford(store.n, live, tails, heads, weight, store.n)
    if changing:
        raise InternalInconsistency("shifted costs still contain a negative cycle")
    pot = [Fraction(d, q) for d in dist]
    if not is_epsilon_optimal(store, pot, eps):
        raise InternalInconsistency("epsilon potentials fail the epsilon-optimality check")
    return EpsilonCertificate(eps, pot)


def verify_optimality(network: Network, flow) -> VerifyReport:
    """Judge ``flow`` by the three optimality criteria and cross-check them.

    Raises:
        InternalInconsistency: the criteria disagree (a bug in this module).
    """
    flow = np.asarray(flow, dtype=np.int64)
    feasible, problems = check_feasible(network, flow)
    if not feasible:
        return VerifyReport(feasible=False, optimal=False, violations=problems)
    store = residual_view(network, flow)
    cycle = find_negative_cycle(store)
    live, tails, heads, costs = _residual_lists(store)
    # n-1 passes suffice when no negative cycle exists; otherwise these are
    # merely the best potentials found and both checks below must fail
    pot, _, _ = _bellman_ford(store.n, live, tails, heads, costs, max(store.n - 1, 1))
    verdicts = {
        "negative_cycle": cycle is None,
        "reduced_cost": reduced_cost_certificate(store, pot),
        "complementary_slackness": complementary_slackness(network, flow, pot),
    }
    if len(set(verdicts.values())) != 1:
        raise InternalInconsistency(f"optimality criteria disagree: {verdicts}")
    optimal = verdicts["negative_cycle"]
    if optimal:
        return VerifyReport(True, True, witness=pot, epsilon=Fraction(0), verdicts=verdicts)
    eps = epsilon_of_flow(network, flow).epsilon
    return VerifyReport(True, False, witness=cycle, epsilon=eps, verdicts=verdicts)
