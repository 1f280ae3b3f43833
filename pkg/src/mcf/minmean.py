"""Minimum-mean directed cycles with exact rational arithmetic.

Four methods share one entry point, :func:`min_mean_cycle`:

* ``"karp"`` -- Karp's O(nm) walk-table recurrence,
* ``"hartmann-orlin"`` -- the same table with early termination,
* ``"howard"`` -- policy iteration (optionally with an iteration limit),
* ``"combined"`` -- Howard limited to ``n`` rounds, then Hartmann-Orlin.

The graph need not be strongly connected; every strongly connected component
is solved separately and the smallest mean wins.  Means are kept as
``(total_cost, length)`` pairs and compared by cross-multiplication.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

METHODS = ("karp", "hartmann-orlin", "howard", "combined")


@functools.total_ordering
@dataclass(frozen=True)
class MeanValue:
    total_cost: int
    length: int

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("cycle length must be positive")

    def __eq__(self, other) -> bool:
        if not isinstance(other, MeanValue):
            return NotImplemented
        return self.total_cost * other.length == other.total_cost * self.length

    def __lt__(self, other: "MeanValue") -> bool:
        return self.total_cost * other.length < other.total_cost * self.length

    def __hash__(self) -> int:
        return hash(self.as_fraction())

    def as_fraction(self) -> Fraction:
        return Fraction(self.total_cost, self.length)

    def __repr__(self) -> str:
        return f"MeanValue({self.total_cost}/{self.length})"


def strongly_connected_components(n: int, tails: Sequence[int], heads: Sequence[int]) -> list[list[int]]:
    """Tarjan's algorithm, iterative.  Components come in reverse topological order."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in zip(tails, heads):
        adj[u].append(v)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            u, i = work[-1]
            if i < len(adj[u]):
                work[-1] = (u, i + 1)
                v = adj[u][i]
                if index[v] < 0:
                    index[v] = low[v] = counter
                    counter += 1
                    stack.append(v)
                    on_stack[v] = True
                    work.append((v, 0))
                elif on_stack[v]:
                    low[u] = min(low[u], index[v])
                continue
            work.pop()
            if work:
                p = work[-1][0]
                low[p] = min(low[p], low[u])
            if low[u] == index[u]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == u:
                        break
                comps.append(sorted(comp))
    return comps


def find_cycle(k: int, out: list[list[int]], head: Sequence[int]) -> list[int] | None:
    """Any directed cycle (as arc ids) in the graph given by out-arc lists."""
    color = [0] * k  # 0 white, 1 on stack, 2 done
    for s in range(k):
        if color[s]:
            continue
        color[s] = 1
        stack = [(s, 0)]
        arcs: list[int] = []
        while stack:
            u, i = stack[-1]
            if i < len(out[u]):
                stack[-1] = (u, i + 1)
                j = out[u][i]
                v = head[j]
                if color[v] == 0:
                    color[v] = 1
                    stack.append((v, 0))
                    arcs.append(j)
                elif color[v] == 1:
                    arcs.append(j)
                    nodes = [x for x, _ in stack]
                    return arcs[nodes.index(v):]
            else:
                color[u] = 2
                stack.pop()
                if arcs:
                    arcs.pop()
    return None


class _Component:
    """A strongly connected component relabelled to local node ids."""

    def __init__(self, nodes: list[int], arc_ids: list[int], tails, heads, costs):
        local = {v: i for i, v in enumerate(nodes)}
        self.k = len(nodes)
        self.arc_ids = arc_ids
        self.tail = [local[tails[a]] for a in arc_ids]
        self.head = [local[heads[a]] for a in arc_ids]
        self.cost = [int(costs[a]) for a in arc_ids]
        self.out: list[list[int]] = [[] for _ in range(self.k)]
        for j, u in enumerate(self.tail):
            self.out[u].append(j)

    def mean_of(self, cycle: list[int]) -> MeanValue:
        return MeanValue(sum(self.cost[j] for j in cycle), len(cycle))

    # -- helpers shared by the walk-table methods ---------------------------

    def _extend_level(self, prev: list, stats: dict) -> tuple[list, list]:
        nxt: list = [None] * self.k
        pred = [-1] * self.k
        for j in range(len(self.tail)):
            u = self.tail[j]
            du = prev[u]
            if du is None:
                continue
            v = self.head[j]
            cand = du + self.cost[j]
            if nxt[v] is None or cand < nxt[v]:
                nxt[v] = cand
                pred[v] = j
        stats["relaxations"] = stats.get("relaxations", 0) + len(self.tail)
        return nxt, pred

    def _walk_cycles(self, preds: list[list[int]], level: int, v: int) -> list[list[int]]:
        """Split the walk ending at ``(level, v)`` into its simple cycles."""
        arcs: list[int] = []
        node = v
        for lv in range(level, 0, -1):
            j = preds[lv][node]
            arcs.append(j)
            node = self.tail[j]
        arcs.reverse()  # walk order from the source
        cycles = []
        seen: dict[int, int] = {self.tail[arcs[0]]: 0} if arcs else {}
        path_nodes = [self.tail[arcs[0]]] if arcs else []
        path_arcs: list[int] = []
        for j in arcs:
            w = self.head[j]
            path_arcs.append(j)
            if w in seen:
                start = seen[w]
                cyc = path_arcs[start:]
                cycles.append(cyc)
                for x in path_nodes[start + 1:]:
                    del seen[x]
                del path_nodes[start + 1:]
                del path_arcs[start:]
            else:
                seen[w] = len(path_nodes)
                path_nodes.append(w)
        return cycles

    def _critical_cycle(self, value: MeanValue) -> list[int]:
        """A cycle of mean exactly ``value``, which must be the component minimum."""
        S, L = value.total_cost, value.length
        w = [L * c - S for c in self.cost]
        dist = [0] * self.k
        for _ in range(self.k):
            changed = False
            for j in range(len(self.tail)):
                cand = dist[self.tail[j]] + w[j]
                if cand < dist[self.head[j]]:
                    dist[self.head[j]] = cand
                    changed = True
            if not changed:
                break
        tight: list[list[int]] = [[] for _ in range(self.k)]
        for j in range(len(self.tail)):
            if dist[self.tail[j]] + w[j] == dist[self.head[j]]:
                tight[self.tail[j]].append(j)
        cyc = find_cycle(self.k, tight, self.head)
        assert cyc is not None, "no critical cycle found"
        return cyc

    # -- Karp ---------------------------------------------------------------

    def karp(self, stats: dict) -> tuple[list[int], MeanValue]:
        k = self.k
        levels = [[0] + [None] * (k - 1)]
        preds = [[-1] * k]
        for _ in range(k):
            nxt, pred = self._extend_level(levels[-1], stats)
            levels.append(nxt)
            preds.append(pred)
        return self._karp_finish(levels, preds)

    def _karp_finish(self, levels, preds) -> tuple[list[int], MeanValue]:
        k = self.k
        best: MeanValue | None = None
        best_v = -1
        for v in range(k):
            dk = levels[k][v]
            if dk is None:
                continue
            worst: MeanValue | None = None
            for j in range(k):
                dj = levels[j][v]
                if dj is None:
                    continue
                cand = MeanValue(dk - dj, k - j)
                if worst is None or cand > worst:
                    worst = cand
            if worst is not None and (best is None or worst < best):
                best, best_v = worst, v
        assert best is not None
        for cyc in self._walk_cycles(preds, k, best_v):
            if self.mean_of(cyc) == best:
                return cyc, best
        return self._critical_cycle(best), best

    # -- Hartmann-Orlin -----------------------------------------------------

    def hartmann_orlin(self, stats: dict) -> tuple[list[int], MeanValue]:
        k = self.k
        levels = [[0] + [None] * (k - 1)]
        preds = [[-1] * k]
        checkpoint = 1
        for lv in range(1, k + 1):
            nxt, pred = self._extend_level(levels[-1], stats)
            levels.append(nxt)
            preds.append(pred)
            if lv == checkpoint and lv < k:
                checkpoint *= 2
                found = self._early_exit(levels, preds, lv, stats)
                if found is not None:
                    stats["early_exit_level"] = lv
                    return found
        return self._karp_finish(levels, preds)

    def _early_exit(self, levels, preds, lv, stats):
        best_cycle, best = None, None
        for v in range(self.k):
            if levels[lv][v] is None:
                continue
            for cyc in self._walk_cycles(preds, lv, v):
                mv = self.mean_of(cyc)
                if best is None or mv < best:
                    best_cycle, best = cyc, mv
        if best is None:
            return None
        S, L = best.total_cost, best.length
        pot: list = [None] * self.k
        for j in range(lv + 1):
            row = levels[j]
            for v in range(self.k):
                if row[v] is not None:
                    cand = L * row[v] - j * S
                    if pot[v] is None or cand < pot[v]:
                        pot[v] = cand
        if any(p is None for p in pot):
            return None
        stats["relaxations"] = stats.get("relaxations", 0) + len(self.tail)
        for j in range(len(self.tail)):
            if pot[self.head[j]] > pot[self.tail[j]] + L * self.cost[j] - S:
                return None
        return best_cycle, best

    # -- Howard -------------------------------------------------------------

    def howard(self, limit: int | None, stats: dict):
        """Policy iteration; returns None if ``limit`` rounds did not converge."""
        k = self.k
        policy = [-1] * k
        for u in range(k):
            for j in self.out[u]:
                if policy[u] < 0 or self.cost[j] < self.cost[policy[u]]:
                    policy[u] = j
        rounds = 0
        while True:
            cyc_of, S, L, D, cycles = self._evaluate(policy)
            changed = False
            for u in range(k):
                cu = cyc_of[u]
                Su, Lu = S[cu], L[cu]
                best_j = -1
                best_c = cu
                for j in self.out[u]:
                    cv = cyc_of[self.head[j]]
                    if S[cv] * L[best_c] < S[best_c] * L[cv]:
                        best_j, best_c = j, cv
                if best_j >= 0:
                    policy[u] = best_j
                    changed = True
                    continue
                # no better mean reachable: improve the relative value instead
                best_j, best_num, best_den = -1, D[u], Lu
                for j in self.out[u]:
                    v = self.head[j]
                    cv = cyc_of[v]
                    if S[cv] * Lu != Su * L[cv]:
                        continue
                    num = L[cv] * self.cost[j] - S[cv] + D[v]
                    if num * best_den < best_num * L[cv]:
                        best_j, best_num, best_den = j, num, L[cv]
                if best_j >= 0 and best_j != policy[u]:
                    policy[u] = best_j
                    changed = True
            stats["relaxations"] = stats.get("relaxations", 0) + len(self.tail)
            rounds += 1
            if not changed:
                break
            if limit is not None and rounds >= limit:
                stats["howard_rounds"] = stats.get("howard_rounds", 0) + rounds
                return None
        stats["howard_rounds"] = stats.get("howard_rounds", 0) + rounds
        best_c = min(range(len(cycles)), key=lambda c: (Fraction(S[c], L[c]), c))
        cyc = cycles[best_c]
        return cyc, MeanValue(S[best_c], L[best_c])

    def _evaluate(self, policy):
        k = self.k
        succ = [self.head[policy[u]] for u in range(k)]
        cyc_of = [-1] * k
        D = [0] * k
        state = [0] * k  # 0 new, 1 on current walk, 2 done
        S: list[int] = []
        L: list[int] = []
        cycles: list[list[int]] = []
        for s in range(k):
            if state[s]:
                continue
            walk = []
            u = s
            while state[u] == 0:
                state[u] = 1
                walk.append(u)
                u = succ[u]
            if state[u] == 1:
                # closed a new cycle starting at u
                start = walk.index(u)
                cyc_nodes = walk[start:]
                arcs = [policy[x] for x in cyc_nodes]
                c_id = len(S)
                S.append(sum(self.cost[j] for j in arcs))
                L.append(len(arcs))
                cycles.append(arcs)
                D[u] = 0
                for x in reversed(cyc_nodes[1:]):
                    cyc_of[x] = c_id
                    D[x] = L[c_id] * self.cost[policy[x]] - S[c_id] + D[succ[x]]
                cyc_of[u] = c_id
                for x in cyc_nodes:
                    state[x] = 2
                walk = walk[:start]
            for x in reversed(walk):
                c_id = cyc_of[succ[x]]
                cyc_of[x] = c_id
                D[x] = L[c_id] * self.cost[policy[x]] - S[c_id] + D[succ[x]]
                state[x] = 2
        return cyc_of, S, L, D, cycles


def min_mean_cycle(
    n: int,
    arcs: Sequence[tuple[int, int]],
    costs: Sequence[int],
    method: str = "combined",
    howard_limit: int | None = None,
    stats: dict | None = None,
) -> tuple[list[int], MeanValue] | None:
    """Find a directed cycle of minimum mean cost.

    Returns ``(cycle, mean)`` where ``cycle`` lists arc indices in traversal
    order, or None when the graph is acyclic.  Plain ``"howard"`` with a
    ``howard_limit`` also returns None when the limit is hit, and sets
    ``stats["limit_reached"]``.  ``stats`` (if given) receives
    operation counters: ``relaxations``, ``howard_rounds``, ``fallbacks``.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if stats is None:
        stats = {}
    tails = [int(a[0]) for a in arcs]
    heads = [int(a[1]) for a in arcs]
    comp_of = [0] * n
    comps = strongly_connected_components(n, tails, heads)
    for c, nodes in enumerate(comps):
        for v in nodes:
            comp_of[v] = c
    inside: list[list[int]] = [[] for _ in comps]
    for a, (u, v) in enumerate(zip(tails, heads)):
        if comp_of[u] == comp_of[v]:
            inside[comp_of[u]].append(a)

    best = None
    for c, nodes in enumerate(comps):
        if not inside[c]:
            continue
        comp = _Component(nodes, inside[c], tails, heads, costs)
        if method == "karp":
            found = comp.karp(stats)
        elif method == "hartmann-orlin":
            found = comp.hartmann_orlin(stats)
        elif method == "howard":
            found = comp.howard(howard_limit, stats)
            if found is None:
                stats["limit_reached"] = True
                return None
        else:
            found = comp.howard(n, stats)
            if found is None:
                stats["fallbacks"] = stats.get("fallbacks", 0) + 1
                found = comp.hartmann_orlin(stats)
        cyc, value = found
        if best is None or value < best[1]:
            best = ([comp.arc_ids[j] for j in cyc], value)
    return best
