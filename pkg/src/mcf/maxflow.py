"""Dinic maximum flow on plain integer lists.

Used to build initial feasible flows, to pre-check feasibility, and by the
instance generators.  Not performance critical.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .graph import Network


def max_flow(n: int, tails, heads, caps, s: int, t: int) -> tuple[int, list[int]]:
    """Return ``(value, flow)`` of a maximum s-t flow; ``flow`` is per input arc."""
    m = len(tails)
    adj: list[list[int]] = [[] for _ in range(n)]
    to = [0] * (2 * m)
    res = [0] * (2 * m)
    for a in range(m):
        u, v, c = int(tails[a]), int(heads[a]), int(caps[a])
        to[2 * a], res[2 * a] = v, c
        to[2 * a + 1], res[2 * a + 1] = u, 0
        adj[u].append(2 * a)
        adj[v].append(2 * a + 1)

    value = 0
    while True:
        level = [-1] * n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in adj[u]:
                if res[e] > 0 and level[to[e]] < 0:
                    level[to[e]] = level[u] + 1
                    q.append(to[e])
        if level[t] < 0:
            break
        it = [0] * n
        while True:
            # iterative blocking-flow DFS
            stack = [s]
            path: list[int] = []
            found = False
            while stack:
                u = stack[-1]
                if u == t:
                    found = True
                    break
                advanced = False
                while it[u] < len(adj[u]):
                    e = adj[u][it[u]]
                    v = to[e]
                    if res[e] > 0 and level[v] == level[u] + 1:
                        stack.append(v)
                        path.append(e)
                        advanced = True
                        break
                    it[u] += 1
                if not advanced:
                    level[u] = -1  # dead end
                    stack.pop()
                    if path:
                        path.pop()
                        it[stack[-1]] += 1
            if not found:
                break
            delta = min(res[e] for e in path)
            for e in path:
                res[e] -= delta
                res[e ^ 1] += delta
            value += delta
    return value, [res[2 * a + 1] for a in range(m)]


def feasible_flow(network: Network) -> np.ndarray | None:
    """A flow meeting all supplies and capacities, or None when none exists."""
    n, m = network.n, network.m
    s, t = n, n + 1
    tails = network.tail.tolist()
    heads = network.head.tolist()
    caps = network.capacity.tolist()
    need = 0
    for i, b in enumerate(network.supply.tolist()):
        if b > 0:
            tails.append(s), heads.append(i), caps.append(b)
            need += b
        elif b < 0:
            tails.append(i), heads.append(t), caps.append(-b)
    value, flow = max_flow(n + 2, tails, heads, caps, s, t)
    if value != need:
        return None
    return np.array(flow[:m], dtype=np.int64)
