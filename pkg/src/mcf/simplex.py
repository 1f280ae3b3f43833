"""Primal network simplex on a strongly feasible spanning tree.

The basis is stored with the XTI labelling: parent, parent arc and its
direction, preorder thread with its inverse, subtree size and last subtree
node.  An artificial root ``n`` is joined to every node by an artificial arc of
cost ``max(nC, 1)``; arcs ``m..m+n-1`` are these artificial arcs.  The leaving
arc is the last blocking arc met when walking the cycle from the join node in
the augmentation direction, which keeps the tree strongly feasible.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numba import njit

from .errors import InternalInconsistency
from .graph import Network, magnitudes
from .report import Deadline, SolverReport, Status

STATE_UPPER, STATE_TREE, STATE_LOWER = -1, 0, 1
DIR_UP, DIR_DOWN = 1, -1

CHUNK = 20000  # pivots per kernel call between timeout checks

# rule state vector layout
R_RULE, R_NEXT, R_BLOCK, R_LIST, R_MINOR_LIMIT, R_MINOR, R_LEN, R_HEAD, R_START = range(9)
RULE_STATE_LEN = 9
# kernel counters
C_PIVOTS, C_DEGENERATE, C_FLIPS = range(3)


class PivotRule(str, enum.Enum):
    BEST_ELIGIBLE = "be"
    FIRST_ELIGIBLE = "fe"
    BLOCK_SEARCH = "bs"
    CANDIDATE_LIST = "cl"
    ALTERING_LIST = "al"

    @property
    def code(self) -> int:
        return list(PivotRule).index(self)


@dataclass(frozen=True)
class PivotParams:
    """Rule parameters; ``None`` means the default derived from m."""

    block_size: int | None = None
    list_length: int | None = None
    minor_limit: int | None = None
    head_length: int | None = None

    def resolve(self, m: int) -> tuple[int, int, int, int]:
        root = math.isqrt(max(m, 1))
        B = self.block_size or max(1, root)
        L = self.list_length or max(1, root // 4)
        K = self.minor_limit or max(1, L // 10)
        H = self.head_length or max(1, B // 100)
        if min(B, L, K, H) < 1:
            raise ValueError("pivot rule parameters must be positive")
        return B, L, K, H


# ---------------------------------------------------------------- kernels


@njit(cache=True)
def _violation(e, state, cost, source, target, pi):
    """state * reduced cost; negative exactly when the arc is eligible."""
    return state[e] * (cost[e] + pi[source[e]] - pi[target[e]])


@njit(cache=True)
def _select(rs, cand, cand_cost, in_list, state, cost, source, target, pi):
    M = len(state)
    rule = rs[R_RULE]
    if rule == 0:  # best eligible
        best = 0
        arc = -1
        for e in range(M):
            c = _violation(e, state, cost, source, target, pi)
            if c < best:
                best = c
                arc = e
        return arc
    if rule == 1:  # first eligible, cyclic
        start = rs[R_NEXT]
        for t in range(M):
            e = start + t
            if e >= M:
                e -= M
            if _violation(e, state, cost, source, target, pi) < 0:
                rs[R_NEXT] = e + 1 if e + 1 < M else 0
                return e
        return -1
    if rule == 2:  # block search
        start = rs[R_NEXT]
        cnt = rs[R_BLOCK]
        best = 0
        arc = -1
        for t in range(M):
            e = start + t
            if e >= M:
                e -= M
            c = _violation(e, state, cost, source, target, pi)
            if c < best:
                best = c
                arc = e
            cnt -= 1
            if cnt == 0:
                if best < 0:
                    rs[R_NEXT] = e
                    return arc
                cnt = rs[R_BLOCK]
        return arc
    if rule == 3:  # candidate list
        if rs[R_LEN] > 0 and rs[R_MINOR] < rs[R_MINOR_LIMIT]:
            rs[R_MINOR] += 1
            best = 0
            arc = -1
            i = 0
            while i < rs[R_LEN]:
                e = cand[i]
                c = _violation(e, state, cost, source, target, pi)
                if c < best:
                    best = c
                    arc = e
                    i += 1
                elif c >= 0:
                    rs[R_LEN] -= 1
                    cand[i] = cand[rs[R_LEN]]
                else:
                    i += 1
            if arc >= 0:
                return arc
        start = rs[R_NEXT]
        rs[R_LEN] = 0
        best = 0
        arc = -1
        for t in range(M):
            e = start + t
            if e >= M:
                e -= M
            c = _violation(e, state, cost, source, target, pi)
            if c < 0:
                cand[rs[R_LEN]] = e
                rs[R_LEN] += 1
                if c < best:
                    best = c
                    arc = e
                if rs[R_LEN] == rs[R_LIST]:
                    rs[R_NEXT] = e
                    break
        rs[R_MINOR] = 1
        return arc
    # altering candidate list
    length = 0
    for i in range(rs[R_LEN]):
        e = cand[i]
        c = _violation(e, state, cost, source, target, pi)
        if c < 0:
            cand_cost[e] = c
            cand[length] = e
            length += 1
        else:
            in_list[e] = 0
    start = rs[R_NEXT]
    cnt = rs[R_BLOCK]
    for t in range(M):
        e = start + t
        if e >= M:
            e -= M
        if in_list[e] == 0:
            c = _violation(e, state, cost, source, target, pi)
            if c < 0:
                cand_cost[e] = c
                cand[length] = e
                length += 1
                in_list[e] = 1
        cnt -= 1
        if cnt == 0:
            if length > rs[R_HEAD]:
                rs[R_NEXT] = e + 1 if e + 1 < M else 0
                break
            cnt = rs[R_BLOCK]
    if length == 0:
        rs[R_LEN] = 0
        return -1
    # keep the best H candidates after the chosen one (ties by arc index)
    keys = np.empty(length, dtype=np.int64)
    for i in range(length):
        keys[i] = cand[i]
    order = np.argsort(keys, kind="mergesort")
    sorted_arcs = keys[order]
    costs = np.empty(length, dtype=np.int64)
    for i in range(length):
        costs[i] = cand_cost[sorted_arcs[i]]
    order2 = np.argsort(costs, kind="mergesort")
    arc = sorted_arcs[order2[0]]
    keep = min(rs[R_HEAD], length - 1)
    for i in range(length):
        in_list[cand[i]] = 0
    for i in range(keep):
        e = sorted_arcs[order2[i + 1]]
        cand[i] = e
        in_list[e] = 1
    rs[R_LEN] = keep
    return arc


@njit(cache=True)
def _pivot(in_arc, source, target, cap, cost, flow, state, pi, parent, pred, pred_dir,
           thread, rev_thread, succ_num, last_succ, first_child, next_sib, seg, stack, cnt):
    # join node
    u = source[in_arc]
    v = target[in_arc]
    while u != v:
        if succ_num[u] < succ_num[v]:
            u = parent[u]
        else:
            v = parent[v]
    join = u
    # leaving arc
    if state[in_arc] == STATE_LOWER:
        first = source[in_arc]
        second = target[in_arc]
    else:
        first = target[in_arc]
        second = source[in_arc]
    delta = cap[in_arc]
    result = 0
    u_out = -1
    u = first
    while u != join:
        e = pred[u]
        d = flow[e]
        if pred_dir[u] == DIR_DOWN:
            d = cap[e] - d
        if d < delta:
            delta = d
            u_out = u
            result = 1
        u = parent[u]
    u = second
    while u != join:
        e = pred[u]
        d = flow[e]
        if pred_dir[u] == DIR_UP:
            d = cap[e] - d
        if d <= delta:
            delta = d
            u_out = u
            result = 2
        u = parent[u]
    if result == 1:
        u_in = first
        v_in = second
    else:
        u_in = second
        v_in = first
    # augment
    if delta > 0:
        val = state[in_arc] * delta
        flow[in_arc] += val
        u = source[in_arc]
        while u != join:
            flow[pred[u]] -= pred_dir[u] * val
            u = parent[u]
        u = target[in_arc]
        while u != join:
            flow[pred[u]] += pred_dir[u] * val
            u = parent[u]
    else:
        cnt[C_DEGENERATE] += 1
    if result == 0:
        state[in_arc] = -state[in_arc]
        cnt[C_FLIPS] += 1
        return
    out_arc = pred[u_out]
    state[in_arc] = STATE_TREE
    state[out_arc] = STATE_LOWER if flow[out_arc] == 0 else STATE_UPPER

    # detach the subtree of u_out from the thread
    v_out = parent[u_out]
    size = succ_num[u_out]
    old_last = last_succ[u_out]
    before = rev_thread[u_out]
    after = thread[old_last]
    thread[before] = after
    rev_thread[after] = before
    w = u_out
    for i in range(size):
        seg[i] = w
        w = thread[w]
    u = v_out
    while u != join:
        succ_num[u] -= size
        u = parent[u]
    u = v_out
    while u != -1 and last_succ[u] == old_last:
        last_succ[u] = before
        u = parent[u]

    # reverse the stem from u_in up to u_out
    prev = v_in
    prev_arc = in_arc
    prev_dir = DIR_UP if source[in_arc] == u_in else DIR_DOWN
    u = u_in
    while True:
        nxt = parent[u]
        nxt_arc = pred[u]
        nxt_dir = -pred_dir[u]
        parent[u] = prev
        pred[u] = prev_arc
        pred_dir[u] = prev_dir
        if u == u_out:
            break
        prev = u
        prev_arc = nxt_arc
        prev_dir = nxt_dir
        u = nxt

    # preorder of the re-rooted subtree
    for i in range(size):
        first_child[seg[i]] = -1
    for i in range(size - 1, -1, -1):
        w = seg[i]
        if w != u_in:
            p = parent[w]
            next_sib[w] = first_child[p]
            first_child[p] = w
    top = 0
    stack[0] = u_in
    k = 0
    while top >= 0:
        w = stack[top]
        top -= 1
        seg[k] = w
        k += 1
        # push children in reverse so the first child comes out first
        c = first_child[w]
        base = top + 1
        while c != -1:
            top += 1
            stack[top] = c
            c = next_sib[c]
        lo = base
        hi = top
        while lo < hi:
            t = stack[lo]
            stack[lo] = stack[hi]
            stack[hi] = t
            lo += 1
            hi -= 1
    for i in range(size):
        succ_num[seg[i]] = 1
    for i in range(size - 1, 0, -1):
        succ_num[parent[seg[i]]] += succ_num[seg[i]]
    for i in range(size):
        last_succ[seg[i]] = seg[i + succ_num[seg[i]] - 1]
        if i + 1 < size:
            thread[seg[i]] = seg[i + 1]
            rev_thread[seg[i + 1]] = seg[i]
    new_last = seg[size - 1]

    # splice the subtree in right after v_in
    after = thread[v_in]
    thread[v_in] = u_in
    rev_thread[u_in] = v_in
    thread[new_last] = after
    rev_thread[after] = new_last
    u = v_in
    while u != join:
        succ_num[u] += size
        u = parent[u]
    u = v_in
    while u != -1 and last_succ[u] == v_in:
        last_succ[u] = new_last
        u = parent[u]

    # potentials of the moved subtree
    sigma = pi[v_in] - pi[u_in] - pred_dir[u_in] * cost[in_arc]
    for i in range(size):
        pi[seg[i]] += sigma


@njit(cache=True)
def _run(max_pivots, start_list, rs, cand, cand_cost, in_list, source, target, cap, cost,
         flow, state, pi, parent, pred, pred_dir, thread, rev_thread, succ_num, last_succ,
         first_child, next_sib, seg, stack, cnt):
    """Pivot until optimal (returns 0) or ``max_pivots`` pivots were made (returns 1)."""
    done = 0
    while done < max_pivots:
        arc = -1
        while rs[R_START] < len(start_list):
            e = start_list[rs[R_START]]
            rs[R_START] += 1
            if _violation(e, state, cost, source, target, pi) < 0:
                arc = e
                break
        if arc < 0:
            arc = _select(rs, cand, cand_cost, in_list, state, cost, source, target, pi)
        if arc < 0:
            return 0
        _pivot(arc, source, target, cap, cost, flow, state, pi, parent, pred, pred_dir,
               thread, rev_thread, succ_num, last_succ, first_child, next_sib, seg, stack,
               cnt)
        cnt[C_PIVOTS] += 1
        done += 1
    return 1


# ---------------------------------------------------------------- state


@dataclass
class SpanningTree:
    """Basis of the extended network (original arcs plus artificial arcs)."""

    n: int
    m: int
    root: int
    source: np.ndarray
    target: np.ndarray
    cap: np.ndarray
    cost: np.ndarray
    flow: np.ndarray
    state: np.ndarray
    pi: np.ndarray
    parent: np.ndarray
    pred: np.ndarray
    pred_dir: np.ndarray
    thread: np.ndarray
    rev_thread: np.ndarray
    succ_num: np.ndarray
    last_succ: np.ndarray
    work: dict = field(default_factory=dict)

    def reduced_cost(self, e: int) -> int:
        return int(self.cost[e] + self.pi[self.source[e]] - self.pi[self.target[e]])

    def eligible(self) -> np.ndarray:
        rc = self.cost + self.pi[self.source] - self.pi[self.target]
        return np.flatnonzero(self.state * rc < 0)

    def violations(self) -> np.ndarray:
        """|reduced cost| of eligible arcs, zero elsewhere."""
        rc = self.cost + self.pi[self.source] - self.pi[self.target]
        v = -(self.state * rc)
        return np.where(v > 0, v, 0)

    def objective(self) -> int:
        return int(np.dot(self.flow, self.cost))

    def check(self) -> list[str]:
        """Every structural invariant, recomputed from scratch; returns the failures."""
        problems = []
        N = self.n + 1
        tree = np.flatnonzero(self.state == STATE_TREE)
        if len(tree) != self.n:
            problems.append(f"{len(tree)} tree arcs, expected {self.n}")
        rc = self.cost + self.pi[self.source] - self.pi[self.target]
        if np.any(rc[tree] != 0):
            problems.append("nonzero reduced cost on a tree arc")
        if self.pi[self.root] != 0:
            problems.append("root potential moved")
        lower = self.state == STATE_LOWER
        upper = self.state == STATE_UPPER
        if np.any(self.flow[lower] != 0) or np.any(self.flow[upper] != self.cap[upper]):
            problems.append("non-tree arc not at a bound")
        if np.any(self.flow < 0) or np.any(self.flow > self.cap):
            problems.append("flow outside bounds")
        if np.any(self.rev_thread[self.thread] != np.arange(N)):
            problems.append("reverse thread is not the inverse of thread")
        order = [self.root]
        while len(order) <= N:
            nxt = int(self.thread[order[-1]])
            if nxt == self.root:
                break
            order.append(nxt)
        if len(order) != N:
            problems.append("thread is not a single cycle through all nodes")
            return problems
        size = np.ones(N, dtype=np.int64)
        for v in reversed(order[1:]):
            size[self.parent[v]] += size[v]
        if np.any(size != self.succ_num):
            problems.append("successor counts differ from subtree sizes")
        index = {v: i for i, v in enumerate(order)}
        for v in order:
            if self.last_succ[v] != order[index[v] + size[v] - 1]:
                problems.append(f"last successor of {v} is wrong")
                break
            p = self.parent[v]
            if v != self.root and not (index[p] < index[v] <= index[p] + size[p] - 1):
                problems.append(f"thread is not a preorder at {v}")
                break
        for v in range(N):
            if v == self.root:
                continue
            e = self.pred[v]
            if self.state[e] != STATE_TREE:
                problems.append(f"parent arc of {v} is not a tree arc")
                continue
            up = self.source[e] == v and self.target[e] == self.parent[v]
            down = self.target[e] == v and self.source[e] == self.parent[v]
            if not (up and self.pred_dir[v] == DIR_UP or down and self.pred_dir[v] == DIR_DOWN):
                problems.append(f"parent arc of {v} does not join it to its parent")
                continue
            room = self.cap[e] - self.flow[e] if up else self.flow[e]
            if room <= 0:
                problems.append(f"tree not strongly feasible at node {v}")
        return problems


def init_artificial_basis(network: Network) -> SpanningTree:
    """Star tree around an artificial root with the supplies on artificial arcs."""
    n, m = network.n, network.m
    U, C = magnitudes(network)
    art_cost = max(n * C, 1)
    art_cap = max(n * U, 1)
    root = n
    nodes = np.arange(n, dtype=np.int64)
    supply = network.supply
    up = supply >= 0
    source = np.concatenate([network.tail, np.where(up, nodes, root)])
    target = np.concatenate([network.head, np.where(up, root, nodes)])
    cap = np.concatenate([network.capacity, np.full(n, art_cap, dtype=np.int64)])
    cost = np.concatenate([network.cost, np.full(n, art_cost, dtype=np.int64)])
    flow = np.concatenate([np.zeros(m, dtype=np.int64), np.abs(supply)])
    state = np.concatenate([np.full(m, STATE_LOWER, dtype=np.int64),
                            np.full(n, STATE_TREE, dtype=np.int64)])
    pi = np.concatenate([np.where(up, -art_cost, art_cost), [0]]).astype(np.int64)
    parent = np.concatenate([np.full(n, root, dtype=np.int64), [-1]])
    pred = np.concatenate([m + nodes, [-1]])
    pred_dir = np.concatenate([np.where(up, DIR_UP, DIR_DOWN), [0]]).astype(np.int64)
    thread = np.concatenate([nodes + 1, [0]])
    thread[n - 1] = root
    rev_thread = np.concatenate([[root], nodes[:-1], [n - 1]])
    succ_num = np.concatenate([np.ones(n, dtype=np.int64), [n + 1]])
    last_succ = np.concatenate([nodes, [n - 1]])
    N = n + 1
    work = {name: np.zeros(N, dtype=np.int64)
            for name in ("first_child", "next_sib", "seg", "stack")}
    return SpanningTree(n, m, root, source, target, cap, cost, flow, state, pi, parent, pred,
                        pred_dir, thread, rev_thread, succ_num.astype(np.int64),
                        last_succ.astype(np.int64), work)


@dataclass
class PivotState:
    """Cursor and candidate list shared by the partial pricing rules."""

    rs: np.ndarray
    cand: np.ndarray
    cand_cost: np.ndarray
    in_list: np.ndarray

    @classmethod
    def create(cls, rule: PivotRule, M: int, params: PivotParams = PivotParams()) -> "PivotState":
        B, L, K, H = params.resolve(M)
        rs = np.zeros(RULE_STATE_LEN, dtype=np.int64)
        rs[R_RULE] = rule.code
        rs[R_BLOCK] = B
        rs[R_LIST] = L
        rs[R_MINOR_LIMIT] = K
        rs[R_HEAD] = H
        return cls(rs, np.zeros(M + 1, dtype=np.int64), np.zeros(M, dtype=np.int64),
                   np.zeros(M, dtype=np.int64))


def select_entering_arc(tree: SpanningTree, pivots: PivotState) -> int | None:
    arc = _select(pivots.rs, pivots.cand, pivots.cand_cost, pivots.in_list, tree.state,
                  tree.cost, tree.source, tree.target, tree.pi)
    return None if arc < 0 else int(arc)


def execute_pivot(tree: SpanningTree, entering: int, counters: np.ndarray | None = None) -> None:
    if counters is None:
        counters = np.zeros(3, dtype=np.int64)
    w = tree.work
    _pivot(entering, tree.source, tree.target, tree.cap, tree.cost, tree.flow, tree.state,
           tree.pi, tree.parent, tree.pred, tree.pred_dir, tree.thread, tree.rev_thread,
           tree.succ_num, tree.last_succ, w["first_child"], w["next_sib"], w["seg"],
           w["stack"], counters)


def startup_arcs(network: Network, tree: SpanningTree) -> np.ndarray:
    """Eligible arcs met by a reverse breadth-first search from the demand nodes."""
    m = network.m
    limit = math.isqrt(max(m, 1))
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    order = np.argsort(network.head, kind="stable")
    start = np.searchsorted(network.head[order], np.arange(network.n + 1))
    eligible = np.zeros(m, dtype=bool)
    cand = tree.eligible()
    eligible[cand[cand < m]] = True
    seen = network.supply < 0
    queue = list(np.flatnonzero(seen))
    picked: list[int] = []
    head = 0
    tails = network.tail
    while head < len(queue) and len(picked) < limit:
        j = queue[head]
        head += 1
        for e in order[start[j]:start[j + 1]].tolist():
            if eligible[e]:
                picked.append(e)
                if len(picked) >= limit:
                    break
            i = tails[e]
            if not seen[i]:
                seen[i] = True
                queue.append(i)
    return np.array(picked, dtype=np.int64)


def solve_ns(
    network: Network,
    rule: PivotRule | str = PivotRule.BLOCK_SEARCH,
    params: PivotParams = PivotParams(),
    timeout: float | None = None,
    startup: bool = True,
    test_mode: bool = False,
    on_pivot: Callable[[SpanningTree], None] | None = None,
) -> tuple[SolverReport, np.ndarray | None]:
    """Network simplex.

    In ``test_mode`` every pivot is followed by a full invariant check
    (raising InternalInconsistency) and a check that the objective did not
    increase.
    """
    rule = PivotRule(rule)
    deadline = Deadline(timeout)
    tree = init_artificial_basis(network)
    M = network.m + network.n
    pivots = PivotState.create(rule, M, params)
    start_list = startup_arcs(network, tree) if startup else np.zeros(0, dtype=np.int64)
    cnt = np.zeros(3, dtype=np.int64)
    w = tree.work
    step = 1 if (test_mode or on_pivot is not None) else CHUNK
    last_obj = tree.objective()
    name = f"ns-{rule.value}"

    def finish(status, flow=None):
        counters = {"iterations": int(cnt[C_PIVOTS]), "pivots": int(cnt[C_PIVOTS]),
                    "degenerate": int(cnt[C_DEGENERATE]), "bound_flips": int(cnt[C_FLIPS])}
        objective = network.objective(flow) if status is Status.OPTIMAL else None
        return SolverReport(name, status, objective, counters, deadline.elapsed_ms()), flow

    while True:
        code = _run(step, start_list, pivots.rs, pivots.cand, pivots.cand_cost,
                    pivots.in_list, tree.source, tree.target, tree.cap, tree.cost, tree.flow,
                    tree.state, tree.pi, tree.parent, tree.pred, tree.pred_dir, tree.thread,
                    tree.rev_thread, tree.succ_num, tree.last_succ, w["first_child"],
                    w["next_sib"], w["seg"], w["stack"], cnt)
        if test_mode:
            problems = tree.check()
            if problems:
                raise InternalInconsistency("; ".join(problems))
            obj = tree.objective()
            if obj > last_obj:
                raise InternalInconsistency(f"objective rose from {last_obj} to {obj}")
            last_obj = obj
        if on_pivot is not None and code == 1:
            on_pivot(tree)
        if code == 0:
            break
        if deadline.expired():
            return finish(Status.TIMEOUT)
    if np.any(tree.flow[network.m:] != 0):
        return finish(Status.INFEASIBLE)
    flow = tree.flow[: network.m].copy()
    return finish(Status.OPTIMAL, flow)
