"""Seeded instance generators.

The families imitate the statistics of the classic benchmark families without
being bit-compatible with their original generator codes:

* ``random-sparse`` and ``random-dense``: uniform random arcs on top of a
  random Hamiltonian cycle whose arcs can carry the whole supply, so every
  instance is connected and feasible.  About sqrt(n) supply and sqrt(n)
  demand nodes, capacities in [1, 1000], costs in [1, 10000].
* ``grid-torus``: an r x c torus (r the largest divisor of n not above
  sqrt(n)) with arcs to the four neighbours, optional extra random arcs, one
  supply node and one demand node on the opposite side.  The supply is half
  the exact maximum flow between them.  This approximates, and is not, GOTO.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .errors import InvalidSpec
from .graph import Network, build_network
from .rng import SplitMix64

FAMILIES = ("random-sparse", "random-dense", "grid-torus")


@dataclass(frozen=True)
class GenSpec:
    family: str = "random-sparse"
    n: int = 1024
    deg: int | None = None  # average outdegree; None picks the family default
    cap_range: tuple[int, int] = (1, 1000)
    cost_range: tuple[int, int] = (1, 10000)
    supply_nodes: int | None = None  # None: ceil(sqrt(n))
    total_supply: int | None = None  # None: 1000 per supply node
    seed: int = 1

    def resolved_deg(self) -> int:
        if self.deg is not None:
            return self.deg
        if self.family == "random-dense":
            return max(1, math.isqrt(self.n))
        return 8

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.n < 2:
            raise InvalidSpec("n must be at least 2")
        if self.resolved_deg() < 1:
            raise InvalidSpec("deg must be positive")
        lo, hi = self.cap_range
        if not 1 <= lo <= hi:
            raise InvalidSpec("capacity range must satisfy 1 <= lo <= hi")
        lo, hi = self.cost_range
        if lo > hi:
            raise InvalidSpec("cost range is empty")
        k = self.supply_nodes
        if k is not None and not 1 <= k <= self.n // 2:
            raise InvalidSpec("supply_nodes must lie in [1, n/2]")
        if self.total_supply is not None and self.total_supply < 0:
            raise InvalidSpec("total_supply must be nonnegative")


def _split(rng: SplitMix64, total: int, parts: int) -> list[int]:
    """Random composition of ``total`` into ``parts`` nonnegative integers."""
    cuts = sorted(rng.randint(0, total) for _ in range(parts - 1))
    bounds = [0] + cuts + [total]
    return [bounds[i + 1] - bounds[i] for i in range(parts)]


def _random_arc(rng: SplitMix64, n: int) -> tuple[int, int]:
    i = rng.below(n)
    j = rng.below(n - 1)
    return i, j + (j >= i)


def _random_family(spec: GenSpec, rng: SplitMix64) -> Network:
    n = spec.n
    m = spec.resolved_deg() * n
    k = spec.supply_nodes or min(math.ceil(math.sqrt(n)), n // 2)
    total = spec.total_supply if spec.total_supply is not None else 1000 * k
    perm = list(range(n))
    rng.shuffle(perm)
    supply = [0] * n
    for v, b in zip(perm[:k], _split(rng, total, k)):
        supply[v] += b
    for v, b in zip(perm[k:2 * k], _split(rng, total, k)):
        supply[v] -= b
    order = list(range(n))
    rng.shuffle(order)
    arcs = [(order[i], order[(i + 1) % n]) for i in range(n)]
    caps = [max(total, spec.cap_range[1])] * n
    while len(arcs) < m:
        arcs.append(_random_arc(rng, n))
        caps.append(rng.randint(*spec.cap_range))
    costs = [rng.randint(*spec.cost_range) for _ in arcs]
    return build_network(n, arcs, caps, costs, supply)


def _grid_family(spec: GenSpec, rng: SplitMix64) -> Network:
    n = spec.n
    rows = max(d for d in range(1, math.isqrt(n) + 1) if n % d == 0)
    cols = n // rows
    arcs = []
    seen = set()
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            for dr, dc in ((0, 1), (1, 0), (0, -1), (-1, 0)):
                w = ((r + dr) % rows) * cols + (c + dc) % cols
                if w != v and (v, w) not in seen:
                    seen.add((v, w))
                    arcs.append((v, w))
    m = max(spec.resolved_deg() * n, len(arcs))
    while len(arcs) < m:
        arcs.append(_random_arc(rng, n))
    caps = [rng.randint(*spec.cap_range) for _ in arcs]
    costs = [rng.randint(*spec.cost_range) for _ in arcs]
    source = 0
    sink = (rows // 2) * cols + cols // 2
    if sink == source:
        sink = n - 1
    tail = np.array([a[0] for a in arcs], dtype=np.int32)
    head = np.array([a[1] for a in arcs], dtype=np.int32)
    graph = csr_matrix((np.array(caps, dtype=np.int32), (tail, head)), shape=(n, n))
    value = int(maximum_flow(graph, source, sink).flow_value)
    amount = spec.total_supply if spec.total_supply is not None else max(1, value // 2)
    if amount > value:
        raise InvalidSpec(f"total_supply {amount} exceeds the maximum flow {value}")
    supply = [0] * n
    supply[source] = amount
    supply[sink] = -amount
    return build_network(n, arcs, caps, costs, supply)


def generate(spec: GenSpec) -> Network:
    """Build the instance described by ``spec``; deterministic in ``spec.seed``.

    Raises:
        InvalidSpec: the generator settings are inconsistent.
    """
    spec.validate()
    rng = SplitMix64(spec.seed)
    if spec.family == "grid-torus":
        return _grid_family(spec, rng)
    return _random_family(spec, rng)
