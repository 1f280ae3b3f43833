"""Solver outcome records and wall-clock budgeting."""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED_GUARD = "Unbounded-guard"
    TIMEOUT = "Timeout"

    def __str__(self) -> str:
        return self.value


@dataclass
class SolverReport:
    solver: str
    status: Status
    objective: int | None = None
    counters: dict[str, int] = field(default_factory=dict)
    wall_time_ms: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    @property
    def iterations(self) -> int:
        """The solver's headline iteration count (pivots, cancellations, ...)."""
        return int(self.counters.get("iterations", 0))


class Deadline:
    """Cooperative timeout; solvers poll :meth:`expired` between work chunks."""

    def __init__(self, timeout: float | None):
        self.start = time.perf_counter()
        self.timeout = timeout

    def expired(self) -> bool:
        return self.timeout is not None and time.perf_counter() - self.start > self.timeout

    def elapsed_ms(self) -> float:
        return (time.perf_counter() - self.start) * 1000.0
