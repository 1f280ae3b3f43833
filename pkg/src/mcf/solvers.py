"""One entry point for every solver and a registry of named configurations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .aug_path import solve_cas, solve_ssp
from .cost_scaling import Heuristics, Variant, solve_cos
from .cycle_cancel import solve_cat, solve_mmcc, solve_scc
from .graph import Network
from .report import SolverReport
from .simplex import PivotRule, solve_ns

ALGORITHMS = ("scc", "mmcc", "cat", "ssp", "cas", "cos", "ns")
NONNEGATIVE_ONLY = ("ssp", "cas")


@dataclass(frozen=True)
class SolverConfig:
    """An algorithm plus its options, e.g. ``SolverConfig("cos", {"variant": "pr"})``."""

    alg: str
    options: dict = field(default_factory=dict)
    label: str = ""

    @property
    def name(self) -> str:
        return self.label or self.alg

    def run(self, network: Network, timeout: float | None = None) -> tuple[SolverReport, np.ndarray | None]:
        return solve(network, self.alg, timeout=timeout, **self.options)


def solve(network: Network, alg: str, timeout: float | None = None, **options):
    """Run algorithm ``alg`` on ``network``; returns ``(report, flow)``.

    COS options: ``variant`` (pr, ar, par), ``alpha``, ``k``, ``heuristics``.
    NS options: ``rule`` (be, fe, bs, cl, al), ``params``.  CAS: ``alpha``,
    ``extend_graph``.  CAT: ``alpha``.
    """
    runners: dict[str, Callable] = {
        "scc": solve_scc,
        "mmcc": solve_mmcc,
        "cat": solve_cat,
        "ssp": solve_ssp,
        "cas": solve_cas,
        "cos": solve_cos,
        "ns": solve_ns,
    }
    if alg not in runners:
        raise ValueError(f"unknown algorithm {alg!r}; choose from {ALGORITHMS}")
    return runners[alg](network, timeout=timeout, **options)


DEFAULTS = {alg: SolverConfig(alg) for alg in ALGORITHMS}


def all_configurations(include_nonnegative_only: bool = True) -> list[SolverConfig]:
    """Every algorithm, with all COS variants and all NS pivot rules spelled out."""
    configs = [SolverConfig("scc"), SolverConfig("mmcc"), SolverConfig("cat")]
    if include_nonnegative_only:
        configs += [SolverConfig("ssp"), SolverConfig("cas"),
                    SolverConfig("cas", {"extend_graph": True}, "cas-extended")]
    for v in Variant:
        configs.append(SolverConfig("cos", {"variant": v.value}, f"cos-{v.value}"))
    configs.append(SolverConfig(
        "cos", {"variant": "pr", "heuristics": Heuristics(False, False, False)}, "cos-pr-plain"))
    for rule in PivotRule:
        configs.append(SolverConfig("ns", {"rule": rule.value}, f"ns-{rule.value}"))
    return configs
