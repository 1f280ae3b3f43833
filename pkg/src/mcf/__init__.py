"""Minimum-cost flow solvers: cycle canceling, augmenting paths, cost scaling
and network simplex, with an independent optimality checker."""

from .aug_path import solve_cas, solve_ssp
from .cost_scaling import Heuristics, Variant, solve_cos
from .cycle_cancel import solve_cat, solve_mmcc, solve_scc
from .dimacs import parse_dimacs, write_dimacs, write_solution
from .errors import MCFError
from .generate import GenSpec, generate
from .graph import FlowState, Network, build_network, magnitudes, residual_view
from .minmean import MeanValue, min_mean_cycle
from .report import SolverReport, Status
from .simplex import PivotRule, solve_ns
from .solvers import ALGORITHMS, SolverConfig, all_configurations, solve
from .verify import epsilon_of_flow, verify_optimality

__all__ = [
    "ALGORITHMS", "FlowState", "GenSpec", "Heuristics", "MCFError", "MeanValue", "Network",
    "PivotRule", "SolverConfig", "SolverReport", "Status", "Variant", "all_configurations",
    "build_network", "epsilon_of_flow", "generate", "magnitudes", "min_mean_cycle",
    "parse_dimacs", "residual_view", "solve", "solve_cas", "solve_cat", "solve_cos",
    "solve_mmcc", "solve_ns", "solve_scc", "solve_ssp", "verify_optimality", "write_dimacs",
    "write_solution",
]
