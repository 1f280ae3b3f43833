"""Benchmark harness: generate instances, run solvers, write CSV.

Config files hold ``key = value`` lines (``#`` comments allowed)::

    families = random-sparse, grid-torus
    sizes = 256, 512
    seeds = 1, 2, 3
    solvers = cos, ns, ssp
    timeout = 60
    deg = 8
    output = results.csv

Solver names are algorithm names or configuration labels from
:func:`mcf.solvers.all_configurations` (for example ``ns-fe`` or ``cos-pr``).
"""

from __future__ import annotations

import configparser
import csv
import io
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import mean

from .errors import InvalidSpec, SolverDisagreement
from .generate import GenSpec, generate
from .report import Status
from .solvers import DEFAULTS, SolverConfig, all_configurations
from .verify import verify_optimality

COLUMNS = ["family", "n", "m", "seed", "solver", "status", "objective", "time_ms", "iterations"]
SUMMARY_COLUMNS = ["family", "n", "solver", "runs", "mean_time_ms"]


@dataclass
class BenchConfig:
    families: list[str] = field(default_factory=lambda: ["random-sparse"])
    sizes: list[int] = field(default_factory=lambda: [256])
    seeds: list[int] = field(default_factory=lambda: [1, 2, 3])
    solvers: list[str] = field(default_factory=lambda: ["cos", "ns"])
    timeout: float | None = 3600.0
    deg: int | None = None
    verify: bool = True
    output: str | None = None

    @classmethod
    def from_text(cls, text: str) -> "BenchConfig":
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
        parser.read_string("[bench]\n" + text)
        sec = parser["bench"]
        known = set(cls.__dataclass_fields__)
        unknown = set(sec) - known
        if unknown:
            raise InvalidSpec(f"unknown config keys: {sorted(unknown)}")

        def items(key):
            return [s.strip() for s in sec[key].split(",") if s.strip()]

        cfg = cls()
        if "families" in sec:
            cfg.families = items("families")
        if "sizes" in sec:
            cfg.sizes = [int(s) for s in items("sizes")]
        if "seeds" in sec:
            cfg.seeds = [int(s) for s in items("seeds")]
        if "solvers" in sec:
            cfg.solvers = items("solvers")
        if "timeout" in sec:
            cfg.timeout = None if sec["timeout"].strip() in ("", "none") else float(sec["timeout"])
        if "deg" in sec:
            cfg.deg = int(sec["deg"])
        if "verify" in sec:
            cfg.verify = sec.getboolean("verify")
        if "output" in sec:
            cfg.output = sec["output"].strip()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> "BenchConfig":
        return cls.from_text(Path(path).read_text())


@dataclass
class BenchRow:
    family: str
    n: int
    m: int
    seed: int
    solver: str
    status: str
    objective: int | None
    time_ms: float
    iterations: int

    def csv_values(self) -> list:
        timed_out = self.status == Status.TIMEOUT.value
        return [
            self.family, self.n, self.m, self.seed, self.solver, self.status,
            "" if self.objective is None else self.objective,
            "-" if timed_out else f"{self.time_ms:.3f}",
            self.iterations,
        ]


def resolve_solvers(names: list[str]) -> list[SolverConfig]:
    by_label = {c.name: c for c in all_configurations()}
    by_label.update(DEFAULTS)
    missing = [s for s in names if s not in by_label]
    if missing:
        raise InvalidSpec(f"unknown solvers {missing}; known: {sorted(by_label)}")
    return [by_label[s] for s in names]


def run_bench(config: BenchConfig, log=None) -> list[BenchRow]:
    """One row per (instance, solver).

    Raises:
        SolverDisagreement: two solvers reported different optimal objectives,
            or a reported optimum failed verification.
    """
    solvers = resolve_solvers(config.solvers)
    rows: list[BenchRow] = []
    for family in config.families:
        for n in config.sizes:
            for seed in config.seeds:
                net = generate(GenSpec(family=family, n=n, deg=config.deg, seed=seed))
                found: dict[str, int] = {}
                for solver in solvers:
                    report, flow = solver.run(net, timeout=config.timeout)
                    if report.optimal and config.verify:
                        verdict = verify_optimality(net, flow)
                        if not verdict.optimal:
                            raise SolverDisagreement(
                                f"{solver.name} on {family} n={n} seed={seed}: "
                                f"reported optimum fails verification ({verdict.violations[:3]})")
                    row = BenchRow(family, n, net.m, seed, solver.name, report.status.value,
                                   report.objective, report.wall_time_ms, report.iterations)
                    rows.append(row)
                    if log is not None:
                        log(row)
                    if report.optimal:
                        found[solver.name] = report.objective
                if len(set(found.values())) > 1:
                    raise SolverDisagreement(
                        f"objectives differ on {family} n={n} seed={seed}: {found}")
    if config.output:
        write_csv(rows, config.output)
    return rows


def summarize(rows: list[BenchRow]) -> list[dict]:
    """Mean time per (family, n, solver) over seeds; '-' if any run timed out."""
    groups: dict[tuple, list[BenchRow]] = {}
    for r in rows:
        groups.setdefault((r.family, r.n, r.solver), []).append(r)
    out = []
    for (family, n, solver), rs in groups.items():
        if all(r.status == Status.OPTIMAL.value for r in rs):
            avg = f"{mean(r.time_ms for r in rs):.3f}"
        else:
            avg = "-"
        out.append({"family": family, "n": n, "solver": solver, "runs": len(rs),
                    "mean_time_ms": avg})
    return out


def rows_to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow(r.csv_values())
    return buf.getvalue()


def summary_to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, SUMMARY_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(summarize(rows))
    return buf.getvalue()


def write_csv(rows: list[BenchRow], path: str | Path) -> tuple[Path, Path]:
    """Write the rows and, next to them, ``<stem>.summary.csv``."""
    path = Path(path)
    path.write_text(rows_to_csv(rows))
    summary = path.with_name(path.stem + ".summary.csv")
    summary.write_text(summary_to_csv(rows))
    return path, summary


def row_dicts(rows: list[BenchRow]) -> list[dict]:
    return [asdict(r) for r in rows]
