"""Command line: ``mcf solve | verify | gen | bench``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import BenchConfig, rows_to_csv, run_bench, summary_to_csv, write_csv
from .cost_scaling import Heuristics
from .dimacs import parse_dimacs, parse_solution, write_dimacs, write_solution
from .errors import MCFError
from .generate import FAMILIES, GenSpec, generate
from .report import Status
from .solvers import ALGORITHMS, solve
from .verify import verify_optimality


def _solve(args) -> int:
    net = parse_dimacs(Path(args.file).read_text())
    options = {}
    if args.alg == "cos":
        options = {"variant": args.cos_variant, "k": args.k,
                   "heuristics": Heuristics(not args.no_price_refine, not args.no_global_update,
                                            not args.no_look_ahead)}
        if args.alpha:
            options["alpha"] = args.alpha
    elif args.alg == "ns":
        options = {"rule": args.pivot}
    elif args.alg in ("cas", "cat") and args.alpha:
        options = {"alpha": args.alpha}
    report, flow = solve(net, args.alg, timeout=args.timeout, **options)
    print(f"c {report.solver} {report.status} {report.wall_time_ms:.1f} ms", file=sys.stderr)
    if report.status is not Status.OPTIMAL:
        print(f"c status {report.status}")
        return 2
    if not verify_optimality(net, flow).optimal:
        print("c solution failed verification", file=sys.stderr)
        return 3
    sys.stdout.write(write_solution(net, report, flow))
    return 0


def _verify(args) -> int:
    net = parse_dimacs(Path(args.file).read_text())
    claimed, flow = parse_solution(net, Path(args.solution).read_text())
    result = verify_optimality(net, flow)
    objective = net.objective(flow)
    if not result.feasible:
        print("infeasible")
        for v in result.violations:
            print(f"  {v}")
        return 1
    if claimed is not None and claimed != objective:
        print(f"objective mismatch: file says {claimed}, flow costs {objective}")
        return 1
    if result.optimal:
        print(f"optimal {objective}")
        return 0
    print(f"not optimal {objective}; epsilon {result.epsilon}")
    return 1


def _gen(args) -> int:
    spec = GenSpec(family=args.family, n=args.n, deg=args.deg, seed=args.seed)
    text = write_dimacs(generate(spec))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _bench(args) -> int:
    config = BenchConfig.from_file(args.config)
    if args.output:
        config.output = args.output

    def log(row):
        print(f"c {row.family} n={row.n} seed={row.seed} {row.solver}: {row.status} "
              f"{row.time_ms:.1f} ms", file=sys.stderr)

    output, config.output = config.output, None
    rows = run_bench(config, log=log)
    if output:
        write_csv(rows, output)
    else:
        sys.stdout.write(rows_to_csv(rows))
        sys.stdout.write("\n" + summary_to_csv(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mcf", description="Minimum-cost flow solvers")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a DIMACS instance")
    s.add_argument("file")
    s.add_argument("--alg", choices=ALGORITHMS, default="ns")
    s.add_argument("--cos-variant", choices=["pr", "ar", "par"], default="par")
    s.add_argument("--k", type=int, default=4, help="path length for partial augment-relabel")
    s.add_argument("--alpha", type=int, default=None)
    s.add_argument("--pivot", choices=["be", "fe", "bs", "cl", "al"], default="bs")
    s.add_argument("--timeout", type=float, default=None, help="seconds")
    s.add_argument("--no-price-refine", action="store_true")
    s.add_argument("--no-global-update", action="store_true")
    s.add_argument("--no-look-ahead", action="store_true")
    s.set_defaults(func=_solve)

    v = sub.add_parser("verify", help="check a solution file against an instance")
    v.add_argument("file")
    v.add_argument("solution")
    v.set_defaults(func=_verify)

    g = sub.add_parser("gen", help="generate an instance in DIMACS format")
    g.add_argument("--family", choices=FAMILIES, default="random-sparse")
    g.add_argument("--n", type=int, default=1024)
    g.add_argument("--deg", type=int, default=None)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--output", "-o", default=None)
    g.set_defaults(func=_gen)

    b = sub.add_parser("bench", help="run a benchmark config")
    b.add_argument("--config", required=True)
    b.add_argument("--output", "-o", default=None)
    b.set_defaults(func=_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MCFError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
