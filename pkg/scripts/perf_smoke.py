#!/usr/bin/env python3
"""Trend-level timing check on RandomSparse instances.

Cost scaling and network simplex should beat simple cycle canceling by at
least 10x at n = 2^12, and finish n = 2^16 within two minutes.
"""

import argparse
import sys

from mcf.generate import GenSpec, generate
from mcf.report import Status
from mcf.solvers import solve


def timed(net, alg, timeout=None):
    report, _ = solve(net, alg, timeout=timeout)
    shown = "timeout" if report.status is Status.TIMEOUT else f"{report.wall_time_ms / 1000:.2f}s"
    print(f"  {alg:4s} {report.status.value:10s} {shown:>10s}  obj={report.objective}", flush=True)
    return report


def main() -> int:
    ap = argparse.ArgumentParser(description="performance smoke test")
    ap.add_argument("--small", type=int, default=12, help="log2 n of the ratio instance")
    ap.add_argument("--large", type=int, default=16, help="log2 n of the size instance")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    warm = generate(GenSpec(n=64, seed=args.seed))
    for alg in ("cos", "ns", "scc"):
        solve(warm, alg)

    print(f"n = 2^{args.small}")
    net = generate(GenSpec(n=2 ** args.small, deg=8, seed=args.seed))
    cos, ns = timed(net, "cos"), timed(net, "ns")
    bar = 10 * max(cos.wall_time_ms, ns.wall_time_ms) / 1000
    scc = timed(net, "scc", timeout=bar)
    ratio_ok = scc.status is Status.TIMEOUT or scc.wall_time_ms / 1000 >= bar

    print(f"n = 2^{args.large}")
    big = generate(GenSpec(n=2 ** args.large, deg=8, seed=args.seed))
    size_ok = all(timed(big, alg, timeout=120).optimal for alg in ("cos", "ns"))

    print(f"ratio check {'ok' if ratio_ok else 'FAILED'}, size check {'ok' if size_ok else 'FAILED'}")
    return 0 if ratio_ok and size_ok else 1


if __name__ == "__main__":
    sys.exit(main())
