#!/usr/bin/env python3
"""Cost-scaling variants and heuristics, and network simplex pivot rules, on one family.

    python3 scripts/variant_study.py --n 4096 --seeds 1 2 3
"""

import argparse
from statistics import mean

from mcf.generate import FAMILIES, GenSpec, generate
from mcf.solvers import all_configurations


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--family", choices=FAMILIES, default="random-sparse")
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--timeout", type=float, default=120)
    args = ap.parse_args()

    configs = [c for c in all_configurations() if c.alg in ("cos", "ns")]
    nets = [generate(GenSpec(family=args.family, n=args.n, seed=s)) for s in args.seeds]
    configs[0].run(generate(GenSpec(n=64)))  # compile kernels before timing
    print(f"{'config':14s} {'mean ms':>10s} {'mean iterations':>16s}")
    for cfg in configs:
        runs = [cfg.run(net, timeout=args.timeout)[0] for net in nets]
        if all(r.optimal for r in runs):
            print(f"{cfg.name:14s} {mean(r.wall_time_ms for r in runs):10.1f} "
                  f"{mean(r.iterations for r in runs):16.0f}")
        else:
            print(f"{cfg.name:14s} {'-':>10s}")


if __name__ == "__main__":
    main()
