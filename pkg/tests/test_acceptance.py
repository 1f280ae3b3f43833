"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""

import random
import time
from fractions import Fraction

import pytest

from mcf import dimacs
from mcf.cost_scaling import Heuristics, phase_count, solve_cos
from mcf.errors import NetworkError
from mcf.generate import GenSpec, generate
from mcf.graph import magnitudes
from mcf.minmean import METHODS, min_mean_cycle
from mcf.report import Status
from mcf.simplex import PivotRule, solve_ns
from mcf.solvers import all_configurations, solve
from mcf.verify import epsilon_of_flow, verify_optimality

from oracles import (enumerate_optimum, feasible_instance, feasible_network, infeasible_cut,
                     lp_optimum, random_network, simple_cycles_min_mean)

pytestmark = pytest.mark.acceptance


def _small_instances(count):
    """Mostly feasible-by-construction instances, every fourth one arbitrary."""
    out, seed = [], 0
    while len(out) < count:
        seed += 1
        try:
            if seed % 4:
                net = feasible_network(seed, n_range=(2, 6), density=(0, 1), cap=(0, 3),
                                       cost=(0, 5))
            else:
                net = random_network(seed, n_range=(2, 6), extra=(0, 8), cap=(0, 3),
                                     cost=(0, 5), max_arcs=10)
        except NetworkError:
            continue
        if net.m <= 10:
            out.append(net)
    return out


def test_criterion_1_oracle_equivalence(acceptance):
    start = time.perf_counter()
    configs = all_configurations()
    failures = []
    feasible = 0
    for idx, net in enumerate(_small_instances(100)):
        expected = enumerate_optimum(net)
        feasible += expected is not None
        for cfg in configs:
            report, _ = cfg.run(net, timeout=None)
            got = report.objective if report.optimal else None
            if report.status not in (Status.OPTIMAL, Status.INFEASIBLE) or got != expected:
                failures.append((idx, cfg.name, report.status, got, expected))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60
    acceptance(1, "oracle equivalence", ok,
               f"{len(configs)} configs x 100 instances ({feasible} feasible), "
               f"{len(failures)} mismatches, {elapsed:.1f}s")
    assert not failures, failures[:5]
    assert elapsed < 60


def test_criterion_2_cross_solver_agreement(acceptance):
    start = time.perf_counter()
    configs = all_configurations()
    problems = []
    for seed in range(1, 501):
        net = feasible_network(seed, n_range=(4, 64))
        objectives = {}
        for cfg in configs:
            report, flow = cfg.run(net, timeout=None)
            if not report.optimal:
                problems.append((seed, cfg.name, report.status))
                continue
            objectives[cfg.name] = report.objective
            verdict = verify_optimality(net, flow)
            if not (verdict.optimal and all(verdict.verdicts.values())):
                problems.append((seed, cfg.name, "verify", verdict.verdicts))
        if len(set(objectives.values())) > 1:
            problems.append((seed, "disagree", objectives))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 300
    acceptance(2, "cross-solver agreement", ok,
               f"500 instances x {len(configs)} configs, {len(problems)} problems, {elapsed:.1f}s")
    assert not problems, problems[:5]
    assert elapsed < 300


def test_criterion_3_min_mean_agreement(acceptance):
    start = time.perf_counter()
    rng = random.Random(3)
    problems = []
    small = 0
    for trial in range(200):
        n = rng.randint(1, 8) if trial % 2 else rng.randint(2, 50)
        m = rng.randint(n, 4 * n)
        arcs = [(rng.randrange(n), rng.randrange(n)) for _ in range(m)]
        costs = [rng.randint(-20, 20) for _ in arcs]
        values = set()
        for method in METHODS:
            found = min_mean_cycle(n, arcs, costs, method=method)
            if found is None:
                values.add(None)
                continue
            cycle, mean = found
            total = sum(costs[a] for a in cycle)
            if Fraction(total, len(cycle)) != mean.as_fraction():
                problems.append((trial, method, "cycle does not realise its mean"))
            values.add(mean.as_fraction())
        if len(values) != 1:
            problems.append((trial, values))
        if n <= 8:
            small += 1
            if simple_cycles_min_mean(n, arcs, costs) != next(iter(values)):
                problems.append((trial, "enumeration", values))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 60
    acceptance(3, "min-mean agreement", ok,
               f"200 digraphs ({small} checked by enumeration), {len(problems)} problems, "
               f"{elapsed:.1f}s")
    assert not problems, problems[:5]
    assert elapsed < 60


def _residual_graph(net, flow):
    arcs, costs = [], []
    for a, (i, j) in enumerate(net.arcs()):
        if flow[a] < net.capacity[a]:
            arcs.append((i, j))
            costs.append(int(net.cost[a]))
        if flow[a] > 0:
            arcs.append((j, i))
            costs.append(-int(net.cost[a]))
    return arcs, costs


def test_criterion_4_epsilon_identity(acceptance):
    start = time.perf_counter()
    problems = []
    seed = checked = 0
    while checked < 100:
        seed += 1
        net, flow = feasible_instance(seed, n_range=(3, 7), density=(1, 2), cap=(0, 6),
                                      cost=(-10, 10))
        if verify_optimality(net, flow).optimal:
            continue
        checked += 1
        eps = epsilon_of_flow(net, flow).epsilon
        arcs, costs = _residual_graph(net, flow)
        reference = simple_cycles_min_mean(net.n, arcs, costs)
        if eps != -reference:
            problems.append((seed, eps, reference))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 60
    acceptance(4, "epsilon equals negated residual min mean", ok,
               f"100 non-optimal flows, {len(problems)} mismatches, {elapsed:.1f}s")
    assert not problems, problems[:5]
    assert elapsed < 60


def test_criterion_5_cos_phase_invariant(acceptance):
    start = time.perf_counter()
    problems = []
    for seed in range(1, 21):
        net = feasible_network(seed, n_range=(4, 24), cost=(-30, 30))
        _, C = magnitudes(net)
        for variant in ("pr", "ar", "par"):
            phases = []

            def on_phase(info):
                if not info.state.is_epsilon_optimal():
                    problems.append((seed, variant, info.index, "not eps-optimal"))
                phases.append(info)

            report, _ = solve_cos(net, variant=variant, debug=True, on_phase=on_phase)
            expected = phase_count(net.n, C, 16)
            skips = report.counters["price_refine_skips"]
            refined = sum(not p.skipped for p in phases)
            if not report.optimal or report.counters["phases"] != expected \
                    or refined != expected - skips:
                problems.append((seed, variant, report.counters["phases"], expected, skips))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 60
    acceptance(5, "cost-scaling phase invariant", ok,
               f"20 instances x 3 variants, {len(problems)} problems, {elapsed:.1f}s")
    assert not problems, problems[:5]
    assert elapsed < 60


def test_criterion_6_ns_structure(acceptance):
    start = time.perf_counter()
    problems = []
    pivots_checked = 0
    for seed in range(1, 51):
        net = feasible_network(seed, n_range=(4, 20), cost=(-20, 40))
        rule = list(PivotRule)[seed % len(PivotRule)]
        seen = []

        def on_pivot(tree):
            seen.append(1)
            issues = tree.check()
            if issues:
                problems.append((seed, rule.value, len(seen), issues[:3]))

        report, _ = solve_ns(net, rule=rule, test_mode=True, on_pivot=on_pivot)
        pivots_checked += len(seen)
        if not report.optimal or len(seen) != report.counters["pivots"]:
            problems.append((seed, rule.value, report.status, len(seen)))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 120
    acceptance(6, "simplex tree invariants", ok,
               f"50 instances, {pivots_checked} pivots checked, {len(problems)} problems, "
               f"{elapsed:.1f}s")
    assert not problems, problems[:5]
    assert elapsed < 120


def test_criterion_7_infeasibility(acceptance):
    start = time.perf_counter()
    configs = all_configurations()
    problems = []
    for seed in range(1, 21):
        net = infeasible_cut(seed)
        assert lp_optimum(net) is None
        for cfg in configs:
            report, flow = cfg.run(net, timeout=30)
            if report.status is not Status.INFEASIBLE or flow is not None:
                problems.append((seed, cfg.name, report.status))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 30
    acceptance(7, "infeasibility detection", ok,
               f"20 instances x {len(configs)} configs, {len(problems)} wrong, {elapsed:.1f}s")
    assert not problems, problems[:5]
    assert elapsed < 30


def _with_lower_bounds(net, seed):
    """DIMACS text for ``net`` with random lower bounds, plus those bounds."""
    rng = random.Random(seed)
    lows = [rng.randint(0, int(u)) if rng.random() < 0.3 else 0 for u in net.capacity]
    lines = [f"p min {net.n} {net.m}"]
    lines += [f"n {v + 1} {b}" for v, b in enumerate(net.supply.tolist()) if b]
    for (i, j), lo, u, c in zip(net.arcs(), lows, net.capacity.tolist(), net.cost.tolist()):
        lines.append(f"a {i + 1} {j + 1} {lo} {u} {c}")
    return "\n".join(lines) + "\n", lows


def test_criterion_8_dimacs_round_trip(acceptance):
    start = time.perf_counter()
    problems = []
    families = ("random-sparse", "random-dense", "grid-torus")
    for seed in range(1, 101):
        spec = GenSpec(family=families[seed % 3], n=8 + seed % 40, deg=3, seed=seed)
        net = generate(spec)
        if dimacs.parse_dimacs(dimacs.write_dimacs(net)) != net:
            problems.append((seed, "round trip"))
        text, lows = _with_lower_bounds(net, seed)
        shifted = dimacs.parse_dimacs(text)
        if dimacs.parse_dimacs(dimacs.write_dimacs(shifted)) != shifted:
            problems.append((seed, "round trip with offset"))
        if seed % 10 == 0:
            report, _ = solve(shifted, "ns")
            original = lp_optimum(net, lower=lows)
            got = report.objective if report.optimal else None
            if got != original:
                problems.append((seed, "offset objective", got, original))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 10
    acceptance(8, "DIMACS round trip", ok,
               f"100 instances, {len(problems)} problems, {elapsed:.1f}s")
    assert not problems, problems[:5]
    assert elapsed < 10


def _timed(net, alg, timeout=None):
    report, _ = solve(net, alg, timeout=timeout)
    return report


def test_criterion_9_performance_smoke(acceptance):
    warm = generate(GenSpec(family="random-sparse", n=64, seed=9))
    for alg in ("cos", "ns", "scc"):
        _timed(warm, alg)

    net = generate(GenSpec(family="random-sparse", n=2 ** 12, deg=8, seed=1))
    cos = _timed(net, "cos")
    ns = _timed(net, "ns")
    fastest_needed = 10 * max(cos.wall_time_ms, ns.wall_time_ms) / 1000
    scc = _timed(net, "scc", timeout=fastest_needed)
    small_ok = cos.optimal and ns.optimal and (
        scc.status is Status.TIMEOUT or
        (scc.optimal and scc.objective == cos.objective
         and scc.wall_time_ms >= 10 * max(cos.wall_time_ms, ns.wall_time_ms)))
    scc_text = "timed out" if scc.status is Status.TIMEOUT else f"{scc.wall_time_ms / 1000:.1f}s"

    big = generate(GenSpec(family="random-sparse", n=2 ** 16, deg=8, seed=1))
    cos_big = _timed(big, "cos", timeout=120)
    ns_big = _timed(big, "ns", timeout=120)
    big_ok = (cos_big.optimal and ns_big.optimal and cos_big.objective == ns_big.objective
              and cos_big.wall_time_ms < 120_000 and ns_big.wall_time_ms < 120_000)

    acceptance(9, "performance smoke", small_ok and big_ok,
               f"n=2^12: cos {cos.wall_time_ms / 1000:.2f}s, ns {ns.wall_time_ms / 1000:.2f}s, "
               f"scc {scc_text} (bar {fastest_needed:.1f}s); "
               f"n=2^16: cos {cos_big.wall_time_ms / 1000:.1f}s, ns {ns_big.wall_time_ms / 1000:.1f}s")
    assert small_ok
    assert big_ok


def test_criterion_10_variant_traces(acceptance):
    start = time.perf_counter()
    # look-ahead belongs to push-relabel only, so it is off for the comparison
    heuristics = Heuristics(push_look_ahead=False)
    problems = []

    def trace(report):
        return (report.status, report.objective, report.counters["pushes"],
                report.counters["relabels"], report.counters["phase_pushes"],
                report.counters["phase_relabels"])

    for seed in range(1, 21):
        net = feasible_network(seed, n_range=(4, 24), cost=(-20, 40))
        pr, _ = solve_cos(net, "pr", heuristics=heuristics)
        par1, _ = solve_cos(net, "par", k=1, heuristics=heuristics)
        ar, _ = solve_cos(net, "ar", heuristics=heuristics)
        parn, _ = solve_cos(net, "par", k=net.n, heuristics=heuristics)
        if trace(pr) != trace(par1):
            problems.append((seed, "k=1", trace(pr)[:4], trace(par1)[:4]))
        if trace(ar) != trace(parn):
            problems.append((seed, "k=n", trace(ar)[:4], trace(parn)[:4]))
        if not pr.optimal:
            problems.append((seed, pr.status))
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 60
    acceptance(10, "partial augment-relabel special cases", ok,
               f"20 instances, {len(problems)} mismatches, {elapsed:.1f}s")
    assert not problems, problems[:5]
    assert elapsed < 60
