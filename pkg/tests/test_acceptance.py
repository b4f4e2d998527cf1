"""End-to-end acceptance suite.

One test per headline claim; each prints a single PASS/FAIL line (visible
with `pytest -s` or on failure) in addition to the usual pytest verdict.
"""

import random
import statistics
import time
from itertools import permutations

import pytest

from abagrad.core import parse_abaf
from abagrad.engine import (
    EvolutionConfig,
    convergence_guarantee,
    longest_primal_path,
    primal_acyclic,
    run,
    sigma_star,
    step_baf,
    step_bsaf,
)
from abagrad.harness import GridSpec, default_corpus, run_corpus
from abagrad.instantiation import Baf, Bsaf, DerivedPair, build_baf, build_bsaf
from abagrad.kernels import SetAggKind, df_quad, quadratic_energy
from abagrad.order_theory import dominates, nonmax, pos, superior
from abagrad.properties import (
    MAX_COUNTEREXAMPLES,
    SUM_COUNTEREXAMPLES,
    check_semantics_properties,
    zeta_property_holds,
)

from test_core import EXAMPLE1
from test_engine import random_bsaf


def verdict(name: str, ok: bool, detail: str = "") -> None:
    print(f"{'PASS' if ok else 'FAIL'}: {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


def test_worked_example_exactness():
    d = parse_abaf(EXAMPLE1)
    cases = [
        ({"a": 1.0, "b": 0.1, "c": 0.2}, SetAggKind.PROD, 0.98),
        ({"a": 1.0, "b": 0.1, "c": 0.2}, SetAggKind.MIN, 0.9),
        ({"a": 1.0, "b": 1.0, "c": 1.0}, SetAggKind.PROD, 0.0),
    ]
    ok = True
    details = []
    for tau, zeta, expected in cases:
        f = build_bsaf(d).with_tau(tau)
        cfg = EvolutionConfig(kernel=df_quad(zeta))
        elapsed = float("inf")
        for _ in range(5):
            t0 = time.perf_counter()
            sigma = run(f, cfg).final["a"]
            elapsed = min(elapsed, time.perf_counter() - t0)
        ok = ok and abs(sigma - expected) <= 1e-9 and elapsed < 1e-3
        details.append(f"sigma(a)={sigma:.6g} in {elapsed * 1e6:.0f}us")
    verdict("worked-example exactness (tol 1e-9, <1ms)", ok, "; ".join(details))


def test_set_aggregation_property_suite():
    rng = random.Random(100)
    props = ("OR", "F", "N", "ID", "WL", "V")
    ok = True
    for _ in range(10_000):
        s = [rng.random() for _ in range(rng.randint(0, 8))]
        if rng.random() < 0.2 and s:
            s[rng.randrange(len(s))] = rng.choice([0.0, 1.0])
        extra = [rng.random() for _ in range(rng.randint(0, 3))]
        for kind in (SetAggKind.PROD, SetAggKind.MIN):
            ok = ok and all(zeta_property_holds(kind, p, s, sub=extra) for p in props)
        for kind in (SetAggKind.SUM, SetAggKind.MAX):
            ok = ok and zeta_property_holds(kind, "ID", s, sub=extra)
    for kind, examples in ((SetAggKind.SUM, SUM_COUNTEREXAMPLES),
                           (SetAggKind.MAX, MAX_COUNTEREXAMPLES)):
        for prop, (s, sub) in examples.items():
            ok = ok and not zeta_property_holds(
                kind, prop, list(s), sub=list(sub) if sub else None)
    verdict("set-aggregation property suite (10^4 multisets)", ok)


def _brute_superior(a, s):
    na, ns = nonmax(a), nonmax(s)
    if len(na) > len(ns):
        return False
    top = sorted(ns, reverse=True)[: len(na)]
    return any(all(x >= y for x, y in zip(na, perm)) for perm in permutations(top))


def _brute_dominates(att, sup):
    targets = pos(sup)
    sources = pos(att)
    if not targets:
        return True
    if len(sources) < len(targets):
        return False
    return any(
        all(superior(choice[i], targets[i]) for i in range(len(targets)))
        for choice in permutations(sources, len(targets))
    )


def test_dominance_oracle_equivalence():
    grid = [i * 0.05 for i in range(21)]
    rng = random.Random(200)
    ok = True
    for _ in range(4000):
        att = [[rng.choice(grid) for _ in range(rng.randint(0, 3))]
               for _ in range(rng.randint(0, 4))]
        sup = [[rng.choice(grid) for _ in range(rng.randint(0, 3))]
               for _ in range(rng.randint(0, 4))]
        ok = ok and dominates(att, sup) == _brute_dominates(att, sup)
    a = [0.2, 0.2, 0.45, 0.95, 1]
    s = [0.001, 0.01, 0.2, 0.4, 0.9, 1, 1, 1, 1]
    ok = ok and superior(a, s) and _brute_superior(a, s) and not superior(s, a)
    verdict("dominance matching equals brute-force oracle (0.05 grid)", ok)


def test_semantics_property_suite():
    results = check_semantics_properties(500, seed=7)
    failing = [k for k, v in results.items()
               if not v["passed"] or v.get("fired") == 0]
    detail = "; ".join(f"{k}: {v['detail']}" for k, v in results.items())
    verdict("semantics property suite (500 converged instances)",
            not failing, detail)


def test_acyclic_convergence_bound():
    rng = random.Random(300)
    kernels = [df_quad(SetAggKind.PROD), df_quad(SetAggKind.MIN),
               quadratic_energy(SetAggKind.PROD), quadratic_energy(SetAggKind.MIN)]
    ok = True
    for _ in range(1000):
        f = random_bsaf(rng, acyclic=True)
        assert primal_acyclic(f)
        bound = longest_primal_path(f) + 1
        for kernel in kernels:
            cfg = EvolutionConfig(kernel=kernel, epsilon=1e-18,
                                  max_iters=bound + 10)
            rep = run(f, cfg)
            ok = ok and rep.converged and rep.steps <= bound
    verdict("acyclic instances reach the exact fixpoint within "
            "longest-primal-path+1 (1000 instances x 4 kernels)", ok)


def test_convergence_guarantee_soundness():
    rng = random.Random(400)
    checked = 0
    ok = True
    while checked < 1000:
        f = random_bsaf(rng)
        zeta = rng.choice([SetAggKind.PROD, SetAggKind.MIN])
        maker = rng.choice([df_quad, quadratic_energy])
        probe = convergence_guarantee(f, maker(zeta, k=1.0))
        k = float(probe.h * probe.d + 1 if zeta is SetAggKind.PROD
                  else probe.d + 1)
        kernel = maker(zeta, k=k)
        if not convergence_guarantee(f, kernel).guaranteed:
            continue
        ok = ok and run(f, EvolutionConfig(kernel=kernel)).converged
        checked += 1
    verdict("guarantee-flagged instances all converge (1000 instances)", ok)


def test_reduction_and_correspondence():
    rng = random.Random(500)
    ok = True
    # Singleton-edge hypergraphs follow the argument-graph engine stepwise.
    for _ in range(100):
        f = random_bsaf(rng, max_members=1)
        nodes = sorted(f.nodes)
        args = {n: DerivedPair(frozenset({n}), n, False) for n in nodes}
        baf = Baf(
            frozenset(args.values()),
            frozenset((args[next(iter(e))], args[t]) for e, t in f.attacks),
            frozenset((args[next(iter(e))], args[t]) for e, t in f.supports),
            {args[n]: f.tau[n] for n in nodes},
        )
        for kernel in [df_quad(SetAggKind.PROD), df_quad(SetAggKind.MIN),
                       quadratic_energy(SetAggKind.PROD)]:
            cur_b = {n: f.tau[n] for n in nodes}
            cur_q = {args[n]: f.tau[n] for n in nodes}
            for _ in range(10):
                cur_b = step_bsaf(f, kernel, cur_b)
                cur_q = step_baf(baf, kernel.alpha, kernel.iota, cur_q)
                ok = ok and all(cur_b[n] == cur_q[args[n]] for n in nodes)
    # Rule-free frameworks: both pipelines agree on assumption strengths.
    for _ in range(30):
        n = rng.randint(2, 6)
        asms = [f"a{i}" for i in range(n)]
        lines = [f"a {a}" for a in asms]
        for a in asms:
            lines.append(f"c {a} {rng.choice([x for x in asms if x != a] + ['ext'])}")
            lines.append(f"w {a} {round(rng.random(), 3)}")
        d = parse_abaf("\n".join(lines))
        cfg = EvolutionConfig(kernel=df_quad(SetAggKind.PROD))
        bsaf_rep = run(build_bsaf(d), cfg)
        star = sigma_star(d, run(build_baf(d), cfg), "asm")
        ok = ok and all(abs(bsaf_rep.final[a] - star[a]) <= 1e-9 for a in asms)
    # Flat frameworks: every extraction mode returns the same strengths.
    for seed in range(30):
        from abagrad.generator import GenParams, gen_abaf
        d = gen_abaf(GenParams(5, 3, 8, 2, True, seed))
        rep = run(build_baf(d), EvolutionConfig(kernel=df_quad()))
        base = sigma_star(d, rep, "asm")
        ok = ok and all(
            sigma_star(d, rep, mode) == base for mode in ("min", "max", "avg"))
    verdict("argument-graph reduction, rule-free correspondence, "
            "flat extraction coincidence", ok)


def test_desk_scale_experiment():
    t0 = time.monotonic()
    corpus = default_corpus(100, seed=0)
    cfg = EvolutionConfig(kernel=df_quad(), wall_budget=1.2, max_iters=100)
    rows = run_corpus(corpus, GridSpec(), cfg, max_pairs=150_000,
                      saturation_budget=5.0, max_edges=50_000)
    elapsed = time.monotonic() - t0

    bs = [r for r in rows if r["approach"] == "bsaf"]
    bf = [r for r in rows if r["approach"] == "baf"]
    rate = lambda rs: sum(r["converged"] for r in rs) / len(rs)
    steps = lambda rs: statistics.fmean(r["steps"] for r in rs if r["converged"])
    diff = rate(bs) - rate(bf)

    dfq_cells: dict[tuple, list[int]] = {}
    for r in bs:
        if r["semantics"] == "dfq":
            key = (r["set_agg"], r["tau_init"])
            dfq_cells.setdefault(key, []).append(r["converged"])
    min_dfq = min(sum(v) / len(v) for v in dfq_cells.values())

    ok = (diff >= 0.10 and min_dfq >= 0.85 and steps(bs) < steps(bf)
          and elapsed <= 600)
    verdict(
        "desk-scale corpus: rate gap >=10pp, every "
        "assumption-level DFQ cell >=0.85, fewer mean steps, <=10min",
        ok,
        f"gap={diff * 100:.1f}pp min_dfq_cell={min_dfq:.3f} "
        f"steps={steps(bs):.2f} vs {steps(bf):.2f} elapsed={elapsed:.0f}s",
    )
