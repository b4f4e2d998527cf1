"""Experiment harness: single evaluations, corpus sweeps and property batches."""

from __future__ import annotations

import csv
import io
import json
import random
import statistics
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .core import Abaf, check_flat
from .engine import EvolutionConfig, RunReport, run, sigma_star
from .generator import GenParams, gen_abaf
from .instantiation import (
    DEFAULT_MAX_EDGES,
    InstantiationBudgetExceeded,
    baf_from_structure,
    baf_structure,
    beta_min,
    beta_prod,
    build_baf,
    build_bsaf,
    saturate,
)
from .kernels import (
    Agg,
    AggKind,
    Influence,
    InfluenceKind,
    Kernel,
    SetAgg,
    SetAggKind,
    df_quad,
    quadratic_energy,
)

CSV_HEADER = [
    "instance",
    "approach",
    "semantics",
    "set_agg",
    "base_agg",
    "sigma_star",
    "tau_init",
    "seed",
    "n_assumptions",
    "n_rules",
    "avg_body",
    "flat",
    "converged",
    "steps",
    "wall_ms",
    "phase_timeout",
]

_SET_AGGS = {"min": SetAggKind.MIN, "prod": SetAggKind.PROD,
             "sum": SetAggKind.SUM, "max": SetAggKind.MAX}
_BASE_AGGS = {"min": beta_min, "prod": beta_prod}


class UsageError(ValueError):
    """Bad experiment configuration."""


def make_kernel(semantics: str, set_agg: str = "prod", k: float = 1.0,
                qe_variant: str = "standard") -> Kernel:
    if set_agg not in _SET_AGGS:
        raise UsageError(f"unknown set aggregation {set_agg!r}")
    zeta = _SET_AGGS[set_agg]
    if semantics == "dfq":
        return df_quad(zeta, k)
    if semantics == "qe":
        return quadratic_energy(zeta, k, printed=(qe_variant == "printed"))
    raise UsageError(f"unknown semantics {semantics!r}")


@dataclass(frozen=True)
class GridCell:
    approach: str                 # bsaf | baf
    semantics: str                # dfq | qe
    set_agg: str = "prod"         # bsaf only
    base_agg: str = "prod"        # baf only
    sigma_mode: str = "asm"       # baf only
    tau_init: str = "const"       # const | uniform


@dataclass(frozen=True)
class GridSpec:
    approaches: Sequence[str] = ("bsaf", "baf")
    semantics: Sequence[str] = ("dfq", "qe")
    set_aggs: Sequence[str] = ("min", "prod")
    base_score_aggs: Sequence[str] = ("min", "prod")
    sigma_star: Sequence[str] = ("asm",)
    tau_init: Sequence[str] = ("const", "uniform")

    def cells(self) -> list[GridCell]:
        axes = [self.approaches, self.semantics, self.set_aggs,
                self.base_score_aggs, self.sigma_star, self.tau_init]
        if any(not axis for axis in axes):
            raise UsageError("empty grid axis")
        out = []
        for approach in self.approaches:
            for sem in self.semantics:
                for init in self.tau_init:
                    if approach == "bsaf":
                        out.extend(
                            GridCell(approach, sem, set_agg=z, tau_init=init)
                            for z in self.set_aggs
                        )
                    else:
                        out.extend(
                            GridCell(approach, sem, base_agg=b, sigma_mode=m, tau_init=init)
                            for b in self.base_score_aggs
                            for m in self.sigma_star
                        )
        return out


def init_tau(d: Abaf, tau_init: str, seed: int) -> dict[str, float]:
    """Base scores for one instance; the uniform draw depends only on the
    instance seed so bsaf and baf cells see the same values."""
    if tau_init == "const":
        return {a: 0.5 for a in sorted(d.assumptions)}
    if tau_init == "uniform":
        rng = random.Random(seed)
        return {a: rng.uniform(0.0, 1.0) for a in sorted(d.assumptions)}
    raise UsageError(f"unknown tau initialisation {tau_init!r}")


@dataclass
class EvalResult:
    report: RunReport | None
    strengths: dict[str, float] | None
    phase_timeout: str = ""       # "", "abstraction", "semantics"


def eval_instance(d: Abaf, cell: GridCell, cfg: EvolutionConfig,
                  tau: dict[str, float] | None = None,
                  kernel: Kernel | None = None,
                  pairs=None,
                  max_edges: int = DEFAULT_MAX_EDGES) -> EvalResult:
    """Evaluate one ABAF in one grid cell.

    bsaf: build the assumption hypergraph and iterate.
    baf: build the argument graph, iterate, then extract sigma*.
    `pairs` lets callers reuse one saturation across cells.
    """
    if tau is not None:
        d = d.with_tau(tau)
    if kernel is None:
        kernel = make_kernel(cell.semantics, cell.set_agg)
    cfg = replace(cfg, kernel=kernel)
    if pairs is None:
        try:
            pairs = saturate(d, wall_budget=cfg.wall_budget)
        except InstantiationBudgetExceeded:
            return EvalResult(report=None, strengths=None, phase_timeout="abstraction")

    try:
        if cell.approach == "bsaf":
            framework = build_bsaf(d, pairs=pairs)
            report = run(framework, cfg)
            strengths = dict(report.final)
        elif cell.approach == "baf":
            framework = build_baf(d, _BASE_AGGS[cell.base_agg], pairs=pairs,
                                  wall_budget=cfg.wall_budget, max_edges=max_edges)
            report = run(framework, cfg)
            strengths = sigma_star(d, report, cell.sigma_mode)
        else:
            raise UsageError(f"unknown approach {cell.approach!r}")
    except InstantiationBudgetExceeded:
        return EvalResult(report=None, strengths=None, phase_timeout="abstraction")
    phase = "semantics" if report.timed_out else ""
    return EvalResult(report=report, strengths=strengths, phase_timeout=phase)


def _structural_features(d: Abaf) -> dict:
    bodies = [len(r.body) for r in d.rules]
    return {
        "n_assumptions": len(d.assumptions),
        "n_rules": len(d.rules),
        "avg_body": round(statistics.fmean(bodies), 4) if bodies else 0.0,
        "flat": int(check_flat(d).flat),
    }


def run_corpus(
    instances: Iterable[tuple[str, Abaf, int]],
    grid: GridSpec,
    cfg: EvolutionConfig,
    max_pairs: int = 1_000_000,
    saturation_budget: float | None = None,
    max_edges: int = DEFAULT_MAX_EDGES,
) -> list[dict]:
    """One row per (instance x cell); failures are recorded, not raised.

    `instances` yields (name, abaf, seed) triples; the seed drives the
    uniform base-score initialisation.  Saturation runs once per instance
    and is shared across cells; blowing `max_pairs` or the saturation
    budget (default: the engine wall budget) marks every cell of that
    instance as an abstraction timeout.
    """
    if saturation_budget is None:
        saturation_budget = cfg.wall_budget
    cells = grid.cells()
    timeout = EvalResult(report=None, strengths=None, phase_timeout="abstraction")
    rows = []
    for name, d, seed in instances:
        features = _structural_features(d)
        # Abstraction is a per-instance phase: saturate once, build each
        # framework skeleton once, and share them across the grid cells.
        try:
            pairs = saturate(d, max_pairs=max_pairs, wall_budget=saturation_budget)
        except InstantiationBudgetExceeded:
            pairs = None
        bsaf_skel = build_bsaf(d, pairs=pairs) if pairs is not None else None
        baf_skel = None
        if pairs is not None:
            try:
                baf_skel = baf_structure(d, pairs, wall_budget=cfg.wall_budget,
                                         max_edges=max_edges)
            except InstantiationBudgetExceeded:
                pass
        for cell in cells:
            tau = init_tau(d, cell.tau_init, seed)
            try:
                if cell.approach == "bsaf":
                    if bsaf_skel is None:
                        result = timeout
                    else:
                        kernel = make_kernel(cell.semantics, cell.set_agg)
                        report = run(bsaf_skel.with_tau(tau),
                                     replace(cfg, kernel=kernel))
                        result = EvalResult(
                            report, dict(report.final),
                            "semantics" if report.timed_out else "")
                elif baf_skel is None:
                    result = timeout
                else:
                    framework = baf_from_structure(baf_skel, tau,
                                                   _BASE_AGGS[cell.base_agg])
                    kernel = make_kernel(cell.semantics)
                    report = run(framework, replace(cfg, kernel=kernel))
                    result = EvalResult(
                        report, sigma_star(d, report, cell.sigma_mode),
                        "semantics" if report.timed_out else "")
            except UsageError:
                raise
            except Exception as exc:  # per-row failure, keep sweeping
                result = EvalResult(report=None, strengths=None,
                                    phase_timeout=f"error:{type(exc).__name__}")
            report = result.report
            rows.append({
                "instance": name,
                "approach": cell.approach,
                "semantics": cell.semantics,
                "set_agg": cell.set_agg if cell.approach == "bsaf" else "",
                "base_agg": cell.base_agg if cell.approach == "baf" else "",
                "sigma_star": cell.sigma_mode if cell.approach == "baf" else "",
                "tau_init": cell.tau_init,
                "seed": seed,
                **features,
                "converged": int(report.converged) if report else 0,
                "steps": report.steps if report else "",
                "wall_ms": int(report.wall_time * 1000) if report else "",
                "phase_timeout": result.phase_timeout,
            })
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER)
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def cell_metrics(rows: list[dict]) -> dict[tuple, dict]:
    """Global convergence rate and mean steps per grid cell.

    Mean steps are computed over converged runs only.
    """
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        key = (row["approach"], row["semantics"], row["set_agg"],
               row["base_agg"], row["sigma_star"], row["tau_init"])
        groups.setdefault(key, []).append(row)
    out = {}
    for key, group in groups.items():
        converged = [r for r in group if r["converged"]]
        out[key] = {
            "n": len(group),
            "rate": len(converged) / len(group),
            "mean_steps": statistics.fmean(r["steps"] for r in converged)
            if converged else float("nan"),
        }
    return out


def default_corpus(n_instances: int, seed: int,
                   light_fraction: float = 0.65) -> list[tuple[str, Abaf, int]]:
    """Seeded desk-scale corpus spanning the sensitivity axes:
    number of assumptions, number of rules, rule body size.

    Two strata: a light one where both abstraction routes stay small, and
    a rule-dense one whose derivable-pair sets grow large.  Dense draws
    whose saturation itself explodes are resampled so the corpus measures
    the cost of the abstractions, not of the shared closure step.
    """
    rng = random.Random(seed)
    instances = []
    for i in range(n_instances):
        if rng.random() < light_fraction:
            n_asm = rng.choice([10, 15, 20])
            params = GenParams(
                n_assumptions=n_asm,
                n_atoms_extra=max(2, n_asm // 3),
                n_rules=rng.choice([10, 15]),
                max_body=rng.choice([2, 3]),
                flat=True,
                seed=rng.getrandbits(63),
            )
            d = gen_abaf(params)
        else:
            for _ in range(50):
                params = GenParams(
                    n_assumptions=rng.choice([10, 12, 15]),
                    n_atoms_extra=5,
                    n_rules=rng.choice([20, 30]),
                    max_body=rng.choice([2, 3]),
                    flat=True,
                    seed=rng.getrandbits(63),
                )
                d = gen_abaf(params)
                try:
                    saturate(d, max_pairs=150_000, max_work=2_000_000)
                    break
                except InstantiationBudgetExceeded:
                    continue
        instances.append((f"gen-{i:04d}", d, rng.getrandbits(63)))
    return instances


def report_to_json(name: str, cell: GridCell, result: EvalResult) -> str:
    """JSON report for one evaluation (engine schema plus phase tag)."""
    report = result.report
    payload = {
        "instance": name,
        "approach": cell.approach,
        "kernel": {
            "semantics": cell.semantics,
            "set_agg": cell.set_agg if cell.approach == "bsaf" else None,
            "base_agg": cell.base_agg if cell.approach == "baf" else None,
        },
        "converged": bool(report.converged) if report else False,
        "steps": report.steps if report else None,
        "wall_ms": int(report.wall_time * 1000) if report else None,
        "strengths": result.strengths,
        "phase_timeout": result.phase_timeout or None,
    }
    if report is not None and report.trajectories is not None:
        if cell.approach == "baf":
            payload["trajectories"] = {
                f"{x.claim}|{','.join(sorted(x.support))}": traj
                for x, traj in report.trajectories.items()
            }
        else:
            payload["trajectories"] = report.trajectories
    return json.dumps(payload, indent=2, sort_keys=True)
