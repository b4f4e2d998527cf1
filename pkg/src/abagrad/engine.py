"""Strength evolution: synchronous iteration on BSAFs and BAFs.

One update reads only time-t values (Jacobi style), so a run is
deterministic for fixed inputs regardless of node ordering.  Convergence
is detected with an epsilon window over the last delta updates, with a
shortcut when two consecutive vectors are bit-identical.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .core import Abaf
from .instantiation import Baf, Bsaf, DerivedPair
from .kernels import (
    Agg,
    Influence,
    InfluenceKind,
    Kernel,
    SetAggKind,
    alpha_eval,
    iota_eval,
    zeta_eval,
)

Node = Hashable


@dataclass(frozen=True)
class EvolutionConfig:
    kernel: Kernel
    epsilon: float = 1e-3
    delta: int = 5
    max_iters: int = 5000
    wall_budget: float = 600.0
    record_trajectories: bool = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.delta < 1:
            raise ValueError("delta must be at least 1")
        if self.max_iters < self.delta:
            raise ValueError("max_iters must be at least delta")


@dataclass
class RunReport:
    final: dict
    converged: bool
    steps: int
    wall_time: float
    timed_out: bool = False
    trajectories: dict | None = None


@dataclass(frozen=True)
class ConvergenceBound:
    lambda_product: float
    guaranteed: bool
    d: int
    h: int
    k: float


def step_bsaf(f: Bsaf, kernel: Kernel, current: Mapping[str, float]) -> dict[str, float]:
    """One synchronous update of every assumption strength."""
    new = {}
    for a in f.nodes:
        atts = [zeta_eval(kernel.zeta, (current[m] for m in e)) for e, t in f.attacks if t == a]
        sups = [zeta_eval(kernel.zeta, (current[m] for m in e)) for e, t in f.supports if t == a]
        w = alpha_eval(kernel.alpha, atts, sups)
        new[a] = iota_eval(kernel.iota, f.tau[a], w)
    return new


def step_baf(
    f: Baf, alpha: Agg, iota: Influence, current: Mapping[DerivedPair, float]
) -> dict[DerivedPair, float]:
    """One synchronous update of every argument strength (no set aggregation)."""
    new = {}
    for y in f.arguments:
        atts = [current[x] for x, t in f.attacks if t == y]
        sups = [current[x] for x, t in f.supports if t == y]
        w = alpha_eval(alpha, atts, sups)
        new[y] = iota_eval(iota, f.beta[y], w)
    return new


class _Stepper:
    """Precomputed adjacency for fast repeated updates."""

    def __init__(self, framework: Bsaf | Baf, kernel: Kernel):
        self.kernel = kernel
        self.is_bsaf = isinstance(framework, Bsaf)
        if self.is_bsaf:
            self.nodes: list = sorted(framework.nodes)
            base_map = framework.tau
            edges_att = framework.attacks
            edges_sup = framework.supports
        else:
            self.nodes = sorted(framework.arguments, key=DerivedPair.sort_key)
            base_map = framework.beta
            edges_att = {((x,), y) for x, y in framework.attacks}
            edges_sup = {((x,), y) for x, y in framework.supports}
        index = {n: i for i, n in enumerate(self.nodes)}
        self.base = [float(base_map[n]) for n in self.nodes]
        self.att: list[list[tuple[int, ...]]] = [[] for _ in self.nodes]
        self.sup: list[list[tuple[int, ...]]] = [[] for _ in self.nodes]
        for e, t in edges_att:
            self.att[index[t]].append(tuple(sorted(index[m] for m in e)))
        for e, t in edges_sup:
            self.sup[index[t]].append(tuple(sorted(index[m] for m in e)))
        for adj in (self.att, self.sup):
            for lst in adj:
                lst.sort()

    def step(self, current: list[float]) -> list[float]:
        kernel = self.kernel
        out = []
        for i, b in enumerate(self.base):
            if self.is_bsaf:
                atts = [zeta_eval(kernel.zeta, (current[m] for m in e)) for e in self.att[i]]
                sups = [zeta_eval(kernel.zeta, (current[m] for m in e)) for e in self.sup[i]]
            else:
                atts = [current[e[0]] for e in self.att[i]]
                sups = [current[e[0]] for e in self.sup[i]]
            w = alpha_eval(kernel.alpha, atts, sups)
            out.append(iota_eval(kernel.iota, b, w))
        return out


def run(framework: Bsaf | Baf, cfg: EvolutionConfig) -> RunReport:
    """Iterate the strength evolution process from the base scores.

    Converged at the first step where every node moved at most epsilon
    over the last delta updates (or two consecutive vectors are
    bit-identical); stops at max_iters or the wall budget otherwise.
    """
    start = time.monotonic()
    deadline = start + cfg.wall_budget
    stepper = _Stepper(framework, cfg.kernel)
    values = list(stepper.base)
    window: list[list[float]] = [values]
    trajectories = [list(values)] if cfg.record_trajectories else None

    converged = False
    timed_out = False
    steps = cfg.max_iters
    for t in range(1, cfg.max_iters + 1):
        values = stepper.step(window[-1])
        window.append(values)
        if len(window) > cfg.delta + 1:
            window.pop(0)
        if trajectories is not None:
            trajectories.append(list(values))
        if values == window[-2]:
            converged, steps = True, t
            break
        if t >= cfg.delta and all(
            abs(values[i] - past[i]) <= cfg.epsilon
            for past in window[:-1]
            for i in range(len(values))
        ):
            converged, steps = True, t
            break
        if time.monotonic() > deadline:
            steps = t
            timed_out = True
            break

    final = dict(zip(stepper.nodes, values))
    report = RunReport(
        final=final,
        converged=converged,
        steps=steps,
        wall_time=time.monotonic() - start,
        timed_out=timed_out,
    )
    if trajectories is not None:
        report.trajectories = {
            n: [row[i] for row in trajectories] for i, n in enumerate(stepper.nodes)
        }
    return report


# Documented Lipschitz constants of the influence functions (w-argument),
# scaled by 1/k: linear slope 1, standard QE sup|h'| = 3*sqrt(3)/8,
# printed QE sup|h'| = 8/27.
_IOTA_LAMBDA = {
    InfluenceKind.LINEAR: 1.0,
    InfluenceKind.QE_STANDARD: 3.0 * math.sqrt(3.0) / 8.0,
    InfluenceKind.QE_PRINTED: 8.0 / 27.0,
}


def convergence_guarantee(f: Bsaf, kernel: Kernel) -> ConvergenceBound:
    """Sufficient convergence conditions from the kernel's contraction.

    d is the maximum number of incoming hyperedges of a node, h the
    maximum hyperedge size.  Sum/Prod set aggregation contracts when
    h*d < k, Min/Max when d < k; a Lipschitz product below 1 also
    guarantees convergence.
    """
    incoming: dict[str, int] = {a: 0 for a in f.nodes}
    h = 0
    for e, t in list(f.attacks) + list(f.supports):
        incoming[t] += 1
        h = max(h, len(e))
    d = max(incoming.values(), default=0)

    lam_zeta = float(h) if kernel.zeta.kind in (SetAggKind.SUM, SetAggKind.PROD) else 1.0
    lam_alpha = float(d)
    lam_iota = _IOTA_LAMBDA[kernel.iota.kind] / kernel.iota.k
    lam = lam_zeta * lam_alpha * lam_iota

    if kernel.zeta.kind in (SetAggKind.SUM, SetAggKind.PROD):
        structural = h * d < kernel.iota.k
    else:
        structural = d < kernel.iota.k
    return ConvergenceBound(
        lambda_product=lam,
        guaranteed=structural or lam < 1.0,
        d=d,
        h=h,
        k=kernel.iota.k,
    )


def _primal_edges(f: Bsaf) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {a: set() for a in f.nodes}
    for e, t in list(f.attacks) + list(f.supports):
        for m in e:
            adj[m].add(t)
    return adj


def primal_acyclic(f: Bsaf) -> bool:
    """No directed cycle in the primal graph (hyperedge members -> target)."""
    adj = _primal_edges(f)
    state: dict[str, int] = {}  # 0 in progress, 1 done

    for root in f.nodes:
        if root in state:
            continue
        stack = [(root, iter(adj[root]))]
        state[root] = 0
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in state:
                    state[nxt] = 0
                    stack.append((nxt, iter(adj[nxt])))
                    advanced = True
                    break
                if state[nxt] == 0:
                    return False
            if not advanced:
                state[node] = 1
                stack.pop()
    return True


def longest_primal_path(f: Bsaf) -> int:
    """Longest path (edge count) in the primal graph; requires acyclicity."""
    adj = _primal_edges(f)
    depth: dict[str, int] = {}

    def visit(node: str) -> int:
        if node in depth:
            return depth[node]
        depth[node] = 0  # cycle guard; caller guarantees acyclicity
        depth[node] = max((visit(n) + 1 for n in adj[node]), default=0)
        return depth[node]

    return max((visit(a) for a in f.nodes), default=0)


def sigma_star(d: Abaf, report: RunReport, mode: str = "asm") -> dict[str, float]:
    """Assumption strengths extracted from a finished BAF run.

    Modes: asm (the assumption argument's strength), min / max / avg over
    all arguments whose claim is the assumption.
    """
    if mode not in ("asm", "min", "max", "avg"):
        raise ValueError(f"unknown extraction mode {mode!r}")
    out = {}
    for a in d.assumptions:
        if mode == "asm":
            out[a] = report.final[DerivedPair(frozenset({a}), a, False)]
            continue
        values = [v for x, v in report.final.items() if x.claim == a]
        if mode == "min":
            out[a] = min(values)
        elif mode == "max":
            out[a] = max(values)
        else:
            out[a] = math.fsum(sorted(values)) / len(values)
    return out
