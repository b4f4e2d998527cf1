"""Rule saturation and the two abstractions of an ABA framework.

Saturation computes every derivable (support set, claim) pair.  Trees are
never materialised: the semantics only consume pairs, and the pair
lattice is finite even when the rule graph is cyclic.  The pairs feed the
assumption-level hypergraph (:class:`Bsaf`) and the argument-level graph
(:class:`Baf`).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Mapping

from .core import Abaf

DEFAULT_MAX_PAIRS = 1_000_000
DEFAULT_MAX_EDGES = 5_000_000
DEFAULT_WALL_BUDGET = 600.0


class InstantiationBudgetExceeded(RuntimeError):
    """Pair count or wall-time cap hit during saturation."""

    def __init__(self, reason: str):
        super().__init__(f"instantiation budget exceeded: {reason}")
        self.reason = reason


@dataclass(frozen=True)
class DerivedPair:
    """A derivable pair E |- p; rule_based iff some derivation uses a rule."""

    support: frozenset[str]
    claim: str
    rule_based: bool

    def __post_init__(self):
        object.__setattr__(self, "support", frozenset(self.support))
        if not self.rule_based and self.support != frozenset({self.claim}):
            raise ValueError("assumption arguments must be {a} |- a")

    def sort_key(self):
        return (self.claim, tuple(sorted(self.support)), self.rule_based)


@dataclass(frozen=True)
class Bsaf:
    """Assumption-level hypergraph: set-attacks and set-supports."""

    nodes: frozenset[str]
    attacks: frozenset[tuple[frozenset[str], str]]
    supports: frozenset[tuple[frozenset[str], str]]
    tau: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "tau", dict(self.tau))

    def with_tau(self, tau: Mapping[str, float]) -> "Bsaf":
        return Bsaf(self.nodes, self.attacks, self.supports, tau)


@dataclass(frozen=True)
class Baf:
    """Argument-level graph: binary attacks/supports with base scores."""

    arguments: frozenset[DerivedPair]
    attacks: frozenset[tuple[DerivedPair, DerivedPair]]
    supports: frozenset[tuple[DerivedPair, DerivedPair]]
    beta: Mapping[DerivedPair, float]

    def __post_init__(self):
        object.__setattr__(self, "beta", dict(self.beta))


def beta_prod(strengths: Iterable[float]) -> float:
    """Product base score; 1 on empty input (facts are indefeasible)."""
    return math.prod(sorted(strengths))


def beta_min(strengths: Iterable[float]) -> float:
    """Weakest-link base score; 1 on empty input."""
    return min(strengths, default=1.0)


def saturate(
    d: Abaf,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    wall_budget: float = DEFAULT_WALL_BUDGET,
    max_work: int | None = None,
) -> frozenset[DerivedPair]:
    """Least fixed point of derivable pairs.

    Starts from {a} |- a for each assumption; every rule combines known
    supports of its body members into a support of its head (union of the
    chosen supports, facts deriving from the empty set).  Pairs are
    deduplicated; raises :class:`InstantiationBudgetExceeded` when the
    configured pair or wall-time cap is hit.  `max_work` caps the number
    of support combinations examined — a machine-independent cost bound.
    """
    deadline = time.monotonic() + wall_budget
    work = 0
    # All known support sets per sentence, and the rule-derived subset.
    derived: dict[str, set[frozenset[str]]] = {}
    rule_supports: dict[str, set[frozenset[str]]] = {}
    rules_by_body: dict[str, list] = {}
    for r in d.rules:
        for q in r.body:
            rules_by_body.setdefault(q, []).append(r)

    n_pairs = 0
    queue: list[tuple[str, frozenset[str]]] = []

    def add(sentence: str, support: frozenset[str], from_rule: bool) -> None:
        nonlocal n_pairs
        if from_rule:
            bucket = rule_supports.setdefault(sentence, set())
            if support in bucket:
                return
            bucket.add(support)
            n_pairs += 1
            if n_pairs > max_pairs:
                raise InstantiationBudgetExceeded(f"more than {max_pairs} pairs")
        if support not in derived.setdefault(sentence, set()):
            derived[sentence].add(support)
            queue.append((sentence, support))

    for a in d.assumptions:
        n_pairs += 1
        add(a, frozenset({a}), from_rule=False)
    for r in d.rules:
        if not r.body:
            add(r.head, frozenset(), from_rule=True)

    while queue:
        if time.monotonic() > deadline:
            raise InstantiationBudgetExceeded("wall-time cap")
        sentence, support = queue.pop()
        for r in rules_by_body.get(sentence, ()):
            others = [q for q in r.body if q != sentence]
            pools = [derived.get(q, set()) for q in others]
            if any(not pool for pool in pools):
                continue
            work += math.prod(len(pool) for pool in pools)
            if max_work is not None and work > max_work:
                raise InstantiationBudgetExceeded(f"more than {max_work} combinations")
            for i, combo in enumerate(product(*pools)):
                if i % 4096 == 4095 and time.monotonic() > deadline:
                    raise InstantiationBudgetExceeded("wall-time cap")
                add(r.head, support.union(*combo), from_rule=True)

    pairs = {DerivedPair(frozenset({a}), a, False) for a in d.assumptions}
    for sentence, supports in rule_supports.items():
        pairs.update(DerivedPair(e, sentence, True) for e in supports)
    return frozenset(pairs)


def _minimal_only(edges: set[tuple[frozenset[str], str]]) -> set[tuple[frozenset[str], str]]:
    """Drop (E, t) when some (E', t) with E' a proper subset of E exists."""
    by_target: dict[str, list[frozenset[str]]] = {}
    for e, t in edges:
        by_target.setdefault(t, []).append(e)
    kept = set()
    for t, supports in by_target.items():
        for e in supports:
            if not any(other < e for other in supports):
                kept.add((e, t))
    return kept


def build_bsaf(
    d: Abaf,
    pairs: Iterable[DerivedPair] | None = None,
    minimal_only: bool = False,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    wall_budget: float = DEFAULT_WALL_BUDGET,
) -> Bsaf:
    """Assumption-level abstraction.

    (E, a) is an attack iff E derives the contrary of a, and a support iff
    E derives a through at least one rule.  All derivable sets are kept by
    default; `minimal_only` filters sets that strictly contain another
    attacking (supporting) set of the same target.
    """
    if pairs is None:
        pairs = saturate(d, max_pairs=max_pairs, wall_budget=wall_budget)
    by_claim: dict[str, set[frozenset[str]]] = {}
    rule_by_claim: dict[str, set[frozenset[str]]] = {}
    for p in pairs:
        by_claim.setdefault(p.claim, set()).add(p.support)
        if p.rule_based:
            rule_by_claim.setdefault(p.claim, set()).add(p.support)

    attacks = {
        (e, a)
        for a in d.assumptions
        for e in by_claim.get(d.contrary[a], ())
    }
    supports = {
        (e, a)
        for a in d.assumptions
        for e in rule_by_claim.get(a, ())
    }
    if minimal_only:
        attacks = _minimal_only(attacks)
        supports = _minimal_only(supports)
    return Bsaf(frozenset(d.assumptions), frozenset(attacks), frozenset(supports), dict(d.tau))


def baf_structure(
    d: Abaf,
    pairs: Iterable[DerivedPair],
    wall_budget: float = DEFAULT_WALL_BUDGET,
    max_edges: int = DEFAULT_MAX_EDGES,
) -> tuple[frozenset[DerivedPair], frozenset, frozenset]:
    """Argument-graph skeleton (arguments, attacks, supports).

    Base scores are the only tau-dependent part of a :class:`Baf`, so the
    skeleton can be shared across base-score choices.
    """
    deadline = time.monotonic() + wall_budget
    arguments = frozenset(pairs)
    contraries: dict[str, set[str]] = {}
    for a in d.assumptions:
        contraries.setdefault(d.contrary[a], set()).add(a)
    by_asm: dict[str, list[DerivedPair]] = {}
    for y in arguments:
        for a in y.support:
            by_asm.setdefault(a, []).append(y)

    attacks = set()
    supports = set()
    n_edges = 0
    for x in arguments:
        targets: set[DerivedPair] = set()
        for a in contraries.get(x.claim, ()):
            targets.update(by_asm.get(a, ()))
        attacks.update((x, y) for y in targets)
        n_edges += len(targets)
        if x.rule_based and x.claim in by_asm:
            for y in by_asm[x.claim]:
                supports.add((x, y))
                n_edges += 1
        if n_edges > max_edges:
            raise InstantiationBudgetExceeded(f"more than {max_edges} argument edges")
        if time.monotonic() > deadline:
            raise InstantiationBudgetExceeded("wall-time cap")
    return arguments, frozenset(attacks), frozenset(supports)


def baf_from_structure(
    structure: tuple[frozenset[DerivedPair], frozenset, frozenset],
    tau: Mapping[str, float],
    beta_fn: Callable[[Iterable[float]], float] = beta_prod,
) -> Baf:
    """Attach base scores to a prebuilt argument-graph skeleton."""
    arguments, attacks, supports = structure
    beta = {x: beta_fn(tau[a] for a in x.support) for x in arguments}
    return Baf(arguments, attacks, supports, beta)


def build_baf(
    d: Abaf,
    beta_fn: Callable[[Iterable[float]], float] = beta_prod,
    tau: Mapping[str, float] | None = None,
    pairs: Iterable[DerivedPair] | None = None,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    wall_budget: float = DEFAULT_WALL_BUDGET,
    max_edges: int = DEFAULT_MAX_EDGES,
) -> Baf:
    """Argument-level instantiation with assumption-based base scores.

    Attacks target every argument whose assumptions include the attacked
    assumption; supports link rule-based arguments to the arguments using
    their claim as an assumption.
    """
    if tau is None:
        tau = d.tau
    if pairs is None:
        pairs = saturate(d, max_pairs=max_pairs, wall_budget=wall_budget)
    structure = baf_structure(d, pairs, wall_budget=wall_budget, max_edges=max_edges)
    return baf_from_structure(structure, tau, beta_fn)


def dump_debug(bsaf: Bsaf | None = None, baf: Baf | None = None) -> str:
    """Line-oriented debug dump of the abstractions."""
    lines = []
    if bsaf is not None:
        for e, t in sorted(bsaf.attacks, key=lambda et: (et[1], tuple(sorted(et[0])))):
            lines.append(" ".join(["att", t, *sorted(e)]))
        for e, t in sorted(bsaf.supports, key=lambda et: (et[1], tuple(sorted(et[0])))):
            lines.append(" ".join(["sup", t, *sorted(e)]))
    if baf is not None:
        for i, x in enumerate(sorted(baf.arguments, key=DerivedPair.sort_key)):
            lines.append(" ".join(["arg", str(i), x.claim, *sorted(x.support)]))
    return "\n".join(lines) + "\n"
