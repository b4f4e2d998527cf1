"""Seeded random ABAF generation for corpus experiments."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import Abaf, Rule, DEFAULT_BASE_SCORE


@dataclass(frozen=True)
class GenParams:
    n_assumptions: int
    n_atoms_extra: int
    n_rules: int
    max_body: int
    flat: bool
    seed: int

    def __post_init__(self):
        if self.n_assumptions < 1:
            raise ValueError("need at least one assumption")
        if self.max_body < 1:
            raise ValueError("max_body must be at least 1")
        if self.n_atoms_extra < 0 or self.n_rules < 0:
            raise ValueError("counts must be non-negative")
        if self.flat and self.n_rules > 0 and self.n_atoms_extra < 1:
            raise ValueError("flat generation needs non-assumption atoms for rule heads")


def gen_abaf(p: GenParams) -> Abaf:
    """Deterministic in the seed.

    Contraries are drawn from the other assumptions and the extra atoms;
    rule heads from the non-assumption atoms (flat) or all sentences
    (non-flat); bodies are sampled without replacement with uniform size
    in 1..max_body.  Base scores are left at the parse default and are
    expected to be assigned by the caller.
    """
    rng = random.Random(p.seed)
    assumptions = [f"a{i}" for i in range(p.n_assumptions)]
    atoms = [f"s{i}" for i in range(p.n_atoms_extra)]
    everything = assumptions + atoms

    contrary = {}
    for a in assumptions:
        pool = [s for s in everything if s != a]
        contrary[a] = rng.choice(pool) if pool else f"not_{a}"

    head_pool = atoms if p.flat else everything
    rules: set[Rule] = set()
    attempts = 0
    while len(rules) < p.n_rules and attempts < 50 * p.n_rules:
        attempts += 1
        head = rng.choice(head_pool)
        size = rng.randint(1, min(p.max_body, len(everything)))
        body = rng.sample(everything, size)
        if head in body:
            continue
        rules.add(Rule(head, frozenset(body)))

    tau = {a: DEFAULT_BASE_SCORE for a in assumptions}
    return Abaf(frozenset(assumptions), frozenset(rules), contrary, tau)
