"""Weighted ABA frameworks: domain types, text format, structural checks.

Sentences are plain interned strings. An :class:`Abaf` bundles the
vocabulary, the assumptions, the inference rules, the contrary map and
the base scores, and validates its structural invariants on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

DEFAULT_BASE_SCORE = 0.5


class AbafError(ValueError):
    """Structural violation in an ABA framework."""


class ParseError(AbafError):
    """Malformed input text; carries 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Rule:
    """Inference rule head <- body. An empty body makes the rule a fact."""

    head: str
    body: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "body", frozenset(self.body))

    def __str__(self):
        return f"{self.head} <- {{{', '.join(sorted(self.body))}}}"

    def sort_key(self):
        return (self.head, tuple(sorted(self.body)))


@dataclass(frozen=True)
class Flatness:
    flat: bool
    witnesses: frozenset[Rule]


@dataclass(frozen=True)
class Abaf:
    """A quantitative ABA framework.

    Immutable after construction; safe to share across threads.
    """

    assumptions: frozenset[str]
    rules: frozenset[Rule]
    contrary: Mapping[str, str]
    tau: Mapping[str, float]
    sentences: frozenset[str] = field(default=frozenset())

    def __post_init__(self):
        object.__setattr__(self, "assumptions", frozenset(self.assumptions))
        object.__setattr__(self, "rules", frozenset(self.rules))
        object.__setattr__(self, "contrary", dict(self.contrary))
        object.__setattr__(self, "tau", dict(self.tau))
        vocab = set(self.sentences) | set(self.assumptions)
        for r in self.rules:
            vocab.add(r.head)
            vocab.update(r.body)
        vocab.update(self.contrary.values())
        object.__setattr__(self, "sentences", frozenset(vocab))
        self._validate()

    def _validate(self):
        if not self.assumptions:
            raise AbafError("an ABAF needs at least one assumption")
        missing = self.assumptions - self.contrary.keys()
        if missing:
            raise AbafError(f"assumptions without contrary: {sorted(missing)}")
        extra = self.contrary.keys() - self.assumptions
        if extra:
            raise AbafError(f"contrary declared for non-assumptions: {sorted(extra)}")
        missing_tau = self.assumptions - self.tau.keys()
        if missing_tau:
            raise AbafError(f"assumptions without base score: {sorted(missing_tau)}")
        extra_tau = self.tau.keys() - self.assumptions
        if extra_tau:
            raise AbafError(f"base score for non-assumptions: {sorted(extra_tau)}")
        for a, w in self.tau.items():
            if not (0.0 <= w <= 1.0):
                raise AbafError(f"base score of {a} outside [0,1]: {w}")

    def with_tau(self, tau: Mapping[str, float]) -> "Abaf":
        """Copy with replaced base scores."""
        return Abaf(self.assumptions, self.rules, self.contrary, tau, self.sentences)


def parse_abaf(text: str, default_weight: float = DEFAULT_BASE_SCORE) -> Abaf:
    """Parse the line-oriented ABA text format.

    Directives (one per line, '#' starts a comment):
      a <atom>               declare assumption
      c <asm> <atom>         contrary of <asm>
      r <head> <b1> ... <bn> rule (n >= 0)
      w <asm> <float>        base score in [0,1]

    Non-assumption sentences are declared implicitly on first use;
    assumptions must be declared with an 'a' line before they are
    given a contrary or a weight.
    """
    assumptions: set[str] = set()
    contrary: dict[str, str] = {}
    rules: set[Rule] = set()
    weights: dict[str, float] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        tag, args = tokens[0], tokens[1:]
        if tag == "a":
            if len(args) != 1:
                raise ParseError(lineno, "expected: a <atom>")
            assumptions.add(args[0])
        elif tag == "c":
            if len(args) != 2:
                raise ParseError(lineno, "expected: c <asm> <atom>")
            asm, ctr = args
            if asm not in assumptions:
                raise ParseError(lineno, f"contrary for undeclared assumption {asm}")
            if asm in contrary and contrary[asm] != ctr:
                raise ParseError(lineno, f"duplicate contrary declaration for {asm}")
            contrary[asm] = ctr
        elif tag == "r":
            if len(args) < 1:
                raise ParseError(lineno, "expected: r <head> <b1> ... <bn>")
            rules.add(Rule(args[0], frozenset(args[1:])))
        elif tag == "w":
            if len(args) != 2:
                raise ParseError(lineno, "expected: w <asm> <float>")
            asm = args[0]
            try:
                w = float(args[1])
            except ValueError:
                raise ParseError(lineno, f"not a number: {args[1]}") from None
            if asm not in assumptions:
                raise ParseError(lineno, f"weight for non-assumption {asm}")
            if not (0.0 <= w <= 1.0):
                raise ParseError(lineno, f"weight out of range [0,1]: {w}")
            weights[asm] = w
        else:
            raise ParseError(lineno, f"unknown directive {tag!r}")

    tau = {a: weights.get(a, default_weight) for a in assumptions}
    try:
        return Abaf(frozenset(assumptions), frozenset(rules), contrary, tau)
    except AbafError as exc:
        raise AbafError(f"invalid framework: {exc}") from exc


def serialize_abaf(d: Abaf) -> str:
    """Render an Abaf in the text format accepted by :func:`parse_abaf`.

    Deterministic (sorted) order; weights equal to the parse default are
    omitted, explicit weights use the shortest round-trip decimal.
    """
    lines = []
    for a in sorted(d.assumptions):
        lines.append(f"a {a}")
    for a in sorted(d.assumptions):
        lines.append(f"c {a} {d.contrary[a]}")
    for r in sorted(d.rules, key=Rule.sort_key):
        lines.append(" ".join(["r", r.head, *sorted(r.body)]))
    for a in sorted(d.assumptions):
        if d.tau[a] != DEFAULT_BASE_SCORE:
            lines.append(f"w {a} {d.tau[a]!r}")
    return "\n".join(lines) + "\n"


def check_flat(d: Abaf) -> Flatness:
    """Flat iff no rule head is an assumption; witnesses are the offenders."""
    witnesses = frozenset(r for r in d.rules if r.head in d.assumptions)
    return Flatness(flat=not witnesses, witnesses=witnesses)
