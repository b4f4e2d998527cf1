"""Multiset comparison predicates for strength values.

Strength multisets are plain sequences of floats; families of multisets
are sequences of such sequences.  Elements equal to the maximal strength
(exactly 1.0) are treated as facts and stripped before comparison; sets
containing a 0 are ignored at the family level.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence

from .kernels import Agg, SetAgg, alpha_eval, zeta_eval

StrengthMultiset = Sequence[float]
SetFamily = Sequence[StrengthMultiset]

MAX_STRENGTH = 1.0


def nonmax(values: Iterable[float]) -> list[float]:
    """Elements below maximal strength, sorted descending.

    Strips on exact equality with 1.0 only; callers needing tolerance
    pre-round.
    """
    return sorted((v for v in values if v != MAX_STRENGTH), reverse=True)


def superior(a: StrengthMultiset, s: StrengthMultiset) -> bool:
    """Smaller-and-stronger comparison: the non-maximal part of `a` must
    pointwise dominate the same number of largest non-maximal elements
    of `s`."""
    na, ns = nonmax(a), nonmax(s)
    if not na and not ns:
        return True
    if len(na) > len(ns):
        return False
    return all(x >= y for x, y in zip(na, ns))


def sup_equivalent(a: StrengthMultiset, s: StrengthMultiset) -> bool:
    """Equal non-maximal parts (as multisets)."""
    return nonmax(a) == nonmax(s)


def pos(family: SetFamily) -> list[StrengthMultiset]:
    """Members not containing a zero strength."""
    return [m for m in family if all(v != 0.0 for v in m)]


def dominates(att: SetFamily, sup: SetFamily) -> bool:
    """True iff every zero-free member of `sup` can be injectively assigned
    a superior zero-free member of `att` (maximum bipartite matching)."""
    targets = pos(sup)
    sources = pos(att)
    if not targets:
        return True
    if len(sources) < len(targets):
        return False
    # Augmenting-path matching; families are small.
    edges = [
        [j for j, a in enumerate(sources) if superior(a, s)] for s in targets
    ]
    match_of_source: list[int | None] = [None] * len(sources)

    def augment(i: int, seen: list[bool]) -> bool:
        for j in edges[i]:
            if seen[j]:
                continue
            seen[j] = True
            if match_of_source[j] is None or augment(match_of_source[j], seen):
                match_of_source[j] = i
                return True
        return False

    return all(augment(i, [False] * len(sources)) for i in range(len(targets)))


def balanced(a: SetFamily, s: SetFamily) -> bool:
    """Mutual dominance."""
    return dominates(a, s) and dominates(s, a)


def check_preservation(z: SetAgg, a: SetFamily, s: SetFamily) -> bool:
    """One instance of the preservation implication: if `a` dominates `s`
    then the aggregated image of `a` must be superior to that of `s`."""
    if not dominates(a, s):
        return True
    image_a = [zeta_eval(z, m) for m in a]
    image_s = [zeta_eval(z, m) for m in s]
    return superior(image_a, image_s)


def check_alpha_zeta_monotonicity(
    z: SetAgg,
    al: Agg,
    a: SetFamily,
    s: SetFamily,
    a2: SetFamily,
    s2: SetFamily,
) -> bool:
    """Evaluate the four monotonicity implication clauses on one instance."""

    def agg(att: SetFamily, sup: SetFamily) -> float:
        return alpha_eval(al, (zeta_eval(z, m) for m in att), (zeta_eval(z, m) for m in sup))

    if dominates(a, s) and not agg(a, s) <= 0.0:
        return False
    if dominates(s, a) and not agg(a, s) >= 0.0:
        return False
    if dominates(a, a2) and not agg(a, s) <= agg(a2, s):
        return False
    if dominates(s, s2) and not agg(a, s) >= agg(a, s2):
        return False
    return True
