"""Building blocks of the modular semantics.

A kernel is a triple of a set aggregation (collapses a set-attack or
set-support into one strength), an aggregation (combines attacker and
supporter strengths into a signed aggregate) and an influence function
(moves a base score according to the aggregate).

All evaluators are pure and order-insensitive: inputs are treated as
multisets and sorted before folding so results are deterministic across
platforms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable


class SetAggKind(enum.Enum):
    SUM = "sum"
    PROD = "prod"
    MIN = "min"
    MAX = "max"


class AggKind(enum.Enum):
    SUM = "sum"
    PROD = "prod"


class InfluenceKind(enum.Enum):
    LINEAR = "linear"
    # Quadratic energy as printed in the source table: support term b*h(w/k)
    # with h(w) = max(0,w)^2 / (1 + max(0,w))^2.  Can leave [0,1].
    QE_PRINTED = "qe-printed"
    # Standard quadratic energy: b - b*h(-w/k) + (1-b)*h(w/k) with
    # h(x) = max(0,x)^2 / (1 + max(0,x)^2).  Maps [0,1] base scores to [0,1].
    QE_STANDARD = "qe-standard"


@dataclass(frozen=True)
class SetAgg:
    kind: SetAggKind

    @property
    def m_zeta(self) -> float:
        """Maximal output on [0,1] inputs; unbounded for Sum."""
        return math.inf if self.kind is SetAggKind.SUM else 1.0


@dataclass(frozen=True)
class Agg:
    kind: AggKind


@dataclass(frozen=True)
class Influence:
    kind: InfluenceKind
    k: float = 1.0

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("conservativeness parameter k must be positive")


@dataclass(frozen=True)
class Kernel:
    zeta: SetAgg
    alpha: Agg
    iota: Influence


def zeta_eval(z: SetAgg, strengths: Iterable[float]) -> float:
    """Set aggregation. Empty-input conventions: Sum 0, Prod 1, Min 1, Max 0."""
    vals = sorted(strengths)
    if z.kind is SetAggKind.SUM:
        return math.fsum(vals)
    if z.kind is SetAggKind.PROD:
        return math.prod(vals)
    if z.kind is SetAggKind.MIN:
        return min(vals, default=1.0)
    return max(vals, default=0.0)


def alpha_eval(a: Agg, attackers: Iterable[float], supporters: Iterable[float]) -> float:
    """Signed aggregate: negative means attack dominance, positive support."""
    att = sorted(attackers)
    sup = sorted(supporters)
    if a.kind is AggKind.SUM:
        return math.fsum(sup) - math.fsum(att)
    return math.prod(1.0 - v for v in att) - math.prod(1.0 - v for v in sup)


def _h_printed(w: float) -> float:
    z = max(0.0, w)
    return z * z / ((1.0 + z) * (1.0 + z))


def _h_standard(x: float) -> float:
    z = max(0.0, x)
    return z * z / (1.0 + z * z)


def iota_eval(i: Influence, base: float, w: float) -> float:
    """Influence of aggregate w on base score. iota(b, 0) = b for all kinds."""
    k = i.k
    if i.kind is InfluenceKind.LINEAR:
        return base + (base / k) * min(0.0, w) + ((1.0 - base) / k) * max(0.0, w)
    if i.kind is InfluenceKind.QE_PRINTED:
        return base - base * _h_printed(-w / k) + base * _h_printed(w / k)
    return base - base * _h_standard(-w / k) + (1.0 - base) * _h_standard(w / k)


_ELEMENTARY_ZETA = {SetAggKind.PROD, SetAggKind.MIN}
_ELEMENTARY_IOTA = {InfluenceKind.LINEAR, InfluenceKind.QE_STANDARD}


def is_elementary(kernel: Kernel) -> bool:
    """Classification lookup: Lipschitz components with the monotonicity,
    balance, neutrality, void and superiority-preservation guarantees.

    Sum and Max set aggregation fail superiority preservation; the printed
    quadratic-energy variant escapes [0,1] and is excluded.
    """
    return (
        kernel.zeta.kind in _ELEMENTARY_ZETA
        and kernel.iota.kind in _ELEMENTARY_IOTA
    )


def df_quad(zeta: SetAggKind = SetAggKind.PROD, k: float = 1.0) -> Kernel:
    """DF-QuAD: product aggregation with linear influence."""
    return Kernel(SetAgg(zeta), Agg(AggKind.PROD), Influence(InfluenceKind.LINEAR, k))


def quadratic_energy(
    zeta: SetAggKind = SetAggKind.PROD,
    k: float = 1.0,
    printed: bool = False,
) -> Kernel:
    """QE: sum aggregation with quadratic-energy influence."""
    kind = InfluenceKind.QE_PRINTED if printed else InfluenceKind.QE_STANDARD
    return Kernel(SetAgg(zeta), Agg(AggKind.SUM), Influence(kind, k))
