"""Gradual semantics for weighted assumption-based argumentation."""

from .core import Abaf, AbafError, Flatness, ParseError, Rule, check_flat, parse_abaf, serialize_abaf
from .instantiation import (
    Baf,
    Bsaf,
    DerivedPair,
    InstantiationBudgetExceeded,
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
    alpha_eval,
    df_quad,
    iota_eval,
    is_elementary,
    quadratic_energy,
    zeta_eval,
)
from .engine import (
    ConvergenceBound,
    EvolutionConfig,
    RunReport,
    convergence_guarantee,
    longest_primal_path,
    primal_acyclic,
    run,
    sigma_star,
    step_baf,
    step_bsaf,
)
from .generator import GenParams, gen_abaf
from .order_theory import balanced, dominates, sup_equivalent, superior

__version__ = "0.1.0"
