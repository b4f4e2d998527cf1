"""Command line interface: eval, gen, corpus, check-properties."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import parse_abaf, serialize_abaf
from .engine import EvolutionConfig
from .generator import GenParams, gen_abaf
from .harness import (
    GridCell,
    GridSpec,
    UsageError,
    cell_metrics,
    default_corpus,
    eval_instance,
    init_tau,
    make_kernel,
    report_to_json,
    rows_to_csv,
    run_corpus,
)
from .kernels import df_quad
from .properties import check_properties


def _add_engine_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--delta", type=int, default=5)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--wall-budget", type=float, default=600.0)


def _config(args, kernel) -> EvolutionConfig:
    return EvolutionConfig(
        kernel=kernel,
        epsilon=args.epsilon,
        delta=args.delta,
        max_iters=args.max_iters,
        wall_budget=args.wall_budget,
        record_trajectories=getattr(args, "trajectories", False),
    )


def cmd_eval(args) -> int:
    d = parse_abaf(Path(args.file).read_text())
    cell = GridCell(
        approach=args.approach,
        semantics=args.semantics,
        set_agg=args.set_agg,
        base_agg=args.base_agg,
        sigma_mode=args.sigma_star,
        tau_init=args.tau_init,
    )
    kernel = make_kernel(args.semantics, args.set_agg, args.k, args.qe_variant)
    cfg = _config(args, kernel)
    tau = init_tau(d, args.tau_init, args.seed) if args.tau_init != "file" else None
    result = eval_instance(d, cell, cfg, tau=tau, kernel=kernel)
    print(report_to_json(args.file, cell, result))
    return 0 if result.phase_timeout == "" else 1


def cmd_gen(args) -> int:
    params = GenParams(
        n_assumptions=args.assumptions,
        n_atoms_extra=args.atoms,
        n_rules=args.rules,
        max_body=args.max_body,
        flat=args.flat,
        seed=args.seed,
    )
    text = serialize_abaf(gen_abaf(params))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_corpus(args) -> int:
    if args.dir:
        instances = []
        for i, path in enumerate(sorted(Path(args.dir).glob("*.aba"))):
            instances.append((path.name, parse_abaf(path.read_text()), args.seed + i))
    else:
        instances = default_corpus(args.instances, args.seed)
    grid = GridSpec(
        approaches=tuple(args.approaches.split(",")),
        semantics=tuple(args.semantics.split(",")),
        set_aggs=tuple(args.set_aggs.split(",")),
        base_score_aggs=tuple(args.base_aggs.split(",")),
        sigma_star=tuple(args.sigma_star.split(",")),
        tau_init=tuple(args.tau_init.split(",")),
    )
    cfg = _config(args, df_quad())
    rows = run_corpus(instances, grid, cfg)
    csv_text = rows_to_csv(rows)
    if args.output:
        Path(args.output).write_text(csv_text)
    else:
        sys.stdout.write(csv_text)
    for key, m in sorted(cell_metrics(rows).items()):
        label = "/".join(x for x in key if x)
        print(f"# {label}: rate={m['rate']:.3f} mean_steps={m['mean_steps']:.1f} n={m['n']}",
              file=sys.stderr)
    return 0


def cmd_check_properties(args) -> int:
    if args.trials < 1:
        raise UsageError("trials must be at least 1")
    results = check_properties(trials=args.trials, seed=args.seed)
    failed = 0
    for name, res in sorted(results.items()):
        status = "PASS" if res["passed"] else "FAIL"
        line = f"{status} {name}"
        if res["detail"]:
            line += f"  ({res['detail']})"
        print(line)
        failed += not res["passed"]
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="abagrad",
        description="Gradual semantics for weighted ABA frameworks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a single framework file")
    p.add_argument("file")
    p.add_argument("--approach", choices=["bsaf", "baf"], default="bsaf")
    p.add_argument("--semantics", choices=["dfq", "qe"], default="dfq")
    p.add_argument("--set-agg", choices=["min", "prod", "sum", "max"], default="prod")
    p.add_argument("--base-agg", choices=["min", "prod"], default="prod")
    p.add_argument("--sigma-star", choices=["asm", "min", "max", "avg"], default="asm")
    p.add_argument("--qe-variant", choices=["standard", "printed"], default="standard")
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--tau-init", choices=["file", "const", "uniform"], default="file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trajectories", action="store_true")
    _add_engine_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen", help="generate a random framework")
    p.add_argument("--assumptions", type=int, required=True)
    p.add_argument("--atoms", type=int, default=5)
    p.add_argument("--rules", type=int, default=10)
    p.add_argument("--max-body", type=int, default=3)
    p.add_argument("--flat", action="store_true")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("corpus", help="sweep a corpus over the experiment grid")
    p.add_argument("--dir", help="directory of .aba files (default: generated corpus)")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--approaches", default="bsaf,baf")
    p.add_argument("--semantics", default="dfq,qe")
    p.add_argument("--set-aggs", default="min,prod")
    p.add_argument("--base-aggs", default="min,prod")
    p.add_argument("--sigma-star", default="asm")
    p.add_argument("--tau-init", default="const,uniform")
    p.add_argument("-o", "--output")
    _add_engine_args(p)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("check-properties", help="run the property sweeps")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check_properties)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
