"""Render figures from abagrad corpus CSVs and evaluation JSON reports.

The module consumes only the external interfaces of the main package: the
CSV written by ``abagrad corpus`` and the JSON printed by ``abagrad eval
--trajectories``.  Three figure kinds are supported:

* ``overall_bars`` — convergence rate and mean steps per approach and
  semantics, grouped bars from a corpus CSV.
* ``sensitivity_bins`` — convergence rate against instance size
  (number of assumptions), one line per approach.
* ``trajectories`` — per-node strength curves from one or more
  evaluation JSON reports, one panel per report.

Rendering is deterministic: groups are sorted, the PNG metadata is
pinned, and identical inputs produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

REQUIRED_COLUMNS = [
    "instance",
    "approach",
    "semantics",
    "tau_init",
    "n_assumptions",
    "converged",
    "steps",
]

_COLORS = {"bsaf": "#1f77b4", "baf": "#d62728"}
_SAVE_OPTS = {"dpi": 110, "metadata": {"Software": "abagrad-plots"}}


class DataError(Exception):
    """Input is missing, malformed, or has nothing to plot."""


def load_csv(path: str) -> pd.DataFrame:
    try:
        df = pd.read_csv(path)
    except (FileNotFoundError, pd.errors.EmptyDataError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
    if missing:
        raise DataError(f"{path}: missing columns {', '.join(missing)}")
    if df.empty:
        raise DataError(f"{path}: no data rows")
    return df


def load_json(path: str) -> dict:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not payload.get("trajectories"):
        raise DataError(f"{path}: no trajectories recorded "
                        "(rerun eval with --trajectories)")
    return payload


def _group_stats(df: pd.DataFrame) -> pd.DataFrame:
    """Convergence rate and mean steps per (approach, semantics)."""
    groups = df.groupby(["approach", "semantics"], sort=True)
    stats = groups.agg(
        rate=("converged", "mean"),
        n=("converged", "size"),
    )
    stats["mean_steps"] = groups.apply(
        lambda g: g.loc[g["converged"] == 1, "steps"].astype(float).mean(),
        include_groups=False,
    )
    if stats.empty:
        raise DataError("no (approach, semantics) groups to plot")
    if stats["mean_steps"].isna().all():
        raise DataError("no converged runs in any group")
    return stats


def overall_bars(df: pd.DataFrame, out: str) -> None:
    stats = _group_stats(df)
    semantics = sorted(df["semantics"].unique())
    approaches = sorted(df["approach"].unique())
    width = 0.8 / len(approaches)

    fig, (ax_rate, ax_steps) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    for i, approach in enumerate(approaches):
        xs = [j + (i - (len(approaches) - 1) / 2) * width
              for j in range(len(semantics))]
        rates, steps = [], []
        for s in semantics:
            row = stats.loc[(approach, s)] if (approach, s) in stats.index else None
            rates.append(0.0 if row is None else row["rate"])
            steps.append(0.0 if row is None or pd.isna(row["mean_steps"])
                         else row["mean_steps"])
        color = _COLORS.get(approach)
        ax_rate.bar(xs, rates, width=width, label=approach, color=color)
        ax_steps.bar(xs, steps, width=width, label=approach, color=color)

    ax_rate.set_ylabel("convergence rate")
    ax_rate.set_ylim(0, 1.05)
    ax_rate.legend()
    ax_steps.set_ylabel("mean steps (converged)")
    ax_steps.set_xticks(range(len(semantics)), semantics)
    ax_steps.set_xlabel("semantics")
    fig.suptitle("Convergence across the corpus")
    fig.tight_layout()
    fig.savefig(out, **_SAVE_OPTS)
    plt.close(fig)


def sensitivity_bins(df: pd.DataFrame, out: str) -> None:
    rates = (df.groupby(["approach", "n_assumptions"], sort=True)["converged"]
             .mean())
    if rates.empty:
        raise DataError("no (approach, size) groups to plot")

    fig, ax = plt.subplots(figsize=(6, 4))
    for approach in sorted(df["approach"].unique()):
        series = rates.loc[approach].sort_index()
        ax.plot(series.index, series.values, marker="o",
                label=approach, color=_COLORS.get(approach))
    ax.set_xlabel("assumptions per instance")
    ax.set_ylabel("convergence rate")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    ax.set_title("Convergence rate by instance size")
    fig.tight_layout()
    fig.savefig(out, **_SAVE_OPTS)
    plt.close(fig)


def trajectories(payloads: list[dict], out: str) -> None:
    if not payloads:
        raise DataError("trajectories kind needs at least one --json report")
    fig, axes = plt.subplots(len(payloads), 1, figsize=(6, 3 * len(payloads)),
                             sharex=True, squeeze=False)
    for ax, payload in zip(axes.flat, payloads):
        for node in sorted(payload["trajectories"]):
            ax.plot(payload["trajectories"][node], label=node)
        kernel = payload.get("kernel", {})
        label = kernel.get("semantics") or payload.get("instance", "")
        ax.set_title(f"{label} ({payload.get('steps')} steps, "
                     f"{'converged' if payload.get('converged') else 'diverged'})")
        ax.set_ylabel("strength")
        ax.set_ylim(-0.05, 1.05)
        ax.legend(fontsize="small", ncols=2)
    axes.flat[-1].set_xlabel("iteration")
    fig.tight_layout()
    fig.savefig(out, **_SAVE_OPTS)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots.py",
        description="Render figures from abagrad CSV/JSON outputs",
    )
    parser.add_argument("--csv", help="corpus CSV (overall_bars, sensitivity_bins)")
    parser.add_argument("--json", nargs="+", default=[],
                        help="evaluation JSON reports (trajectories)")
    parser.add_argument("--kind", required=True,
                        choices=["overall_bars", "sensitivity_bins", "trajectories"])
    parser.add_argument("-o", "--output", required=True)
    args = parser.parse_args(argv)

    try:
        if args.kind == "trajectories":
            trajectories([load_json(p) for p in args.json], args.output)
        else:
            if not args.csv:
                raise DataError(f"{args.kind} needs --csv")
            df = load_csv(args.csv)
            (overall_bars if args.kind == "overall_bars" else sensitivity_bins)(
                df, args.output)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
