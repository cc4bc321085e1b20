"""Command-line entry point: run scenarios, sweep gain curves, validate files."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

from . import metrics
from .engine import run_scenario
from .scenario import ScenarioError, load_scenario


def _cmd_run(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        sc = dataclasses.replace(sc, seed=args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    summary = run_scenario(sc)
    for label, leg in summary.legs.items():
        path = out_dir / f"{sc.name}.{label}.metrics.csv"
        metrics.write_metrics_csv(path, leg.samples)
        if not args.quiet:
            print(f"wrote {path}")
    summary_path = out_dir / f"{sc.name}.summary.csv"
    with open(summary_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "value"])
        for key, value in summary.rows():
            w.writerow([key, repr(value) if isinstance(value, float) else value])
    if not args.quiet:
        print(f"wrote {summary_path}")
        for key, value in summary.rows():
            print(f"  {key} = {value}")
    return 0


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _cmd_sweep_gain(args) -> int:
    import numpy as np
    if args.n_values:
        n_values = sorted({int(tok) for tok in args.n_values.split(",") if tok.strip()})
    else:
        grid = np.geomspace(args.n_min, args.n_max, args.n_points)
        n_values = sorted({int(round(v)) for v in grid})
    exponents = _parse_floats(args.delta)
    modes = [m.strip() for m in args.mode.split(",") if m.strip()]
    for m in modes:
        if m not in metrics.GAIN_MODES:
            print(f"error: unknown mode {m!r}", file=sys.stderr)
            return 2
    rows = metrics.sweep_gain(n_values, exponents, modes)
    metrics.write_gain_csv(args.out, rows)
    if not args.quiet:
        print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def _cmd_validate(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except (ScenarioError, OSError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        print(f"ok: scenario {sc.name!r} ({sc.n_nodes} nodes, protocol={sc.protocol})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcosync",
        description="Pulse-coupled oscillator vs timestamp-broadcast "
                    "time-sync simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario and write metric CSVs")
    p_run.add_argument("--scenario", required=True, help="scenario YAML file")
    p_run.add_argument("--out-dir", default=".", help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--quiet", action="store_true")
    p_run.set_defaults(func=_cmd_run)

    p_gain = sub.add_parser("sweep-gain", help="closed-form gain curves CSV")
    p_gain.add_argument("--n-min", type=int, default=10)
    p_gain.add_argument("--n-max", type=int, default=10000)
    p_gain.add_argument("--n-points", type=int, default=40)
    p_gain.add_argument("--n-values", default=None,
                        help="explicit comma-separated node counts (overrides the range)")
    p_gain.add_argument("--delta", default="2,3", help="comma-separated exponents")
    p_gain.add_argument("--mode", default="per-transmission",
                        help="comma-separated gain modes")
    p_gain.add_argument("--out", required=True, help="output CSV path")
    p_gain.add_argument("--quiet", action="store_true")
    p_gain.set_defaults(func=_cmd_sweep_gain)

    p_val = sub.add_parser("validate", help="check a scenario file")
    p_val.add_argument("--scenario", required=True)
    p_val.add_argument("--quiet", action="store_true")
    p_val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
