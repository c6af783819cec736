"""Command-line front end: ``flagvortex <verb> --config FILE``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import ConfigError, load_config
from .pipeline import run_pipeline

VERB_STAGES = {
    "bbw": ("bbw",),
    "calibrate": ("bbw", "calibrate"),
    "plan": ("bbw", "calibrate", "plan"),
    "solve": ("bbw", "calibrate", "plan", "solve"),
    "verify-fiber": ("verify-fiber",),
    "sweep": ("calibrate", "plan", "sweep"),
    "run": None,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flagvortex", description="Flag-bundle reduction pipeline: BBW data, vortex plans and solves.")
    sub = ap.add_subparsers(dest="verb", required=True)
    helps = {
        "bbw": "cohomology of the fiber modules only",
        "calibrate": "cohomology plus the slope/H^0 calibration check",
        "plan": "calibration plus vortex parameters, sigma window and Ext^1 count",
        "solve": "plan plus a torus solve at the configured sigma",
        "verify-fiber": "numerical reduction identities on CP^1",
        "sweep": "plan (and solve, for torus bases) along the sigma sweep",
        "run": "every stage enabled in the config",
    }
    for verb in VERB_STAGES:
        p = sub.add_parser(verb, help=helps[verb])
        p.add_argument("--config", required=True, help="TOML pipeline configuration")
        p.add_argument("--out", help="write the JSON report here (text report goes to stdout)")
        p.add_argument("--seed", type=int, help="override the random seed")
        p.add_argument("--tol", type=float, help="override the solver tolerance")
        p.add_argument("--grid", type=int, help="override the solver grid size N")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.tol is not None or args.grid is not None:
        if (args.tol is not None and args.tol <= 0) or (args.grid is not None and args.grid < 4):
            print("config error: --tol must be positive and --grid at least 4", file=sys.stderr)
            return 2
        cfg = replace(cfg, solver=replace(cfg.solver, tol=args.tol or cfg.solver.tol, grid=args.grid or cfg.solver.grid))
    stages = VERB_STAGES[args.verb]
    if args.verb == "solve" and cfg.exact_only:
        print("config error: base.mode: 'solve' needs a torus base, config is exact-only", file=sys.stderr)
        return 2
    if args.verb == "sweep" and cfg.sweep is None:
        print("config error: sigma.sweep: 'sweep' needs a [sigma.sweep] range", file=sys.stderr)
        return 2
    if args.verb == "verify-fiber":
        cfg = replace(cfg, fiber_check=replace(cfg.fiber_check, enabled=True))
    if args.verb == "run" and cfg.sweep is not None:
        stages = cfg.stages + ("sweep",)
    try:
        report = run_pipeline(cfg, stages)
    except (ValueError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    sys.stdout.write(report.to_text())
    out = args.out or cfg.outputs.get("json")
    if out:
        with open(out, "w") as fh:
            fh.write(report.to_json())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
