"""Command-line entry point.

    gridfork run --config exp.ini [--scenario NAME] [--seed N] [--reps N]
                 [--out DIR] [--variant paper_literal|include_layer2] [--check]
    gridfork validate --config exp.ini
    gridfork export-topology --shape diamond:8 --beta 1 --seed 42
                 [--scope all_pairs|adjacent_layers] [--source x,y] [--out FILE]

Exit codes: 0 success, 1 configuration error, 2 runtime error,
3 output self-check failure (run --check).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, GridforkError
from .harness import ExperimentConfig, RunReport, load_config, run_experiment
from .params import LinkScope
from .topology import GridShape, build_topology, save_topology, topology_text


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridfork", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment from a config file")
    run.add_argument("--config", required=True)
    run.add_argument("--scenario")
    run.add_argument("--seed", type=int)
    run.add_argument("--reps", type=int)
    run.add_argument("--out")
    run.add_argument("--variant", choices=["paper_literal", "include_layer2"])
    run.add_argument("--check", action="store_true", help="self-check the written outputs")

    val = sub.add_parser("validate", help="parse a config file and report problems")
    val.add_argument("--config", required=True)

    exp = sub.add_parser("export-topology", help="sample a topology and write its edge list")
    exp.add_argument("--shape", required=True, help="diamond:R or square:N")
    exp.add_argument("--beta", type=float, required=True)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--scope", choices=["all_pairs", "adjacent_layers"], default="all_pairs")
    exp.add_argument("--source", help="x,y scope source (defaults to the grid center)")
    exp.add_argument("--out", help="output file (default: stdout)")
    return parser


def _cmd_run(args) -> int:
    overrides = {
        "scenario": args.scenario,
        "seed": args.seed,
        "repetitions": args.reps,
        "out_dir": args.out,
        "variant": args.variant,
    }
    config = load_config(args.config, {k: v for k, v in overrides.items() if v is not None})
    report = run_experiment(config)
    for path in report.csv_paths:
        print(path)
    print(report.summary_path)
    if args.check and not _self_check(config, report):
        return 3
    return 0


def _self_check(config: ExperimentConfig, report: RunReport) -> bool:
    """Structural sanity of the written CSVs: row counts, ranges, monotonicity."""
    ok = True
    for path in report.csv_paths:
        lines = Path(path).read_text(encoding="ascii").strip().splitlines()
        if len(lines) < 3 or not lines[0].startswith("#"):
            print(f"check failed: {path}: missing header or rows", file=sys.stderr)
            ok = False
            continue
        header = lines[1].split(",")
        rows = np.asarray([[float(v) for v in ln.split(",")] for ln in lines[2:]])
        t = rows[:, 0]
        if not np.all(np.diff(t) > 0):
            print(f"check failed: {path}: time grid not increasing", file=sys.stderr)
            ok = False
        for name in ("analytic_fr", "sim_fr", "analytic_FR", "sim_FR"):
            if name in header:
                col = rows[:, header.index(name)]
                if col.min() < -1e-12 or col.max() > 1 + 1e-12:
                    print(f"check failed: {path}: {name} outside [0,1]", file=sys.stderr)
                    ok = False
        for name in ("analytic_FR", "sim_FR", "analytic_I", "sim_mean_I"):
            if name in header:
                col = rows[:, header.index(name)]
                if np.any(np.diff(col) < -1e-9):
                    print(f"check failed: {path}: {name} decreases", file=sys.stderr)
                    ok = False
    return ok


def _cmd_validate(args) -> int:
    load_config(args.config)
    print(f"{args.config}: ok")
    return 0


def _cmd_export(args) -> int:
    try:
        shape = GridShape.parse(args.shape)
        scope = LinkScope(args.scope)
        source = None
        if args.source:
            x, y = args.source.split(",")
            source = (int(x), int(y))
    except (ValueError, GridforkError) as exc:
        raise ConfigError(f"bad export arguments: {exc}") from exc
    topo = build_topology(shape, args.beta, scope=scope, seed=args.seed, source=source)
    if args.out:
        save_topology(topo, args.out)
        print(args.out)
    else:
        sys.stdout.write(topology_text(topo))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "export-topology":
            return _cmd_export(args)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except GridforkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
