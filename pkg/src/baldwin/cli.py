"""Command line entry point.

    baldwin run fig1_learning --fast --out results/
    baldwin run --config my.json --replicates 50
    baldwin estimate --n-length 100 --json
    baldwin list-presets

Exit status: 0 success, 1 usage or validation error, 2 runtime or I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from .chains import InvalidParameterError
from .estimator import estimate_rates, recommend_params
from .experiment import run_experiment, snapshot_request
from .output import write_results
from .presets import FAST_REPLICATES, PRESETS, get_preset, parse_assignment, parse_config

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="baldwin", description="Learning and evolution on binary chains.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a preset or a JSON configuration")
    run.add_argument("preset", nargs="?", help="preset name (see list-presets)")
    run.add_argument("--config", type=Path, help="flat JSON file with ModelParams fields")
    run.add_argument("--replicates", type=int, help="number of replicate runs R")
    run.add_argument("--generations", type=int, help="number of generations G")
    run.add_argument("--seed", type=int, help="base seed")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override any parameter (repeatable)")
    run.add_argument("--snapshots", help="comma-separated generations for full histograms")
    run.add_argument("--out", type=Path, default=Path("."), help="output directory")
    run.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                     help="maximum number of worker processes")
    run.add_argument("--fast", action="store_true",
                     help=f"use R={FAST_REPLICATES} unless --replicates is given")

    est = sub.add_parser("estimate", help="evolutionary search time estimates")
    est.add_argument("--n-length", type=int, required=True, dest="N", help="chain length N")
    est.add_argument("--population", type=int, dest="n", help="population size n (default N)")
    est.add_argument("--p-m", type=float, dest="p_m", help="mutation probability (default 1/N)")
    est.add_argument("--beta", type=float, help="selection intensity (default 1)")
    est.add_argument("--json", action="store_true", help="print JSON instead of a table")

    sub.add_parser("list-presets", help="show available presets")
    return parser


def _overrides(args) -> dict:
    out = dict(parse_assignment(s) for s in args.set)
    if args.fast:
        out.setdefault("replicates", FAST_REPLICATES)
    for key in ("replicates", "generations"):
        if getattr(args, key) is not None:
            out[key] = getattr(args, key)
    if args.seed is not None:
        out["base_seed"] = args.seed
    return out


def cmd_run(args) -> int:
    if (args.preset is None) == (args.config is None):
        raise UsageError("run: give exactly one of a preset name or --config FILE")
    overrides = _overrides(args)
    if args.preset is not None:
        preset = get_preset(args.preset)
        name = preset.name
        params = parse_config(overrides=overrides, base=preset.params)
        snaps = set(preset.snapshot_generations)
    else:
        if not args.config.is_file():
            raise UsageError(f"run: config file {args.config} does not exist")
        name = args.config.stem.removesuffix("_meta")
        params = parse_config(args.config, overrides)
        snaps = set()
        try:
            meta = json.loads(args.config.read_text())
            snaps = set(meta.get("snapshot_generations", []))
        except (json.JSONDecodeError, AttributeError):
            pass
    if args.snapshots is not None:
        try:
            snaps = {int(s) for s in args.snapshots.split(",") if s.strip()}
        except ValueError:
            raise UsageError(f"run: bad --snapshots value {args.snapshots!r}") from None
    else:
        # preset snapshots past an overridden --generations are dropped
        snaps = {g for g in snaps if g <= params.generations}
    request = snapshot_request(snaps, params)

    for p in _execute(params, request, name, args.out, args.threads):
        print(p)
    return EXIT_OK


def _execute(params, request, name, out_dir, workers) -> list[Path]:
    t0 = time.perf_counter()
    result = run_experiment(params, request, workers=max(1, workers))
    return write_results(result, name, out_dir, time.perf_counter() - t0)


def run_preset(name: str, overrides: dict | None = None, out_dir=".", workers: int = 1) -> int:
    """Run a preset with optional parameter overrides and write its files.

    Returns an exit status instead of raising, like the command line.
    """
    try:
        preset = get_preset(name)
        params = parse_config(overrides=overrides, base=preset.params)
        snaps = {g for g in preset.snapshot_generations if g <= params.generations}
        _execute(params, snapshot_request(snaps, params), preset.name, Path(out_dir), workers)
    except InvalidParameterError as exc:
        print(f"baldwin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"baldwin: I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_estimate(args) -> int:
    n, p_m, beta = recommend_params(args.N)
    est = estimate_rates(
        args.N,
        args.n if args.n is not None else n,
        args.p_m if args.p_m is not None else p_m,
        args.beta if args.beta is not None else beta,
    )
    if args.json:
        print(json.dumps(est.to_dict(), indent=2))
        return EXIT_OK
    rows = [
        ("G_m  mutation timescale", est.mutation_timescale),
        ("G_s  selection timescale", est.selection_timescale),
        ("G_-1 per unit of rho", est.per_unit_rho),
        ("G_T  total generations", est.total_generations),
        ("G_n  neutral timescale", est.neutral_timescale),
        ("n_total organisms", est.total_organisms),
    ]
    for label, value in rows:
        print(f"{label:<26}{value:>14g}")
    return EXIT_OK


def cmd_list(args) -> int:
    for p in PRESETS.values():
        print(f"{p.name:<24}{p.description}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(asctime)s %(name)s %(message)s")
        handler = {"run": cmd_run, "estimate": cmd_estimate, "list-presets": cmd_list}
        return handler[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        print(parser.format_usage(), end="", file=sys.stderr)
        return EXIT_USAGE
    except InvalidParameterError as exc:
        print(f"baldwin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"baldwin: I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        print(f"baldwin: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
