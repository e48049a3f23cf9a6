"""Command-line entry point ``cascade-lab``.

Exit codes: 0 success (possibly with per-point warnings), 2 invalid config,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .recipes import RECIPES, recipe
from .sweep import (EXACT_CAVITY_MODELS, ConfigError, default_workers, emit, fock_convergence,
                    grid_points, load_config, parse_config, run_sweep)

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cascade-lab",
                                description="Distributable entanglement sweeps.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep described by a JSON config")
    run.add_argument("config")
    run.add_argument("--out", default=".", help="output directory (default: .)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--workers", type=int, default=None,
                     help="worker processes (default: $CASCADE_LAB_WORKERS or 1)")

    rec = sub.add_parser("recipe", help="run a named figure recipe")
    rec.add_argument("name", nargs="?", help="recipe name; omit with --list")
    rec.add_argument("--list", action="store_true", help="list recipes and exit")
    rec.add_argument("--out", default=".")
    rec.add_argument("--format", choices=("csv", "json"), default="csv")
    rec.add_argument("--workers", type=int, default=None)

    conv = sub.add_parser("converge", help="Fock-truncation convergence for each grid point")
    conv.add_argument("config")
    return p


def _warn_errors(result, stem: str) -> None:
    bad = result.errors
    if bad:
        print(f"warning: {stem}: {len(bad)} of {len(result.rows)} points failed; "
              f"first: {bad[0]['status']}", file=sys.stderr)


def _run(cfg, out: str, fmt: str, workers, stem=None) -> int:
    result = run_sweep(cfg, workers)
    try:
        path = emit(result, fmt, out, stem)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    _warn_errors(result, stem or cfg.name)
    print(path)
    return EXIT_OK


def _config_error(exc: ConfigError) -> int:
    for msg in exc.errors:
        print(f"config error: {msg}", file=sys.stderr)
    return EXIT_CONFIG


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    workers = args.workers if getattr(args, "workers", None) is not None else default_workers()
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            return _run(cfg, args.out, args.format, workers)
        if args.command == "recipe":
            if args.list or not args.name:
                for name in RECIPES:
                    print(name)
                return EXIT_OK
            try:
                parts = recipe(args.name)
            except KeyError as exc:
                raise ConfigError([str(exc.args[0])]) from exc
            code = EXIT_OK
            for stem, raw in parts:
                code = max(code, _run(parse_config(raw), args.out, args.format, workers, stem))
            return code
        if args.command == "converge":
            cfg = load_config(args.config)
            if cfg.model not in EXACT_CAVITY_MODELS:
                raise ConfigError([f"model: converge needs one of {', '.join(EXACT_CAVITY_MODELS)}"])
            for coords in grid_points(cfg):
                rec = fock_convergence(cfg.model, {**cfg.fixed, **coords},
                                       reference=cfg.reference_rate)
                print(json.dumps({"point": coords, "n_fock": rec.n_fock,
                                  "converged": rec.converged,
                                  "ladder": [list(x) for x in rec.ladder]}))
            return EXIT_OK
    except ConfigError as exc:
        return _config_error(exc)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
