"""Command-line interface.

Verbs:
  lattice     build a lattice and export its site/adjacency tables
  run         execute a configured study into an artifact directory
  reproduce   regenerate a named figure's artifact set
  validate    parse and validate a config, reporting problems

Exit codes: 0 success, 2 validation error, 3 capacity error, 4 numerical
failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .artifacts import (
    DEFAULT_CONVENTIONS,
    write_adjacency_csv,
    write_lattice_csv,
    write_manifest,
)
from .config import load_config
from .errors import FractalentError, ValidationError
from .lattice import build_generalized, build_square
from .pipeline import run_study
from .reproduce import FIGURE_IDS, reproduce


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="seed for stochastic steps")
    parser.add_argument(
        "--workers", type=int, default=1, help="parallel workers for independent solves"
    )
    parser.add_argument(
        "--allow-large",
        action="store_true",
        help="lift the dense-solver size guard (slow, memory-hungry)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractalent",
        description="Free-fermion entanglement on self-similar lattices.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p_lat = sub.add_parser("lattice", help="export lattice tables")
    p_lat.add_argument("--order", type=int, default=3)
    p_lat.add_argument("--unit", type=int, default=1)
    p_lat.add_argument("--m", type=int, default=3)
    p_lat.add_argument("--mf", type=int, default=1)
    p_lat.add_argument("--square", type=int, default=0, help="plain square side (overrides order)")
    p_lat.add_argument("--periodic", action="store_true")
    _add_common(p_lat)

    p_run = sub.add_parser("run", help="execute a configured study")
    p_run.add_argument("--config", type=Path, required=True)
    _add_common(p_run)

    p_rep = sub.add_parser("reproduce", help="regenerate a named figure")
    p_rep.add_argument("figure", choices=FIGURE_IDS, metavar="FIGURE",
                       help=f"one of: {', '.join(FIGURE_IDS)}")
    _add_common(p_rep)

    p_val = sub.add_parser("validate", help="check a config file")
    p_val.add_argument("--config", type=Path, required=True)

    return parser


def _cmd_lattice(args) -> None:
    if args.square:
        lat = build_square(args.square, periodic=args.periodic)
    else:
        lat = build_generalized(args.order, unit=args.unit, m=args.m, m_f=args.mf)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_lattice_csv(out / "lattice.csv", lat)
    write_adjacency_csv(out / "adjacency.csv", lat)
    write_manifest(
        out,
        params={
            "verb": "lattice",
            "label": lat.label,
            "width": lat.width,
            "sites": lat.site_count,
            "edges": int(len(lat.edges)),
        },
        conventions=DEFAULT_CONVENTIONS,
    )
    print(f"{lat.label}: {lat.site_count} sites, {len(lat.edges)} edges -> {out}")


def _cmd_run(args) -> None:
    cfg = load_config(args.config)
    out = run_study(
        cfg,
        args.out,
        seed=args.seed,
        workers=args.workers,
        allow_large=args.allow_large,
    )
    print(f"study {cfg.label!r} written to {out}")


def _cmd_reproduce(args) -> None:
    out = reproduce(
        args.figure,
        args.out,
        seed=args.seed,
        workers=args.workers,
        allow_large=args.allow_large,
    )
    print(f"{args.figure} written to {out}")


def _cmd_validate(args) -> None:
    cfg = load_config(args.config)
    print(f"config OK: {cfg.label!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, which matches the validation code.
        return int(exc.code or 0)
    handlers = {
        "lattice": _cmd_lattice,
        "run": _cmd_run,
        "reproduce": _cmd_reproduce,
        "validate": _cmd_validate,
    }
    try:
        handlers[args.verb](args)
    except FractalentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except MemoryError:
        print("error: out of memory", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
