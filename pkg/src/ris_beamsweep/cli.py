"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 enumeration refused (surface too
large for the oracle), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys

from ._version import __version__
from .harness import (
    ExperimentSpec,
    build_codebook_files,
    describe_codebook,
    run_frequency_experiment,
    run_oracle_experiment,
    run_pattern_experiment,
    run_sweep_experiment,
)
from .optimize import EnumerationLimitError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_REFUSED = 3
EXIT_IO = 4


def _parse_angles(text: str) -> tuple:
    """Either 'start:step:stop' or a comma-separated list, degrees."""
    if ":" in text:
        start, step, stop = (float(v) for v in text.split(":"))
        if step <= 0:
            raise ValueError("angle step must be positive")
        out = []
        a = start
        while a <= stop + 1e-9:
            out.append(round(a, 9))
            a += step
        return tuple(out)
    return tuple(float(v) for v in text.split(","))


def _add_common(p: argparse.ArgumentParser, needs_codebook: bool = True) -> None:
    p.add_argument("--scenario", required=True, help="scenario JSON path or preset name")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--objective", choices=("max", "min"), default="max")
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--angles", default=None, help="start:step:stop or comma list, degrees")
    if needs_codebook:
        p.add_argument(
            "--codebook",
            default="scan",
            help="codebook source: scan, model, or a codebook JSON path",
        )


def _spec_from_args(args, name: str) -> ExperimentSpec:
    source, path = "scan", None
    codebook = getattr(args, "codebook", "scan")
    if codebook in ("scan", "model"):
        source = codebook
    else:
        source, path = "file", codebook
    return ExperimentSpec(
        name=name,
        scenario=args.scenario,
        codebook_source=source,
        codebook_path=path,
        objective="maximize" if args.objective == "max" else "minimize",
        iterations=args.iterations,
        out_dir=args.out,
        seed=args.seed,
        frequencies_hz=tuple(getattr(args, "frequencies", None) or (3.5e9, 3.55e9, 3.6e9)),
        rx_angles=_parse_angles(args.angles) if args.angles else None,
        max_bits=getattr(args, "max_bits", 20),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ris-beamsweep",
        description="Simulate 1-bit RIS beam sweeping: patterns, AoA sweeps, and oracles.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern", help="theory and simulated radiation-pattern cuts")
    _add_common(p)

    p = sub.add_parser("sweep", help="beam-sweeping AoA estimation on the scenario grid")
    _add_common(p)

    p = sub.add_parser("freq", help="main-lobe direction across probe frequencies")
    _add_common(p)
    p.add_argument(
        "--frequencies",
        type=lambda t: tuple(float(v) for v in t.split(",")),
        default=None,
        help="comma-separated probe frequencies in Hz",
    )

    p = sub.add_parser("oracle", help="exhaustive optimum vs the greedy scan (tiny surfaces)")
    _add_common(p, needs_codebook=False)
    p.add_argument("--max-bits", dest="max_bits", type=int, default=20)

    cb = sub.add_parser("codebook", help="build or inspect codebooks")
    cb_sub = cb.add_subparsers(dest="codebook_command", required=True)
    p = cb_sub.add_parser("build", help="build a codebook and save it as JSON")
    _add_common(p)
    p = cb_sub.add_parser("show", help="print a codebook as text grids")
    p.add_argument("--codebook", required=True, help="codebook JSON path")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "pattern":
            paths = run_pattern_experiment(_spec_from_args(args, "pattern"))
        elif args.command == "sweep":
            paths = run_sweep_experiment(_spec_from_args(args, "sweep"))
        elif args.command == "freq":
            paths = run_frequency_experiment(_spec_from_args(args, "freq"))
        elif args.command == "oracle":
            paths = run_oracle_experiment(_spec_from_args(args, "oracle"))
        elif args.command == "codebook" and args.codebook_command == "build":
            paths = build_codebook_files(_spec_from_args(args, "codebook-build"))
        elif args.command == "codebook" and args.codebook_command == "show":
            print(describe_codebook(args.codebook))
            return EXIT_OK
        else:  # pragma: no cover - argparse enforces choices
            return EXIT_INVALID
    except EnumerationLimitError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
