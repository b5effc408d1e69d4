"""Command-line front end.

    admbouss run CONFIG            single solve into an output directory
    admbouss family CONFIG        one solve per deconvolution order
    admbouss resume SNAP CONFIG   continue a saved state bit-exactly
    admbouss check-symbols ...    print the multiplier bound table

Exit codes: 0 success, 2 configuration problem, 3 numerical problem
(CFL refusal, failed family member, bound violation), 4 input/output
problem (unreadable snapshot, non-empty output directory).
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import ConfigError, parse_config
from .runner import FamilyError, check_symbols, family, resume, run
from .snapshot import SnapshotFormatError
from .stepping import CflError

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="admbouss",
        description="Deconvolution-regularized Boussinesq solver runs")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("config", help="TOML configuration file")
        p.add_argument("--output-root", default=None,
                       help="base directory for relative output paths")
        p.add_argument("--strict-invariants", action="store_true",
                       help="validate Hermitian symmetry and divergence "
                            "after every step")

    p_run = sub.add_parser("run", help="execute a single solve")
    add_common(p_run)

    p_family = sub.add_parser("family",
                              help="execute a family of solves over orders")
    add_common(p_family)

    p_resume = sub.add_parser("resume",
                              help="continue a snapshot to a new horizon")
    p_resume.add_argument("snapshot", help="snapshot file to continue from")
    add_common(p_resume)

    p_check = sub.add_parser("check-symbols",
                             help="verify the multiplier bounds on a grid")
    p_check.add_argument("--alpha", type=float, required=True,
                         help="filter length")
    p_check.add_argument("--order", type=int, required=True,
                         help="deconvolution order")
    p_check.add_argument("--modes", type=int, default=16,
                         help="modes per axis of the check grid")
    return parser


def _fail(category: str, message: str) -> None:
    print(f"admbouss: {category} error: {message}", file=sys.stderr)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "check-symbols":
            lines, ok = check_symbols(args.alpha, args.order, args.modes)
            print("\n".join(lines))
            return 0 if ok else 3
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
        config = parse_config(text, source=args.config)
        if args.command == "run":
            outdir = run(config, out_root=args.output_root,
                         strict=args.strict_invariants, config_text=text)
        elif args.command == "family":
            outdir = family(config, out_root=args.output_root,
                            strict=args.strict_invariants, config_text=text)
        else:
            outdir = resume(args.snapshot, config,
                            out_root=args.output_root,
                            strict=args.strict_invariants, config_text=text)
    except ConfigError as exc:
        _fail("configuration", str(exc))
        return 2
    except ValueError as exc:
        _fail("configuration", str(exc))
        return 2
    except (CflError, FamilyError, FloatingPointError, OverflowError) as exc:
        _fail("numerical", str(exc))
        return 3
    except SnapshotFormatError as exc:
        _fail("input/output", str(exc))
        return 4
    except OSError as exc:
        _fail("input/output", str(exc))
        return 4
    print(outdir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
