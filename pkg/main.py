#!/usr/bin/env python3
"""
Mayer Waves
-----------
Baroreflex cardiovascular model: equilibria, eigenvalues, Hopf crossings
and RK4 simulations of the three-compartment volume system.

Usage:
    python main.py steady --preset vd_4_0 --mu 10
    python main.py eigs --preset csv_1_025 --mu 35
    python main.py sweep --preset vd_4_0 --out out/sweep
    python main.py crossing --preset vd_4_0 --mu-lo 10 --mu-hi 30
    python main.py scan --preset hr_80_40
    python main.py boundary --variant csv --grid 6 --mu-max 200
    python main.py simulate --preset vd_4_0 --mu 20 --init 1,3.47,0.39
    python main.py reproduce --out out/ boundary.points=100
    python main.py --list                   # Subcommands and presets

Structure:
    core/         - Model, equilibrium, spectrum, bifurcation, dynamics
    report/       - Config loading, CSV/SVG writers, subcommand handlers
    configs/      - Hydra presets (variant/) and the reproduce plan

Exit status: 0 ok, 1 usage or config error, 2 numerical failure,
3 I/O error, 130 interrupted.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional, Sequence

# Root directory
ROOT_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, ROOT_DIR)

from core import commands
from core.console import info
from core.errors import MayerWavesError
from report.config import ConfigError, preset_names
from report.subcommands import UsageError, run_subcommand

log = logging.getLogger("mayer_waves")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_IO = 3
EXIT_INTERRUPTED = 130


class ArgumentParser(argparse.ArgumentParser):
    """argparse parser that raises UsageError instead of exiting with 2."""

    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(
        prog="main.py",
        description="Baroreflex model analysis",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("Usage:", 1)[1].split("Structure:", 1)[0].rstrip(),
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for solver detail")
    parser.add_argument("-l", "--list", action="store_true",
                        help="list subcommands and presets")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    for cmd in commands.list_commands():
        cmd.add_parser(subparsers)
    return parser


def setup_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="[%(name)s] %(message)s", stream=sys.stderr, force=True)


def list_everything() -> None:
    """Print subcommands by category, then the preset names."""
    for category in commands.get_categories():
        print(f"{category}:")
        for cmd in commands.list_commands(category):
            print("  " + commands.format_command_help(cmd).replace("\n", "\n  "))
        print()
    print("presets:")
    print("  " + "  ".join(preset_names()))


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv: List[str] = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        setup_logging(args.verbose)
        if args.list:
            list_everything()
            return EXIT_OK
        if not args.command:
            parser.print_help()
            return EXIT_USAGE
        status, _ = run_subcommand(args.command, args, ["main.py", *argv])
        return status
    except KeyboardInterrupt:
        print(info("interrupted"), file=sys.stderr)
        return EXIT_INTERRUPTED
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MayerWavesError, ValueError) as exc:
        log.debug("numerical failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
