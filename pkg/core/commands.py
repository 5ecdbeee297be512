#!/usr/bin/env python3
"""
Subcommand Registry
-------------------
Declarative definitions of the CLI subcommands and their flags.

main.py builds its argparse tree from this registry; report.subcommands
binds a handler to each entry.

Usage:
    from core.commands import COMMANDS, get_command, format_command_help

    cmd = get_command("crossing")
    print(format_command_help(cmd))
"""

import argparse
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional


@dataclass
class CommandArg:
    """Command-line flag definition."""
    flag: str
    type: Callable[[str], Any] = float
    default: Any = None
    description: str = ""
    metavar: Optional[str] = None
    choices: List[Any] = field(default_factory=list)

    @property
    def dest(self) -> str:
        return self.flag.lstrip("-").replace("-", "_")


@dataclass
class Command:
    """
    Subcommand definition.

    - name: subcommand word (e.g. "sweep", "crossing")
    - description: one-line help
    - category: grouping for help output (analysis, simulation, report)
    - args: flags beyond the shared --config/--preset/--out
    - needs_model: whether a variant must come from --config or --preset
    - handler: bound later by report.subcommands
    """
    name: str
    description: str
    category: str = "analysis"
    args: List[CommandArg] = field(default_factory=list)
    needs_model: bool = True
    aliases: List[str] = field(default_factory=list)
    handler: Optional[Callable] = None

    def add_parser(self, subparsers) -> argparse.ArgumentParser:
        parser = subparsers.add_parser(self.name, help=self.description,
                                       description=self.description, aliases=self.aliases)
        parser.add_argument("--config", metavar="PATH", help="run config file (key = value lines)")
        parser.add_argument("--preset", metavar="NAME", help="named configuration from configs/variant")
        parser.add_argument("--out", metavar="DIR", help="directory for CSV/SVG output and manifest")
        for arg in self.args:
            kwargs: Dict[str, Any] = {
                "dest": arg.dest,
                "type": arg.type,
                "default": arg.default,
                "help": arg.description,
            }
            if arg.metavar:
                kwargs["metavar"] = arg.metavar
            if arg.choices:
                kwargs["choices"] = arg.choices
            parser.add_argument(arg.flag, **kwargs)
        parser.add_argument("overrides", nargs="*", metavar="KEY=VALUE",
                            help="overrides applied to --preset or the reproduce plan")
        parser.set_defaults(command=self.name)
        return parser


# ============================================================
# COMMAND REGISTRY
# ============================================================

COMMANDS: Dict[str, Command] = {}


def register(cmd: Command) -> Command:
    """Register a command."""
    COMMANDS[cmd.name] = cmd
    for alias in cmd.aliases:
        COMMANDS[alias] = cmd
    return cmd


def parse_triple(text: str) -> List[float]:
    """Parse "a,b,c" into three floats (argparse type for --init)."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated volumes, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number in {text!r}")


MU = CommandArg("--mu", float, None, "baroreflex gain", "X")
INIT = CommandArg("--init", parse_triple, None, "initial volumes v_sa,v_sv,v_pv", "a,b,c")
MU_MIN = CommandArg("--mu-min", float, None, "lower end of the gain grid", "X")
MU_MAX = CommandArg("--mu-max", float, None, "upper end of the gain grid", "X")
STEPS = CommandArg("--steps", int, None, "number of grid points", "N")
TOL = CommandArg("--tol", float, None, "bisection width in mu", "X")
WORKERS = CommandArg("--workers", int, None, "worker processes for grids", "N")


# ============================================================
# ANALYSIS COMMANDS
# ============================================================

register(Command(
    name="steady",
    description="Solve for the equilibrium at gain --mu",
    args=[MU, INIT],
))

register(Command(
    name="eigs",
    description="Eigenvalues of the linearization at the equilibrium",
    args=[MU, INIT],
    aliases=["eig"],
))

register(Command(
    name="sweep",
    description="Pair real part and imaginary part over a uniform gain grid",
    args=[MU_MIN, MU_MAX, STEPS, WORKERS],
))

register(Command(
    name="crossing",
    description="Locate the Hopf crossing gain by bisection",
    args=[
        CommandArg("--mu-lo", float, None, "bracket lower end", "X"),
        CommandArg("--mu-hi", float, None, "bracket upper end", "X"),
        TOL,
    ],
))

register(Command(
    name="scan",
    description="Stability verdict up to --mu-max, refining any crossing",
    args=[MU_MAX, STEPS, TOL, WORKERS],
))

register(Command(
    name="boundary",
    description="Crossing gain against the secondary constant (two-parameter map)",
    args=[
        CommandArg("--variant", str, "vd", "family: vd (unstressed volume) or csv (venous compliance)",
                   choices=["vd", "csv"]),
        CommandArg("--grid", int, 4, "number of secondary values", "N"),
        MU_MAX, STEPS, TOL, WORKERS,
    ],
    needs_model=False,
))


# ============================================================
# SIMULATION COMMANDS
# ============================================================

register(Command(
    name="simulate",
    description="Integrate with RK4 and classify the limit cycle",
    category="simulation",
    args=[
        MU, INIT,
        CommandArg("--dt", float, None, "step in minutes", "X"),
        CommandArg("--t-end", float, None, "horizon in minutes", "X"),
        CommandArg("--transient-fraction", float, None, "leading share discarded before peak analysis", "X"),
        CommandArg("--stride", int, None, "write every N-th sample to the CSV", "N"),
    ],
    aliases=["sim"],
))


# ============================================================
# REPORT COMMANDS
# ============================================================

register(Command(
    name="reproduce",
    description="Regenerate the figure data, crossing table and summary",
    category="report",
    args=[WORKERS],
    needs_model=False,
))


# ============================================================
# HELPER FUNCTIONS
# ============================================================

def get_command(name: str) -> Optional[Command]:
    """Get command by name or alias."""
    return COMMANDS.get(name.lower())


def list_commands(category: str = None) -> List[Command]:
    """List all commands, optionally filtered by category."""
    seen = set()
    result = []
    for cmd in COMMANDS.values():
        if cmd.name not in seen:
            if category is None or cmd.category == category:
                result.append(cmd)
            seen.add(cmd.name)
    return sorted(result, key=lambda c: (c.category, c.name))


def get_categories() -> List[str]:
    return sorted(set(cmd.category for cmd in COMMANDS.values()))


def format_command_help(cmd: Command) -> str:
    lines = [f"{cmd.name}: {cmd.description}"]
    if cmd.aliases:
        lines.append(f"  Aliases: {', '.join(cmd.aliases)}")
    if cmd.args:
        lines.append("  Flags:")
        for arg in cmd.args:
            default = f" (default: {arg.default})" if arg.default is not None else ""
            choices = f" [{', '.join(str(c) for c in arg.choices)}]" if arg.choices else ""
            lines.append(f"    {arg.flag}{choices}: {arg.description}{default}")
    return "\n".join(lines)
