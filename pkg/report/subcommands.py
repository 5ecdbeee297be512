"""
Subcommand handlers
-------------------
One handler per entry of core.commands.COMMANDS. A handler gets the
resolved RunConfig (None for commands that need no model) and the parsed
flags, and returns the stdout lines plus the files to write under --out.

run_subcommand() resolves the config, applies flags, calls the handler,
prints, and writes outputs with a manifest.
"""

import argparse
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import pandas as pd

from core import commands
from core.bifurcation import boundary_curve, find_crossing, stability_scan, sweep_mu
from core.console import error, format_real_part, info, success, warning
from core.dynamics import detect_cycle, integrate
from core.equilibrium import solve_equilibrium
from core.errors import MayerWavesError
from core.model import observables
from core.spectral import classify_at_equilibrium
from core.types import (
    BoundaryFamily,
    CardioParams,
    ControlVariant,
    CycleKind,
    RESTING_STATE,
    ScanKind,
    VolumeState,
)

from .config import RunConfig, load_preset, parse_config
from .reproduce import run_reproduce
from .writers import (
    Output,
    RunManifest,
    Series,
    boundary_frame,
    fmt,
    record_frame,
    svg_line_plot,
    sweep_frame,
    trajectory_frame,
    write_outputs,
)

log = logging.getLogger(__name__)

# fig3c start
DEFAULT_SIMULATION_START = VolumeState(1.0, 3.4, 0.5)


class UsageError(MayerWavesError, ValueError):
    """Missing or conflicting command-line input."""


@dataclass
class CommandResult:
    lines: List[str] = field(default_factory=list)
    outputs: List[Output] = field(default_factory=list)


Handler = Callable[[Optional[RunConfig], argparse.Namespace], CommandResult]


def bind(name: str) -> Callable[[Handler], Handler]:
    """Attach a handler to a registered command."""
    def decorator(func: Handler) -> Handler:
        commands.get_command(name).handler = func
        return func
    return decorator


def _gain(config: RunConfig) -> float:
    if config.mu is not None:
        return config.mu
    if config.variant.is_active:
        raise UsageError("a gain is required: pass --mu or set mu in the config")
    return 1.0


def _guess(args: argparse.Namespace, default: VolumeState) -> VolumeState:
    init = getattr(args, "init", None)
    return VolumeState.from_sequence(init) if init else default


def _observable_line(config: RunConfig, mu: float, state: VolumeState) -> str:
    obs = observables(config.params, config.variant, mu, state)
    return (f"p_sa={obs.p_sa:.6g} mmHg p_sv={obs.p_sv:.6g} mmHg "
            f"cardiac_output={obs.cardiac_output:.6g} l/min activity={obs.b:.6g}")


# ============================================================
# ANALYSIS
# ============================================================

@bind("steady")
def steady(config: RunConfig, args: argparse.Namespace) -> CommandResult:
    mu = _gain(config)
    result = solve_equilibrium(config.params, config.variant, mu, _guess(args, RESTING_STATE))
    s = result.state
    return CommandResult(
        lines=[
            success(f"equilibrium v_sa={s.v_sa:.12g} v_sv={s.v_sv:.12g} v_pv={s.v_pv:.12g}"),
            f"residual={result.residual_norm:.3e} l/min iterations={result.iterations}",
            _observable_line(config, mu, s),
        ],
        outputs=[Output.csv("steady.csv", record_frame({
            "mu": mu, "v_sa": s.v_sa, "v_sv": s.v_sv, "v_pv": s.v_pv,
            "residual_norm": result.residual_norm, "iterations": result.iterations,
        }))],
    )


@bind("eigs")
def eigs(config: RunConfig, args: argparse.Namespace) -> CommandResult:
    mu = _gain(config)
    spectrum = classify_at_equilibrium(config.params, config.variant, mu, _guess(args, RESTING_STATE))
    lines = [info(f"{config.variant.label()} mu={mu:g}: {spectrum.kind.value}"
                  + (" (degenerate)" if spectrum.degenerate else ""))]
    for k, lam in enumerate(spectrum.eigenvalues, start=1):
        lines.append(f"lambda{k} = {lam.real:+.10g} {lam.imag:+.10g}i")
    if spectrum.has_pair:
        lines.append(f"pair real part {format_real_part(spectrum.pair_real_part)} /min, "
                     f"omega {spectrum.pair_imag_part:.6g} rad/min")
    table = pd.DataFrame([(fmt(lam.real), fmt(lam.imag)) for lam in spectrum.eigenvalues],
                         columns=["re", "im"])
    return CommandResult(lines, [Output.csv("eigs.csv", table)])


@bind("sweep")
def sweep(config: RunConfig, args: argparse.Namespace) -> CommandResult:
    s = config.settings
    points = sweep_mu(config.params, config.variant, s.mu_min, s.mu_max, s.steps, s.workers)
    with_pair = [p for p in points if p.has_pair]
    lines = [info(f"{config.variant.label()}: {len(points)} points on [{s.mu_min:g}, {s.mu_max:g}], "
                  f"{len(points) - len(with_pair)} without a conjugate pair")]
    for prev, cur in zip(with_pair, with_pair[1:]):
        if (prev.pair_real_part < 0.0) != (cur.pair_real_part < 0.0):
            lines.append(f"sign change between mu={prev.mu:.6g} and mu={cur.mu:.6g}")
    series = Series("pair real part", [p.mu for p in with_pair], [p.pair_real_part for p in with_pair])
    return CommandResult(lines, [
        Output.csv("sweep.csv", sweep_frame(points)),
        Output.document("sweep.svg", svg_line_plot(
            [series], config.variant.label(), "gain mu", "Re(lambda) [1/min]", zero_line=True)),
    ])


@bind("crossing")
def crossing(config: RunConfig, args: argparse.Namespace) -> CommandResult:
    mu_lo = args.mu_lo if args.mu_lo is not None else config.settings.mu_min
    mu_hi = args.mu_hi if args.mu_hi is not None else config.settings.mu_max
    c = find_crossing(config.params, config.variant, mu_lo, mu_hi, config.settings.tol)
    lines = [
        f"mu_star={c.mu_star:.6f} omega={c.omega_star:.4f} rad/min period={c.period_s:.3f} s",
        f"frequency={c.frequency_hz:.4f} Hz bisections={c.bisection_iterations}",
    ]
    if not c.in_mayer_band():
        lines.append(warning("period lies outside the 7-12 s Mayer-wave band"))
    return CommandResult(lines, [Output.csv("crossing.csv", record_frame({
        "mu_star": c.mu_star, "omega": c.omega_star, "period_s": c.period_s,
        "mu_lo": c.bracket[0], "mu_hi": c.bracket[1], "iterations": c.bisection_iterations,
    }))])


@bind("scan")
def scan(config: RunConfig, args: argparse.Namespace) -> CommandResult:
    s = config.settings
    verdict = stability_scan(config.params, config.variant, s.mu_max_scan, s.steps, s.tol, s.workers)
    max_re = "n/a" if verdict.max_pair_real_part is None else format_real_part(verdict.max_pair_real_part)
    head = f"{config.variant.label()}: {verdict.kind.value} (mu_max={s.mu_max_scan:g}, max pair Re {max_re})"
    lines = [success(head) if verdict.is_stable else warning(head)]
    record = {"verdict": verdict.kind.value, "mu_max": verdict.mu_max,
              "max_pair_re": verdict.max_pair_real_part, "mu_star": None, "omega": None,
              "period_s": None}
    if verdict.kind is ScanKind.CROSSING:
        c = verdict.crossing
        lines.append(f"mu_star={c.mu_star:.6f} omega={c.omega_star:.4f} rad/min period={c.period_s:.3f} s")
        record.update(mu_star=c.mu_star, omega=c.omega_star, period_s=c.period_s)
    return CommandResult(lines, [Output.csv("scan.csv", record_frame(record))])


@bind("boundary")
def boundary(config: RunConfig, args: argparse.Namespace) -> CommandResult:
    params, s = config.params, config.settings
    family = BoundaryFamily(args.variant)
    if args.grid < 1:
        raise UsageError(f"--grid must be at least 1, got {args.grid}")
    curve = boundary_curve(params, family, family.grid(args.grid, params), s.mu_max_scan,
                           s.steps, s.tol, s.workers)
    lines = []
    for p in curve.points:
        if p.mu_star is None:
            lines.append(f"secondary={p.secondary:.6g} {p.marker}")
        else:
            lines.append(f"secondary={p.secondary:.6g} mu_star={p.mu_star:.6f} "
                         f"omega={p.omega_star:.4f} rad/min period={p.period_s:.3f} s")
    if not curve.is_strictly_increasing():
        lines.append(warning("crossing gain is not strictly increasing along the grid"))
    found = curve.crossings()
    series = Series(family.value, [p.mu_star for p in found], [p.secondary for p in found])
    return CommandResult(lines, [
        Output.csv("boundary.csv", boundary_frame(curve)),
        Output.document("boundary.svg", svg_line_plot(
            [series], f"stability boundary ({family.value})", "crossing gain mu*", "secondary constant")),
    ])


# ============================================================
# SIMULATION
# ============================================================

@bind("simulate")
def simulate(config: RunConfig, args: argparse.Namespace) -> CommandResult:
    mu = _gain(config)
    s = config.settings
    traj = integrate(config.params, config.variant, mu, _guess(args, DEFAULT_SIMULATION_START),
                     s.dt, s.t_end)
    report = detect_cycle(traj, s.transient_fraction)
    period = "n/a" if report.period_s is None else f"{report.period_s:.3f} s"
    head = (f"cycle={report.classification.value} amplitude={report.amplitude:.6g} litres "
            f"period={period} peaks={len(report.peak_times)}")
    lines = [error(head) if report.classification is CycleKind.INCONCLUSIVE else success(head),
             _observable_line(config, mu, traj.final_state)]
    return CommandResult(lines, [
        Output.csv("trajectory.csv", trajectory_frame(traj, s.stride)),
        Output.document("trajectory.svg", svg_line_plot(
            [Series("trajectory", traj.states[:, 0], traj.states[:, 1])],
            f"{config.variant.label()} mu={mu:g}", "v_sa [litres]", "v_sv [litres]")),
    ])


# ============================================================
# DISPATCH
# ============================================================

def _flag_settings(name: str, args: argparse.Namespace) -> dict:
    """Map command-line flags onto AnalysisSettings fields."""
    settings = {
        "steps": getattr(args, "steps", None),
        "tol": getattr(args, "tol", None),
        "workers": getattr(args, "workers", None),
        "dt": getattr(args, "dt", None),
        "t_end": getattr(args, "t_end", None),
        "transient_fraction": getattr(args, "transient_fraction", None),
        "stride": getattr(args, "stride", None),
    }
    if name in ("scan", "boundary"):
        settings["mu_max_scan"] = getattr(args, "mu_max", None)
    else:
        settings["mu_min"] = getattr(args, "mu_min", None)
        settings["mu_max"] = getattr(args, "mu_max", None)
    return settings


def resolve_config(cmd: commands.Command, args: argparse.Namespace) -> Optional[RunConfig]:
    overrides = list(getattr(args, "overrides", []) or [])
    if args.config and args.preset:
        raise UsageError("--config and --preset are mutually exclusive")
    if args.config:
        if overrides:
            raise UsageError("KEY=VALUE overrides apply to --preset only")
        config = parse_config(args.config)
    elif args.preset:
        config = load_preset(args.preset, overrides)
    elif cmd.needs_model:
        raise UsageError(f"{cmd.name} needs --config PATH or --preset NAME")
    else:
        config = None
    if config is None:
        return None
    return config.with_flags(mu=getattr(args, "mu", None), **_flag_settings(cmd.name, args))


def run_subcommand(name: str, args: argparse.Namespace,
                   argv: Sequence[str] = ()) -> Tuple[int, Optional[RunManifest]]:
    """Run one subcommand: print its summary, write its files. Returns (status, manifest)."""
    started = time.perf_counter()
    cmd = commands.get_command(name)
    if cmd is None:
        raise UsageError(f"unknown subcommand {name!r}")

    if cmd.name == "reproduce":
        if not args.out:
            raise UsageError("reproduce needs --out DIR")
        if args.config or args.preset:
            raise UsageError("reproduce takes KEY=VALUE plan overrides, not --config/--preset")
        manifest = run_reproduce(args.out, args.overrides, argv, workers=args.workers)
        print(success(f"wrote {len(manifest.files)} files to {args.out} in {manifest.duration_s:.1f} s"))
        return 0, manifest

    config = resolve_config(cmd, args)
    if config is None:
        config = RunConfig(CardioParams(), ControlVariant.linear()).with_flags(**_flag_settings(cmd.name, args))
    result = cmd.handler(config, args)
    for line in result.lines:
        print(line)

    manifest = None
    if args.out and result.outputs:
        snapshot = config.snapshot()
        manifest = write_outputs(result.outputs, args.out, argv, snapshot, started)
        print(info(f"wrote {len(manifest.files)} files to {args.out}"))
    return 0, manifest
