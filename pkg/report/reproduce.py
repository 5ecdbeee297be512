"""
Reproduce
---------
One-shot regeneration of the figure data from configs/reproduce.yaml:

    fig1a-fig1d   Re(lambda) vs mu, unstressed-volume control
    fig2a-fig2c   Re(lambda) vs mu, venous-compliance control
    fig3a-fig3c   phase portraits at mu = 10 and mu = 20
    fig4_vd/csv   crossing gain vs secondary constant
    crossings     crossing points of the seven vd/csv presets
    summary.txt   crossing table and cycle verdicts, rendered from crossings.csv rows

Each figure gets a CSV and an SVG; manifest.yaml lists everything.
"""

import logging
import math
import time
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from omegaconf import OmegaConf

from core.bifurcation import boundary_curve, stability_scan, sweep_mu
from core.dynamics import detect_cycle, integrate
from core.types import (
    BoundaryCurve,
    BoundaryFamily,
    BoundaryPoint,
    CardioParams,
    ControlKind,
    ControlVariant,
    CycleReport,
    Trajectory,
    VolumeState,
)
from core.utils import ordered_map

from .config import ConfigError, compose_config, load_preset
from .writers import (
    Output,
    RunManifest,
    Series,
    boundary_frame,
    fmt,
    svg_line_plot,
    sweep_frame,
    trajectory_frame,
    write_outputs,
)

log = logging.getLogger(__name__)

FAMILY_OF = {
    ControlKind.UNSTRESSED_VOLUME: BoundaryFamily.UNSTRESSED_VOLUME,
    ControlKind.VENOUS_COMPLIANCE: BoundaryFamily.VENOUS_COMPLIANCE,
}
SECONDARY_LABEL = {
    BoundaryFamily.UNSTRESSED_VOLUME: "D2 [litres]",
    BoundaryFamily.VENOUS_COMPLIANCE: "C2 [litres/mmHg]",
}


def _simulate(task: Tuple[CardioParams, ControlVariant, float, VolumeState, float, float, float]
              ) -> Tuple[Trajectory, CycleReport]:
    params, variant, mu, initial, dt, t_end, transient = task
    traj = integrate(params, variant, mu, initial, dt, t_end)
    return traj, detect_cycle(traj, transient)


def _sweep_outputs(plan, workers: int) -> List[Output]:
    outputs = []
    for name, preset in plan.sweeps.items():
        cfg = load_preset(preset)
        points = sweep_mu(cfg.params, cfg.variant, plan.sweep.mu_min, plan.sweep.mu_max,
                          plan.sweep.steps, workers)
        with_pair = [p for p in points if p.has_pair]
        series = Series("pair real part", [p.mu for p in with_pair],
                        [p.pair_real_part for p in with_pair])
        outputs.append(Output.csv(f"{name}.csv", sweep_frame(points)))
        outputs.append(Output.document(f"{name}.svg", svg_line_plot(
            [series], f"{name}: {cfg.variant.label()}", "gain mu", "Re(lambda) [1/min]",
            zero_line=True)))
    return outputs


def _simulation_outputs(plan, workers: int) -> Tuple[List[Output], List[str]]:
    names, tasks, labels = [], [], []
    for name, sim in plan.simulations.items():
        cfg = load_preset(sim.preset)
        initial = VolumeState.from_sequence(list(sim.init))
        tasks.append((cfg.params, cfg.variant, float(sim.mu), initial,
                      plan.simulation.dt, plan.simulation.t_end, plan.simulation.transient_fraction))
        names.append(name)
        labels.append(cfg.variant.label())

    outputs, verdicts = [], []
    for name, label, (traj, report) in zip(names, labels, ordered_map(_simulate, tasks, workers)):
        outputs.append(Output.csv(f"{name}.csv", trajectory_frame(traj, plan.simulation.stride)))
        outputs.append(Output.document(f"{name}.svg", svg_line_plot(
            [Series("trajectory", traj.states[:, 0], traj.states[:, 1])],
            f"{name}: {label}", "v_sa [litres]", "v_sv [litres]")))
        verdicts.append(f"{name}: {report.classification.value}")
    return outputs, verdicts


def _boundary_outputs(plan, workers: int) -> Tuple[List[Output], Dict[BoundaryFamily, BoundaryCurve]]:
    params = CardioParams()
    outputs, curves = [], {}
    for name, family_name in plan.boundaries.items():
        family = BoundaryFamily(family_name)
        count = plan.boundary.vd_grid if family is BoundaryFamily.UNSTRESSED_VOLUME else plan.boundary.csv_grid
        curve = boundary_curve(params, family, family.grid(count, params), plan.boundary.mu_max,
                               plan.boundary.points, plan.boundary.tol, workers)
        curves[family] = curve
        found = curve.crossings()
        series = Series(family.value, [p.mu_star for p in found], [p.secondary for p in found])
        outputs.append(Output.csv(f"{name}.csv", boundary_frame(curve)))
        outputs.append(Output.document(f"{name}.svg", svg_line_plot(
            [series], f"{name}: stability boundary", "crossing gain mu*", SECONDARY_LABEL[family])))
    return outputs, curves


def _crossing_point(plan, variant: ControlVariant, curves: Dict[BoundaryFamily, BoundaryCurve]
                    ) -> BoundaryPoint:
    family = FAMILY_OF[variant.kind]
    for point in curves.get(family, BoundaryCurve(family, 0.0)).points:
        if math.isclose(point.secondary, variant.x2, rel_tol=0.0, abs_tol=1e-12):
            return point
    params = CardioParams()
    verdict = stability_scan(params, family.variant_for(variant.x2, params), plan.boundary.mu_max,
                             plan.boundary.points, plan.boundary.tol)
    if verdict.crossing is None:
        return BoundaryPoint(variant.x2, None, verdict=verdict.kind)
    c = verdict.crossing
    return BoundaryPoint(variant.x2, c.mu_star, c.omega_star, c.period_s)


def _crossing_outputs(plan, curves: Dict[BoundaryFamily, BoundaryCurve]
                      ) -> Tuple[List[Output], List[Dict[str, str]]]:
    rows: List[Dict[str, str]] = []
    by_family: Dict[BoundaryFamily, List[BoundaryPoint]] = {}
    for preset in plan.crossings:
        cfg = load_preset(preset)
        if cfg.variant.kind not in FAMILY_OF:
            raise ConfigError(f"{preset} is not an unstressed-volume or venous-compliance preset",
                              "configs/reproduce.yaml", key="crossings")
        family = FAMILY_OF[cfg.variant.kind]
        point = _crossing_point(plan, cfg.variant, curves)
        by_family.setdefault(family, []).append(point)
        rows.append({
            "config": preset,
            "family": family.value,
            "x1": fmt(cfg.variant.x1),
            "x2": fmt(cfg.variant.x2),
            "mu_star": fmt(point.mu_star, point.marker),
            "omega": fmt(point.omega_star),
            "period_s": fmt(point.period_s),
        })

    series = [
        Series(family.value, [p.secondary for p in pts if p.mu_star is not None],
               [p.mu_star for p in pts if p.mu_star is not None])
        for family, pts in by_family.items()
    ]
    table = pd.DataFrame(rows, columns=["config", "family", "x1", "x2", "mu_star", "omega", "period_s"])
    return [
        Output.csv("crossings.csv", table),
        Output.document("crossings.svg", svg_line_plot(
            series, "Hopf crossing points", "secondary constant", "crossing gain mu*")),
    ], rows


def render_summary(rows: Sequence[Dict[str, str]], verdicts: Sequence[str]) -> str:
    lines = ["Hopf crossing points (mu_star, omega in rad/min, period in s)", ""]
    for row in rows:
        lines.append(
            f"{row['config']:<10} {row['family']:<4} x1={row['x1']} x2={row['x2']} "
            f"mu_star={row['mu_star']} omega={row['omega']} period_s={row['period_s']}"
        )
    lines += ["", "Phase portraits", ""]
    lines += list(verdicts)
    return "\n".join(lines) + "\n"


def run_reproduce(out_dir, overrides: Sequence[str] = (), command_line: Sequence[str] = (),
                  workers: Optional[int] = None) -> RunManifest:
    """Compose the plan, compute every figure and write the bundle to out_dir."""
    started = time.perf_counter()
    plan = compose_config("reproduce", overrides)
    workers = workers or int(plan.workers)
    log.info("[Reproduce] writing to %s with %d worker(s)", out_dir, workers)

    outputs = _sweep_outputs(plan, workers)
    sim_outputs, verdicts = _simulation_outputs(plan, workers)
    outputs += sim_outputs
    boundary_outputs, curves = _boundary_outputs(plan, workers)
    outputs += boundary_outputs
    crossing_outputs, rows = _crossing_outputs(plan, curves)
    outputs += crossing_outputs
    outputs.append(Output.document("summary.txt", render_summary(rows, verdicts)))

    snapshot: Dict[str, Any] = OmegaConf.to_container(plan, resolve=True)
    return write_outputs(outputs, out_dir, command_line, snapshot, started)
