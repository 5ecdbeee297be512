"""
Writers
-------
CSV tables, SVG line plots and the run manifest.

CSV numbers are written with 17 significant digits ("%.17g"), so values
read back are bit-identical; missing values are written as a marker word
(nopair, failed, stable-up-to-mu-max). SVGs are standalone files with one
polyline per series.

Usage:
    from report.writers import Output, sweep_frame, write_outputs

    outputs = [Output.table("sweep.csv", sweep_frame(points))]
    manifest = write_outputs(outputs, "out/", command_line=sys.argv)
"""

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import yaml

from core import __version__
from core.types import BoundaryCurve, SweepPoint, Trajectory
from core.utils import CleanupContext

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.yaml"
NO_PAIR = "nopair"
FAILED = "failed"
SVG_MAX_POINTS = 2000


def fmt(value: Optional[float], missing: str = "") -> str:
    """Full-precision decimal text for a float."""
    if value is None:
        return missing
    return "%.17g" % value


# ============================================================
# TABLES
# ============================================================

def sweep_frame(points: Sequence[SweepPoint]) -> pd.DataFrame:
    rows = []
    for p in points:
        if p.failed:
            rows.append((fmt(p.mu), FAILED, FAILED, FAILED))
        else:
            rows.append((fmt(p.mu), fmt(p.pair_real_part, NO_PAIR),
                         fmt(p.pair_imag_part, NO_PAIR), fmt(p.real_eigenvalue, FAILED)))
    return pd.DataFrame(rows, columns=["mu", "pair_re", "pair_im", "real_eig"])


def trajectory_frame(traj: Trajectory, stride: int = 1) -> pd.DataFrame:
    idx = np.arange(0, len(traj), stride)
    states = traj.states[idx]
    return pd.DataFrame({
        "t_min": [fmt(t) for t in traj.times[idx]],
        "v_sa": [fmt(v) for v in states[:, 0]],
        "v_sv": [fmt(v) for v in states[:, 1]],
        "v_pv": [fmt(v) for v in states[:, 2]],
    })


def boundary_frame(curve: BoundaryCurve) -> pd.DataFrame:
    rows = []
    for p in curve.points:
        if p.mu_star is None:
            rows.append((fmt(p.secondary), p.marker, "", ""))
        else:
            rows.append((fmt(p.secondary), fmt(p.mu_star), fmt(p.omega_star), fmt(p.period_s)))
    return pd.DataFrame(rows, columns=["secondary", "mu_star", "omega", "period_s"])


def record_frame(record: Dict[str, Any]) -> pd.DataFrame:
    """One-row table; floats formatted at full precision."""
    formatted = {k: (fmt(v) if isinstance(v, float) else ("" if v is None else str(v)))
                 for k, v in record.items()}
    return pd.DataFrame([formatted], columns=list(record))


# ============================================================
# SVG
# ============================================================

@dataclass
class Series:
    label: str
    xs: Sequence[float]
    ys: Sequence[float]


def _finite_pairs(series: Series) -> List[Tuple[float, float]]:
    pairs = [(float(x), float(y)) for x, y in zip(series.xs, series.ys)
             if x is not None and y is not None and math.isfinite(x) and math.isfinite(y)]
    if len(pairs) > SVG_MAX_POINTS:
        step = math.ceil(len(pairs) / SVG_MAX_POINTS)
        pairs = pairs[::step] + ([pairs[-1]] if (len(pairs) - 1) % step else [])
    return pairs


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def svg_line_plot(series: Sequence[Series], title: str, x_label: str, y_label: str,
                  zero_line: bool = False, width: int = 640, height: int = 420) -> str:
    """Standalone SVG with axes, labels and one polyline per series."""
    left, right, top, bottom = 70, 20, 40, 55
    plot_w, plot_h = width - left - right, height - top - bottom
    data = [(s, _finite_pairs(s)) for s in series]
    xs = [x for _, pts in data for x, _ in pts] or [0.0, 1.0]
    ys = [y for _, pts in data for _, y in pts] or [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    def px(x: float) -> float:
        return left + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return top + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">{_escape(title)}</text>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 12}" text-anchor="middle">{_escape(x_label)}</text>',
        f'<text x="16" y="{top + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {top + plot_h / 2:.1f})">{_escape(y_label)}</text>',
        f'<text x="{left}" y="{top + plot_h + 18}" text-anchor="middle">{x_lo:.4g}</text>',
        f'<text x="{left + plot_w}" y="{top + plot_h + 18}" text-anchor="middle">{x_hi:.4g}</text>',
        f'<text x="{left - 6}" y="{top + plot_h + 4}" text-anchor="end">{y_lo:.4g}</text>',
        f'<text x="{left - 6}" y="{top + 4}" text-anchor="end">{y_hi:.4g}</text>',
    ]
    if zero_line and y_lo < 0.0 < y_hi:
        parts.append(f'<line x1="{left}" y1="{py(0.0):.2f}" x2="{left + plot_w}" y2="{py(0.0):.2f}" '
                     f'stroke="gray" stroke-dasharray="4 3"/>')

    for k, (s, pts) in enumerate(data):
        color = PALETTE[k % len(PALETTE)]
        if pts:
            coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        if len(data) > 1 or s.label:
            ly = top + 14 + 16 * k
            parts.append(f'<text x="{left + plot_w - 8}" y="{ly}" text-anchor="end" fill="{color}">'
                         f'{_escape(s.label)}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ============================================================
# OUTPUT + MANIFEST
# ============================================================

@dataclass
class Output:
    """One file to emit: a table (CSV) or text (SVG, summary)."""
    name: str
    table: Optional[pd.DataFrame] = None
    text: Optional[str] = None

    @classmethod
    def csv(cls, name: str, table: pd.DataFrame) -> "Output":
        return cls(name, table=table)

    @classmethod
    def document(cls, name: str, text: str) -> "Output":
        return cls(name, text=text)


@dataclass
class RunManifest:
    command_line: List[str]
    config: Dict[str, Any]
    version: str
    files: List[str] = field(default_factory=list)
    duration_s: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _write(path: Path, writer) -> None:
    try:
        writer(path)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}", str(path)) from exc


def write_outputs(outputs: Iterable[Output], out_dir: Union[str, Path],
                  command_line: Sequence[str] = (), config: Optional[Dict[str, Any]] = None,
                  started: Optional[float] = None) -> RunManifest:
    """Write every output into out_dir, then manifest.yaml listing them."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot create {out_dir}: {exc.strerror}", str(out_dir)) from exc

    outputs = list(outputs)
    names = [o.name for o in outputs]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates or MANIFEST_NAME in names:
        raise ValueError(f"output names must be unique: {duplicates or [MANIFEST_NAME]}")

    written: List[Path] = []
    with CleanupContext() as ctx:
        # an interrupted bundle leaves no files behind
        ctx.register(lambda: [p.unlink() for p in written if p.exists()])
        for output in outputs:
            path = out_dir / output.name
            if output.table is not None:
                _write(path, lambda p, t=output.table: t.to_csv(p, index=False, lineterminator="\n"))
            else:
                _write(path, lambda p, s=output.text or "": p.write_text(s, encoding="utf-8"))
            written.append(path)
            log.info("[Write] %s", path)

    manifest = RunManifest(
        command_line=list(command_line),
        config=config or {},
        version=__version__,
        files=names,
        duration_s=0.0 if started is None else round(time.perf_counter() - started, 3),
    )
    _write(out_dir / MANIFEST_NAME,
           lambda p: p.write_text(yaml.safe_dump(manifest.to_dict(), sort_keys=False), encoding="utf-8"))
    return manifest
