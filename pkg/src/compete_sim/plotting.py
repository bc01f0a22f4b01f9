"""Static SVG line charts of trajectories.

The chart geometry is computed here and rendered through a jinja2 template.
Coordinates are printed with fixed precision, so identical trajectories give
identical bytes.
"""

import logging
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from jinja2 import Environment, PackageLoader, select_autoescape
from pydantic import BaseModel, ConfigDict

from .formatters import OutputFormat, format_csv, write_atomic
from .integrator import Trajectory

logger = logging.getLogger(__name__)

WIDTH = 640
HEIGHT = 400
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 40
MARGIN_BOTTOM = 50
TICKS = 5

X_COLOR = "#1f77b4"
Y_COLOR = "#d62728"

_env = Environment(
    loader=PackageLoader("compete_sim", "templates"),
    autoescape=select_autoescape(["svg", "xml", "j2"]),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


class Series(BaseModel):
    model_config = ConfigDict(frozen=True)

    key: str
    label: str
    color: str
    xs: List[float]
    values: List[float]
    pixels: List[Tuple[str, str]]

    @property
    def points(self) -> str:
        return " ".join(f"{a},{b}" for a, b in self.pixels)


class Tick(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    position: str


class LineChart(BaseModel):
    """Everything the SVG template needs, already in pixel space."""

    model_config = ConfigDict(frozen=True)

    title: str
    x_label: str
    y_label: str
    width: int = WIDTH
    height: int = HEIGHT
    left: int = MARGIN_LEFT
    right: int = WIDTH - MARGIN_RIGHT
    top: int = MARGIN_TOP
    bottom: int = HEIGHT - MARGIN_BOTTOM
    x_ticks: List[Tick]
    y_ticks: List[Tick]
    series: List[Series]


def _px(value: float) -> str:
    return f"{value:.2f}"


def _domain(values: Sequence[float], floor_at_zero: bool) -> Tuple[float, float]:
    lo, hi = float(np.min(values)), float(np.max(values))
    if floor_at_zero:
        lo = min(lo, 0.0)
    if hi - lo <= 0:
        hi = lo + 1.0
    return lo, hi


Scale = Callable[[Sequence[float]], np.ndarray]


def _scale(lo: float, hi: float, start: float, end: float) -> Scale:
    span = hi - lo
    return lambda v: start + (np.asarray(v, dtype=float) - lo) / span * (end - start)


def _ticks(lo: float, hi: float, to_px: Scale) -> List[Tick]:
    return [
        Tick(label=f"{value:g}", position=_px(float(to_px(value))))
        for value in np.round(np.linspace(lo, hi, TICKS), 6)
    ]


def _series(
    key: str,
    label: str,
    color: str,
    xs: Sequence[float],
    values: Sequence[float],
    to_x: Scale,
    to_y: Scale,
) -> Series:
    pixels = [(_px(a), _px(b)) for a, b in zip(to_x(xs), to_y(values))]
    return Series(
        key=key,
        label=label,
        color=color,
        xs=[float(v) for v in xs],
        values=[float(v) for v in values],
        pixels=pixels,
    )


def build_chart(
    traj: Trajectory, title: Optional[str] = None, phase: bool = False
) -> LineChart:
    """Chart model for x(t) and y(t), or the (x, y) phase path."""
    if len(traj) == 0:
        raise ValueError("Cannot chart an empty trajectory")

    left, right = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    top, bottom = MARGIN_TOP, HEIGHT - MARGIN_BOTTOM

    if phase:
        x_lo, x_hi = _domain(traj.xs, floor_at_zero=True)
        y_lo, y_hi = _domain(traj.ys, floor_at_zero=True)
        to_x = _scale(x_lo, x_hi, left, right)
        to_y = _scale(y_lo, y_hi, bottom, top)
        series = [
            _series(
                "phase", "(KN95, disposable)", X_COLOR, traj.xs, traj.ys, to_x, to_y
            )
        ]
        x_label, y_label = "KN95 masks (1e4)", "Disposable masks (1e4)"
        default_title = "Phase path of the two mask types"
    else:
        x_lo, x_hi = _domain(traj.times, floor_at_zero=False)
        y_lo, y_hi = _domain(np.concatenate([traj.xs, traj.ys]), floor_at_zero=True)
        to_x = _scale(x_lo, x_hi, left, right)
        to_y = _scale(y_lo, y_hi, bottom, top)
        series = [
            _series("x", "KN95", X_COLOR, traj.times, traj.xs, to_x, to_y),
            _series("y", "Disposable", Y_COLOR, traj.times, traj.ys, to_x, to_y),
        ]
        x_label, y_label = "Time", "Masks (1e4)"
        default_title = "Evolution of the two mask types"

    return LineChart(
        title=title or default_title,
        x_label=x_label,
        y_label=y_label,
        x_ticks=_ticks(x_lo, x_hi, to_x),
        y_ticks=_ticks(y_lo, y_hi, to_y),
        series=series,
    )


def render_svg(chart: LineChart) -> str:
    return _env.get_template("line_chart.svg.j2").render(chart=chart)


def emit_plot(
    traj: Trajectory,
    path: Union[str, Path],
    fmt: OutputFormat = OutputFormat.SVG,
    title: Optional[str] = None,
    phase: bool = False,
) -> Path:
    """Write an SVG chart, or plot-ready CSV columns, atomically to ``path``."""
    if OutputFormat(fmt) is OutputFormat.CSV:
        text = format_csv(traj)
    else:
        text = render_svg(build_chart(traj, title=title, phase=phase))
    written = write_atomic(path, text)
    logger.debug("Wrote %s chart to %s", OutputFormat(fmt).value, written)
    return written
