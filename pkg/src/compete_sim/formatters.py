"""Text renderings of trajectories and reports, and atomic file output.

Everything here is locale independent: numbers are formatted with explicit
precision, '.' as decimal separator and LF line endings.
"""

import csv
import io
import os
import re
import tempfile
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict

from .analysis import ScenarioReport, market_share
from .exceptions import OutputError, ValidationError
from .integrator import Trajectory
from .model import MASKS_PER_UNIT
from .scenarios import ComparisonReport

TABLE_HEADER = "Evolution Time | Number of KN95 | Number of disposable masks"
TABLE_DECIMALS = 3
CSV_HEADER = ["t", "x", "y", "share"]
CSV_DECIMALS = 6


class OutputFormat(str, Enum):
    TABLE = "table"
    CSV = "csv"
    REPORT = "report"
    SVG = "svg"


class CsvRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: float
    x: float
    y: float
    share: Optional[float]


def round_half_away(value: float, places: int = TABLE_DECIMALS) -> str:
    """Decimal string rounded half away from zero."""
    quantum = Decimal(1).scaleb(-places)
    rounded = Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP)
    if rounded == 0:
        rounded = abs(rounded)
    return f"{rounded:f}"


def time_decimals(h: float) -> int:
    """Decimals needed to print multiples of ``h`` exactly (at least one)."""
    exponent = Decimal(repr(float(h))).normalize().as_tuple().exponent
    return max(1, -int(exponent))


def format_table(traj: Trajectory, interval: Optional[float] = None) -> str:
    """Table-1 style listing with values rounded to three decimals."""
    decimals = time_decimals(interval if interval is not None else traj.config.h)
    lines = [TABLE_HEADER]
    for t, x, y in zip(traj.times, traj.xs, traj.ys):
        lines.append(
            " | ".join(
                (
                    round_half_away(t, decimals),
                    round_half_away(x),
                    round_half_away(y),
                )
            )
        )
    return "\n".join(lines) + "\n"


def _fixed(value: float) -> str:
    return f"{value:.{CSV_DECIMALS}f}"


def format_csv(traj: Trajectory) -> str:
    """CSV with header ``t,x,y,share``; share is empty where x + y = 0."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for (t, share), x, y in zip(market_share(traj), traj.xs, traj.ys):
        writer.writerow(
            [
                _fixed(t),
                _fixed(x),
                _fixed(y),
                _fixed(share) if share is not None else "",
            ]
        )
    return buffer.getvalue()


def parse_csv(text: str) -> List[CsvRow]:
    """Read back CSV written by :func:`format_csv`."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != CSV_HEADER:
        raise ValidationError(
            f"Expected CSV header {','.join(CSV_HEADER)}, got {header}"
        )
    rows = []
    for record in reader:
        if not record:
            continue
        t, x, y, share = record
        rows.append(
            CsvRow(
                t=float(t),
                x=float(x),
                y=float(y),
                share=float(share) if share else None,
            )
        )
    return rows


def _time(value: Optional[float]) -> str:
    return "none" if value is None else _fixed(value)


def _count(value: float, raw_counts: bool) -> str:
    if raw_counts:
        return f"{value * MASKS_PER_UNIT:.0f}"
    return _fixed(value)


def format_report(
    name: str, report: ScenarioReport, raw_counts: bool = False
) -> str:
    """``key: value`` lines describing one scenario run."""
    share_x, share_y = report.final_share
    peak_t, peak_y = report.y_peak
    lines = [
        f"scenario: {name}",
        f"outcome: {report.outcome.value}",
        f"units: {'masks' if raw_counts else '1e4 masks'}",
        f"crossover: {_time(report.crossover_t)}",
        f"y-peak: {_count(peak_y, raw_counts)} at t={_fixed(peak_t)}",
        f"y-share-peak: {_time(report.y_share_peak_t)}",
        f"saturation-fraction: {report.saturation_fraction:g}",
        f"saturation: {_time(report.saturation_t)}",
        f"final-t: {_fixed(report.final_state.t)}",
        f"final-x: {_count(report.final_state.x, raw_counts)}",
        f"final-y: {_count(report.final_state.y, raw_counts)}",
        f"final-share-x: {_time(share_x)}",
        f"final-share-y: {_time(share_y)}",
        f"negative-samples: {report.negative_samples}",
    ]
    return "\n".join(lines) + "\n"


def format_comparison(comparison: ComparisonReport) -> str:
    """One summary line per scenario, then the fastest-saturating name."""
    lines = []
    for name, report in comparison.entries:
        share_x, _ = report.final_share
        lines.append(
            f"{name}: outcome={report.outcome.value} "
            f"crossover={_time(report.crossover_t)} "
            f"saturation={_time(report.saturation_t)} "
            f"final-share-x={_time(share_x)}"
        )
    lines.append(f"ordering: {', '.join(comparison.ordering)}")
    fastest = comparison.fastest_saturation
    lines.append(f"fastest-saturation: {fastest if fastest else 'none'}")
    return "\n".join(lines) + "\n"


def safe_name(name: str) -> str:
    safe = re.sub(r"[^a-zA-Z0-9_.=-]", "_", name)
    return re.sub(r"_+", "_", safe).strip("_")


def suffixed_path(path: Union[str, Path], name: str) -> Path:
    """``runs.csv`` + ``situation1`` -> ``runs_situation1.csv``."""
    path = Path(path)
    return path.with_name(f"{path.stem}_{safe_name(name)}{path.suffix}")


def write_atomic(path: Union[str, Path], text: str) -> Path:
    """Write UTF-8 text via a temporary file and rename it into place."""
    path = Path(path)
    tmp_name = None
    try:
        with tempfile.NamedTemporaryFile(
            "w",
            encoding="utf-8",
            newline="",
            dir=path.parent,
            prefix=f".{path.name}.",
            suffix=".tmp",
            delete=False,
        ) as tmp:
            tmp_name = tmp.name
            tmp.write(text)
        os.replace(tmp_name, path)
    except OSError as e:
        if tmp_name and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise OutputError(f"Could not write {path}: {e}")
    return path
