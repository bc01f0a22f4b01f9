"""Decision quantities derived from a trajectory.

Event times (crossover, saturation) are located by linear interpolation
between the bracketing recorded samples.
"""

import logging
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from .exceptions import ValidationError
from .integrator import Trajectory
from .model import DEGENERACY_TOLERANCE, OutcomeClass, State, classify_outcome

logger = logging.getLogger(__name__)

DEFAULT_SATURATION_FRACTION = 0.95

ShareSeries = List[Tuple[float, Optional[float]]]


class Species(str, Enum):
    X = "x"
    Y = "y"


class ScenarioReport(BaseModel):
    """Analytics for one run."""

    model_config = ConfigDict(frozen=True)

    outcome: OutcomeClass
    crossover_t: Optional[float]
    y_peak: Tuple[float, float]
    y_share_peak_t: Optional[float]
    saturation_t: Optional[float]
    saturation_fraction: float
    final_state: State
    share_series: ShareSeries
    negative_samples: int = 0

    @property
    def final_share(self) -> Tuple[Optional[float], Optional[float]]:
        total = self.final_state.x + self.final_state.y
        if total == 0:
            return None, None
        return self.final_state.x / total, self.final_state.y / total


def _first_rise(values: np.ndarray, level: float) -> Optional[int]:
    """Index of the first sample at or above ``level``, or None."""
    hits = np.flatnonzero(values >= level)
    return int(hits[0]) if hits.size else None


def _interpolate(traj: Trajectory, values: np.ndarray, level: float) -> Optional[float]:
    """Time at which ``values`` first reaches ``level``, interpolated linearly.

    The result lies in (t[i-1], t[i]] for the first sample i at or above
    ``level``. A sample that hits ``level`` exactly is its own event time, so
    the right end of the bracket is included.
    """
    index = _first_rise(values, level)
    if index is None:
        return None
    if index == 0:
        return 0.0
    t0, t1 = traj.times[index - 1], traj.times[index]
    v0, v1 = values[index - 1], values[index]
    return float(t0 + (t1 - t0) * (level - v0) / (v1 - v0))


def crossover_time(traj: Trajectory) -> Optional[float]:
    """First time x catches up with y; 0 if x >= y from the start."""
    return _interpolate(traj, traj.xs - traj.ys, 0.0)


def peak(traj: Trajectory, which: Species = Species.Y) -> Tuple[float, float]:
    """Sample maximising the chosen species; earliest wins ties."""
    values = traj.xs if Species(which) is Species.X else traj.ys
    index = int(np.argmax(values))
    return float(traj.times[index]), float(values[index])


def saturation_time(
    traj: Trajectory, fraction: float = DEFAULT_SATURATION_FRACTION
) -> Optional[float]:
    """First time x reaches ``fraction`` of its carrying capacity n1."""
    if not 0 < fraction <= 1:
        raise ValidationError(f"Saturation fraction must be in (0, 1], got {fraction}")
    return _interpolate(traj, traj.xs, fraction * traj.params.n1)


def market_share(traj: Trajectory) -> ShareSeries:
    """Per-sample KN95 share x/(x+y); None where both counts are zero."""
    series: ShareSeries = []
    for t, x, y in zip(traj.times, traj.xs, traj.ys):
        total = x + y
        series.append((float(t), float(x / total) if total != 0 else None))
    return series


def share_decline_time(traj: Trajectory) -> Optional[float]:
    """Time at which the disposable share y/(x+y) peaks and starts to fall."""
    total = traj.xs + traj.ys
    defined = total != 0
    if not defined.any():
        return None
    shares = np.full(len(traj), -np.inf)
    shares[defined] = traj.ys[defined] / total[defined]
    return float(traj.times[int(np.argmax(shares))])


def analyze(
    traj: Trajectory,
    saturation_fraction: float = DEFAULT_SATURATION_FRACTION,
    degeneracy_tolerance: float = DEGENERACY_TOLERANCE,
) -> ScenarioReport:
    """Build the full report for one trajectory."""
    negatives = int(np.count_nonzero((traj.xs < 0) | (traj.ys < 0)))
    if negatives:
        logger.warning(
            "%d samples have negative counts; the step size is probably too large",
            negatives,
        )

    return ScenarioReport(
        outcome=classify_outcome(traj.params, tolerance=degeneracy_tolerance),
        crossover_t=crossover_time(traj),
        y_peak=peak(traj, Species.Y),
        y_share_peak_t=share_decline_time(traj),
        saturation_t=saturation_time(traj, saturation_fraction),
        saturation_fraction=saturation_fraction,
        final_state=traj.final_state,
        share_series=market_share(traj),
        negative_samples=negatives,
    )
