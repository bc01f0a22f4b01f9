"""Fixed-step integration of the competition system.

Fourth-order Runge-Kutta is the primary method; forward Euler is kept as a
baseline and cross-check. Both advance the coupled [x, y] vector together, so
every RK4 stage evaluates both rates at the same intermediate state.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .exceptions import (
    IndistinguishablePrecisionError,
    NonFiniteStateError,
    StepBudgetExceededError,
    ValidationError,
)
from .model import ModelParams, State, rates

logger = logging.getLogger(__name__)

MAX_STEPS = 10**8
PRECISION_FLOOR = 1e-13
SETTLE_RATE_TOLERANCE = 1e-9
SETTLE_MAX_TIME = 10_000.0

# slack when deciding whether t_end is a whole number of steps
_GRID_SLACK = 1e-9


class Method(str, Enum):
    RK4 = "rk4"
    EULER = "euler"


class SolverConfig(BaseModel):
    """Integration method, step size h, horizon and output stride."""

    model_config = ConfigDict(frozen=True)

    method: Method = Method.RK4
    h: float = Field(default=0.1, gt=0)
    t_end: float = Field(default=1.0, gt=0)
    record_stride: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _horizon_covers_a_step(self) -> "SolverConfig":
        if self.t_end < self.h:
            raise ValueError("t_end must be ≥ h")
        return self

    @property
    def full_steps(self) -> int:
        return int(math.floor(self.t_end / self.h + _GRID_SLACK))

    @property
    def remainder(self) -> float:
        """Length of the shortened final step, 0 when t_end is on the grid."""
        rest = self.t_end - self.full_steps * self.h
        return rest if rest > self.h * _GRID_SLACK else 0.0

    @property
    def steps(self) -> int:
        return self.full_steps + (1 if self.remainder else 0)


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of one integration run."""

    params: ModelParams
    config: SolverConfig
    times: np.ndarray
    xs: np.ndarray
    ys: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def state(self, index: int) -> State:
        return State(
            t=float(self.times[index]),
            x=float(self.xs[index]),
            y=float(self.ys[index]),
        )

    @property
    def samples(self) -> List[State]:
        return [self.state(i) for i in range(len(self))]

    @property
    def final_state(self) -> State:
        return self.state(len(self) - 1)

    @property
    def t_end(self) -> float:
        return float(self.times[-1])


Stepper = Callable[[ModelParams, np.ndarray, float], np.ndarray]


def _euler(p: ModelParams, u: np.ndarray, h: float) -> np.ndarray:
    return u + h * rates(p, u)


def _rk4(p: ModelParams, u: np.ndarray, h: float) -> np.ndarray:
    k1 = rates(p, u)
    k2 = rates(p, u + (h / 2) * k1)
    k3 = rates(p, u + (h / 2) * k2)
    k4 = rates(p, u + h * k3)
    return u + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


STEPPERS: Dict[Method, Stepper] = {
    Method.RK4: _rk4,
    Method.EULER: _euler,
}


def _require_positive_step(h: float) -> None:
    if not h > 0:
        raise ValidationError(f"Step size must be positive, got {h}")


def euler_step(p: ModelParams, s: State, h: float) -> State:
    """One forward-Euler step: u + h * f(u)."""
    _require_positive_step(h)
    return State.from_array(s.t + h, _euler(p, s.as_array(), h))


def rk4_step(p: ModelParams, s: State, h: float) -> State:
    """One classical RK4 step on the coupled system."""
    _require_positive_step(h)
    return State.from_array(s.t + h, _rk4(p, s.as_array(), h))


def _check_budget(cfg: SolverConfig, max_steps: int) -> None:
    if cfg.t_end / cfg.h > max_steps:
        raise StepBudgetExceededError(
            f"t_end/h = {cfg.t_end / cfg.h:.3g} exceeds the step budget "
            f"of {max_steps}"
        )


def _march(
    p: ModelParams,
    u0: np.ndarray,
    t0: float,
    cfg: SolverConfig,
    step_offset: int = 0,
) -> Tuple[List[float], List[np.ndarray]]:
    """Step from (t0, u0) over cfg.t_end, returning the recorded points.

    The first recorded point is the start; the last is always the end state.
    """
    stepper = STEPPERS[Method(cfg.method)]
    full, rest, total = cfg.full_steps, cfg.remainder, cfg.steps
    stride = cfg.record_stride

    times = [t0]
    points = [u0]
    u = u0
    for i in range(1, total + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            u = stepper(p, u, cfg.h if i <= full else rest)
        t = t0 + i * cfg.h if i <= full else t0 + cfg.t_end
        if not np.isfinite(u).all():
            raise NonFiniteStateError(step_offset + i, t)
        if i % stride == 0 or i == total:
            times.append(t)
            points.append(u)
    return times, points


def _as_trajectory(
    p: ModelParams, cfg: SolverConfig, times: List[float], points: List[np.ndarray]
) -> Trajectory:
    stacked = np.vstack(points)
    return Trajectory(
        params=p,
        config=cfg,
        times=np.asarray(times, dtype=float),
        xs=stacked[:, 0].copy(),
        ys=stacked[:, 1].copy(),
    )


def integrate(
    p: ModelParams,
    s0: State,
    cfg: SolverConfig,
    max_steps: int = MAX_STEPS,
) -> Trajectory:
    """Integrate from ``s0`` (at t=0) to ``cfg.t_end`` with a fixed step."""
    if s0.t != 0:
        raise ValidationError(f"Initial state must be at t=0, got t={s0.t}")
    _check_budget(cfg, max_steps)

    logger.debug(
        "Integrating %s h=%g t_end=%g from (%g, %g)",
        cfg.method.value, cfg.h, cfg.t_end, s0.x, s0.y,
    )
    times, points = _march(p, s0.as_array(), 0.0, cfg)
    return _as_trajectory(p, cfg, times, points)


def settle(
    p: ModelParams,
    s0: State,
    cfg: SolverConfig,
    rate_tolerance: float = SETTLE_RATE_TOLERANCE,
    max_time: float = SETTLE_MAX_TIME,
    max_steps: int = MAX_STEPS,
) -> Trajectory:
    """Integrate in chunks of ``cfg.t_end`` until the flow has come to rest.

    Stops once the vector-field magnitude at the last state is below
    ``rate_tolerance`` per unit time, or when ``max_time`` is reached.
    """
    if s0.t != 0:
        raise ValidationError(f"Initial state must be at t=0, got t={s0.t}")
    _check_budget(cfg, max_steps)

    times: List[float] = [0.0]
    points: List[np.ndarray] = [s0.as_array()]
    while True:
        chunk_times, chunk_points = _march(
            p, points[-1], times[-1], cfg, step_offset=len(times) - 1
        )
        times.extend(chunk_times[1:])
        points.extend(chunk_points[1:])

        speed = float(np.hypot(*rates(p, points[-1])))
        if speed < rate_tolerance:
            break
        if times[-1] >= max_time:
            logger.warning(
                "Flow not settled by t=%g (speed %.3g > %.3g)",
                times[-1], speed, rate_tolerance,
            )
            break

    settled = cfg.model_copy(update={"t_end": times[-1]})
    return _as_trajectory(p, settled, times, points)


class ConvergenceEstimate(BaseModel):
    """Observed order of accuracy per component."""

    model_config = ConfigDict(frozen=True)

    method: Method
    order_x: float
    order_y: float

    @property
    def order(self) -> float:
        return min(self.order_x, self.order_y)


def convergence_order(
    p: ModelParams,
    s0: State,
    t_probe: float,
    h_coarse: float,
    method: Method = Method.RK4,
    precision_floor: float = PRECISION_FLOOR,
    max_steps: int = MAX_STEPS,
) -> ConvergenceEstimate:
    """Self-convergence study at ``t_probe`` using steps h, h/2 and h/4.

    The order per component is log2(|u(h) - u(h/2)| / |u(h/2) - u(h/4)|).
    ``t_probe`` must be a multiple of ``h_coarse`` so that none of the three
    runs ends on a shortened step.
    """
    _require_positive_step(h_coarse)
    ratio = t_probe / h_coarse
    if abs(ratio - round(ratio)) > _GRID_SLACK * max(1.0, ratio):
        raise ValidationError(
            f"t_probe={t_probe} is not a multiple of h for h={h_coarse}"
        )

    finals = []
    for h in (h_coarse, h_coarse / 2, h_coarse / 4):
        steps = int(round(t_probe / h))
        cfg = SolverConfig(method=method, h=h, t_end=t_probe, record_stride=steps)
        final = integrate(p, s0, cfg, max_steps=max_steps).final_state
        finals.append(final.as_array())
    coarse, mid, fine = finals

    first = np.abs(coarse - mid)
    second = np.abs(mid - fine)
    floor = precision_floor * np.maximum(1.0, np.abs(fine))
    if (first < floor).any() or (second < floor).any():
        raise IndistinguishablePrecisionError(
            "Successive refinements differ by less than double precision noise; "
            "use a larger h_coarse"
        )

    orders = np.log2(first / second)
    return ConvergenceEstimate(
        method=method, order_x=float(orders[0]), order_y=float(orders[1])
    )
