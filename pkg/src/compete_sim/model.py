"""Competition ODE system for KN95 (x) and disposable (y) mask output.

    dx/dt = r1 * x * (1 - x/n1 - s1 * y/n2)
    dy/dt = r2 * y * (1 - y/n2 - s2 * x/n1)

All counts are in units of 10^4 masks. The system is autonomous: ``State.t``
is carried for reporting and never enters the rates.
"""

import logging
import math
from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .exceptions import DegenerateParametersError

logger = logging.getLogger(__name__)

FIXED_POINT_TOLERANCE = 1e-12
DEGENERACY_TOLERANCE = 1e-12
MASKS_PER_UNIT = 10_000


class ModelParams(BaseModel):
    """The six competition coefficients."""

    model_config = ConfigDict(frozen=True)

    r1: float = Field(gt=0, description="production efficiency of x")
    r2: float = Field(gt=0, description="production efficiency of y")
    n1: float = Field(gt=0, description="maximum output of x")
    n2: float = Field(gt=0, description="maximum output of y")
    s1: float = Field(ge=0, description="consumption magnification of x relative to y")
    s2: float = Field(ge=0, description="consumption magnification of y relative to x")

    @property
    def scale(self) -> float:
        return max(1.0, self.r1 * self.n1, self.r2 * self.n2)

    def with_changes(self, **changes: float) -> "ModelParams":
        return ModelParams(**{**self.model_dump(), **changes})


class State(BaseModel):
    """A point (t, x, y) on a trajectory.

    Negative components are representable so that integrators can report
    step-size misuse instead of hiding it; initial conditions are checked
    for nonnegativity where scenarios are built.
    """

    model_config = ConfigDict(frozen=True)

    t: float = 0.0
    x: float
    y: float

    @field_validator("t", "x", "y")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("state components must be finite")
        return value

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    @classmethod
    def from_array(cls, t: float, u: np.ndarray) -> "State":
        return cls(t=float(t), x=float(u[0]), y=float(u[1]))


class EquilibriumKind(str, Enum):
    EXTINCTION_BOTH = "extinction-both"
    X_ONLY = "x-only"
    Y_ONLY = "y-only"
    INTERIOR = "interior"


class Equilibrium(BaseModel):
    model_config = ConfigDict(frozen=True)

    x_star: float
    y_star: float
    kind: EquilibriumKind

    def residual(self, p: ModelParams) -> float:
        """Magnitude of the vector field at this point."""
        return float(np.hypot(*rates(p, np.array([self.x_star, self.y_star]))))

    def is_fixed_point(
        self, p: ModelParams, tolerance: float = FIXED_POINT_TOLERANCE
    ) -> bool:
        return self.residual(p) < tolerance * p.scale


class OutcomeClass(str, Enum):
    """Long-run outcome of the competition, decided by (s1, s2)."""

    X_EXCLUDES_Y = "x-excludes-y"
    Y_EXCLUDES_X = "y-excludes-x"
    STABLE_COEXISTENCE = "stable-coexistence"
    BISTABLE = "bistable"
    DEGENERATE = "degenerate"

    @property
    def label(self) -> str:
        return self.value


def rates(p: ModelParams, u: np.ndarray) -> np.ndarray:
    """Vector field on a raw [x, y] array; the integrators' hot path."""
    x, y = u[0], u[1]
    return np.array(
        [
            p.r1 * x * (1 - x / p.n1 - p.s1 * y / p.n2),
            p.r2 * y * (1 - y / p.n2 - p.s2 * x / p.n1),
        ]
    )


def vector_field(p: ModelParams, s: State) -> Tuple[float, float]:
    """Instantaneous rates (dx/dt, dy/dt) at state ``s``."""
    dx_dt, dy_dt = rates(p, s.as_array())
    return float(dx_dt), float(dy_dt)


def equilibria(
    p: ModelParams,
    strict: bool = False,
    tolerance: float = DEGENERACY_TOLERANCE,
) -> List[Equilibrium]:
    """Fixed points of the system.

    The three boundary points are always returned. The interior point is
    appended only when both of its coordinates are strictly positive. When
    s1*s2 = 1 the interior system is singular: it is skipped with a warning,
    or ``DegenerateParametersError`` is raised if ``strict`` is set.
    """
    found = [
        Equilibrium(x_star=0.0, y_star=0.0, kind=EquilibriumKind.EXTINCTION_BOTH),
        Equilibrium(x_star=p.n1, y_star=0.0, kind=EquilibriumKind.X_ONLY),
        Equilibrium(x_star=0.0, y_star=p.n2, kind=EquilibriumKind.Y_ONLY),
    ]

    det = 1 - p.s1 * p.s2
    if abs(det) < tolerance:
        message = (
            f"s1*s2 = {p.s1 * p.s2:.15g} is singular; "
            "interior equilibrium undefined"
        )
        if strict:
            raise DegenerateParametersError(message, boundary=found)
        logger.warning(message)
        return found

    x_frac = (1 - p.s1) / det
    y_frac = (1 - p.s2) / det
    if x_frac > 0 and y_frac > 0:
        found.append(
            Equilibrium(
                x_star=p.n1 * x_frac,
                y_star=p.n2 * y_frac,
                kind=EquilibriumKind.INTERIOR,
            )
        )
    return found


def classify_outcome(
    p: ModelParams, tolerance: float = DEGENERACY_TOLERANCE
) -> OutcomeClass:
    """Competitive-exclusion outcome from the cross-coupling coefficients."""
    if abs(p.s1 - 1) < tolerance or abs(p.s2 - 1) < tolerance:
        return OutcomeClass.DEGENERATE
    if p.s1 < 1 and p.s2 > 1:
        return OutcomeClass.X_EXCLUDES_Y
    if p.s1 > 1 and p.s2 < 1:
        return OutcomeClass.Y_EXCLUDES_X
    if p.s1 < 1 and p.s2 < 1:
        return OutcomeClass.STABLE_COEXISTENCE
    return OutcomeClass.BISTABLE


def predicted_equilibria(p: ModelParams, outcome: OutcomeClass) -> List[Equilibrium]:
    """Attracting equilibria implied by an outcome class."""
    points = {e.kind: e for e in equilibria(p)}
    if outcome is OutcomeClass.X_EXCLUDES_Y:
        return [points[EquilibriumKind.X_ONLY]]
    if outcome is OutcomeClass.Y_EXCLUDES_X:
        return [points[EquilibriumKind.Y_ONLY]]
    if outcome is OutcomeClass.STABLE_COEXISTENCE:
        return [points[EquilibriumKind.INTERIOR]]
    if outcome is OutcomeClass.BISTABLE:
        return [points[EquilibriumKind.X_ONLY], points[EquilibriumKind.Y_ONLY]]
    return []
