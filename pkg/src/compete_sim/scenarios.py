"""Named scenarios and batch comparison.

The three builtin scenarios describe regions with medium, high and low KN95
production capability. They share the base case (n1 = n2 = 900, s1 = 0.27,
s2 = 3.75, initial stock 30 / 60) and differ only in r1 and the horizon.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .analysis import DEFAULT_SATURATION_FRACTION, ScenarioReport, analyze
from .exceptions import (
    DuplicateScenarioError,
    ScenarioRunError,
    UnknownScenarioError,
    ValidationError,
)
from .integrator import Method, SolverConfig, Trajectory, integrate
from .model import ModelParams, State
from .settings import DEFAULT_SETTINGS, Settings

logger = logging.getLogger(__name__)

BUILTIN_NAMES = ("situation1", "situation2", "situation3")

# name -> (r1, t_end, regional industry capability)
_BUILTINS: Dict[str, Tuple[float, float, str]] = {
    "situation1": (1.0, 10.0, "medium"),
    "situation2": (2.0, 6.0, "high"),
    "situation3": (0.5, 20.0, "low"),
}

BASE_PARAMS = ModelParams(r1=1.0, r2=3.0, n1=900.0, n2=900.0, s1=0.27, s2=3.75)
BASE_INITIAL = State(t=0.0, x=30.0, y=60.0)
BASE_SOLVER = SolverConfig(method=Method.RK4, h=0.1, t_end=10.0, record_stride=1)

SWEEPABLE_PARAMS = ("r1", "r2", "n1", "n2", "s1", "s2")
_SOLVER_FIELDS = ("method", "h", "t_end", "record_stride")


class Scenario(BaseModel):
    """Parameters, initial stock and solver settings for one run."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)
    params: ModelParams
    initial: State
    solver: SolverConfig
    saturation_fraction: float = Field(default=DEFAULT_SATURATION_FRACTION, gt=0, le=1)

    # metadata only, never enters the dynamics
    description: str = ""
    reserve_days: float = Field(default=10.0, ge=0)
    units: str = "1e4 masks"

    @field_validator("initial")
    @classmethod
    def _initial_stock(cls, initial: State) -> State:
        if initial.t != 0:
            raise ValueError("initial state must be at t=0")
        if initial.x < 0 or initial.y < 0:
            raise ValueError("initial stock must be nonnegative")
        return initial

    def with_overrides(self, **overrides: Any) -> "Scenario":
        """Validated copy with flag-style overrides applied.

        Accepts solver fields (h, t_end, method, record_stride), model
        coefficients (r1 ... s2), x0 / y0 and any top-level field. ``None``
        values are ignored.
        """
        changes = {k: v for k, v in overrides.items() if v is not None}
        data = self.model_dump()
        for key, value in changes.items():
            if key in _SOLVER_FIELDS:
                data["solver"][key] = value
            elif key in SWEEPABLE_PARAMS:
                data["params"][key] = value
            elif key in ("x0", "y0"):
                data["initial"][key[0]] = value
            elif key in data:
                data[key] = value
            else:
                raise ValidationError(f"Unknown scenario field '{key}'")
        return Scenario.model_validate(data)


def builtin_scenario(which: str) -> Scenario:
    """One of situation1 / situation2 / situation3."""
    if which not in _BUILTINS:
        raise UnknownScenarioError(
            f"Unknown scenario '{which}'. "
            f"Builtin scenarios: {', '.join(BUILTIN_NAMES)}"
        )
    r1, t_end, _ = _BUILTINS[which]
    return Scenario(
        name=which,
        params=BASE_PARAMS.with_changes(r1=r1),
        initial=BASE_INITIAL,
        solver=BASE_SOLVER.model_copy(update={"t_end": t_end}),
    )


def builtin_scenarios() -> List[Scenario]:
    return [builtin_scenario(name) for name in BUILTIN_NAMES]


def capability_level(name: str) -> Optional[str]:
    entry = _BUILTINS.get(name)
    return entry[2] if entry else None


def run_scenario(
    sc: Scenario, settings: Settings = DEFAULT_SETTINGS
) -> Tuple[Trajectory, ScenarioReport]:
    """Integrate a scenario and analyse the result."""
    logger.info("Running scenario %s", sc.name)
    traj = integrate(sc.params, sc.initial, sc.solver, max_steps=settings.max_steps)
    report = analyze(
        traj,
        saturation_fraction=sc.saturation_fraction,
        degeneracy_tolerance=settings.degeneracy_tolerance,
    )
    return traj, report


class ComparisonReport(BaseModel):
    """Reports for a batch, ordered by how soon x saturates."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: List[Tuple[str, ScenarioReport]]
    ordering: List[str]
    trajectories: Dict[str, Trajectory] = Field(
        default_factory=dict, exclude=True, repr=False
    )

    @property
    def fastest_saturation(self) -> Optional[str]:
        """First scenario in the ordering, or None if nothing saturated."""
        first = self.ordering[0]
        return first if self.report(first).saturation_t is not None else None

    def report(self, name: str) -> ScenarioReport:
        return dict(self.entries)[name]


def _saturation_key(entry: Tuple[str, ScenarioReport]) -> Tuple[bool, float, str]:
    name, report = entry
    sat = report.saturation_t
    return sat is None, sat if sat is not None else 0.0, name


def compare(
    scs: Sequence[Scenario], settings: Settings = DEFAULT_SETTINGS
) -> ComparisonReport:
    """Run every scenario and order them by saturation time.

    Scenarios without a saturation time sort last; ties go by name. Runs
    execute on a thread pool and are merged back in input order.
    """
    if len(scs) < 2:
        raise ValidationError("Comparison needs at least two scenarios")

    names = [sc.name for sc in scs]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise DuplicateScenarioError(
            f"Scenario names must be unique, duplicated: {', '.join(duplicates)}"
        )

    workers = min(settings.max_workers, len(scs))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_scenario, sc, settings) for sc in scs]
        runs = []
        for sc, future in zip(scs, futures):
            try:
                runs.append(future.result())
            except Exception as e:
                raise ScenarioRunError(sc.name, e) from e

    entries = [(sc.name, report) for sc, (_, report) in zip(scs, runs)]
    ordering = [name for name, _ in sorted(entries, key=_saturation_key)]
    return ComparisonReport(
        entries=entries,
        ordering=ordering,
        trajectories={sc.name: traj for sc, (traj, _) in zip(scs, runs)},
    )


def sweep(
    base: Scenario,
    param: str,
    values: Sequence[float],
    settings: Settings = DEFAULT_SETTINGS,
) -> ComparisonReport:
    """Compare copies of ``base`` with one coefficient varied."""
    if param not in SWEEPABLE_PARAMS:
        raise ValidationError(
            f"Cannot sweep '{param}'; choose one of {', '.join(SWEEPABLE_PARAMS)}"
        )
    variants = [
        base.with_overrides(name=f"{base.name}[{param}={value:g}]", **{param: value})
        for value in values
    ]
    return compare(variants, settings)
