"""Tests for builtin scenarios, comparison and sweeps."""

import pytest
from pydantic import ValidationError as PydanticValidationError

from compete_sim.exceptions import (
    DuplicateScenarioError,
    ScenarioRunError,
    StepBudgetExceededError,
    UnknownScenarioError,
    ValidationError,
)
from compete_sim.model import OutcomeClass
from compete_sim.scenarios import (
    BUILTIN_NAMES,
    builtin_scenario,
    builtin_scenarios,
    capability_level,
    compare,
    run_scenario,
    sweep,
)
from compete_sim.settings import Settings


def test_builtin_scenarios_differ_only_in_rate_and_horizon():
    """Test the three regional situations."""
    s1, s2, s3 = builtin_scenarios()

    assert [sc.name for sc in (s1, s2, s3)] == list(BUILTIN_NAMES)
    assert [sc.params.r1 for sc in (s1, s2, s3)] == [1.0, 2.0, 0.5]
    assert [sc.solver.t_end for sc in (s1, s2, s3)] == [10.0, 6.0, 20.0]
    for sc in (s2, s3):
        assert sc.params.with_changes(r1=1.0) == s1.params
        assert sc.initial == s1.initial
        assert sc.solver.h == s1.solver.h == 0.1


def test_capability_levels():
    assert capability_level("situation1") == "medium"
    assert capability_level("situation2") == "high"
    assert capability_level("situation3") == "low"
    assert capability_level("custom") is None


def test_unknown_builtin_lists_valid_names():
    with pytest.raises(UnknownScenarioError) as exc_info:
        builtin_scenario("situation4")

    message = str(exc_info.value)
    assert "situation4" in message
    for name in BUILTIN_NAMES:
        assert name in message


def test_run_scenario_matches_published_prefix(published_rows):
    """Test the first time unit of situation 1 against the published table."""
    traj, report = run_scenario(builtin_scenario("situation1"))

    for t, x, y in zip(traj.times[:11], traj.xs[:11], traj.ys[:11]):
        expected_x, expected_y = published_rows[round(t, 1)]
        assert x == pytest.approx(expected_x, abs=5e-4)
        assert y == pytest.approx(expected_y, abs=6e-3)
    assert report.outcome is OutcomeClass.X_EXCLUDES_Y
    assert report.crossover_t == pytest.approx(2.8, abs=0.7)


def test_run_without_kn95_stock():
    """Test that disposables fill the market when no KN95 stock exists."""
    sc = builtin_scenario("situation1").with_overrides(x0=0.0)
    traj, report = run_scenario(sc)

    assert not traj.xs.any()
    assert report.crossover_t is None
    assert report.saturation_t is None
    assert report.final_state.y == pytest.approx(900.0, abs=1e-6)


def test_with_overrides_routes_fields():
    sc = builtin_scenario("situation1").with_overrides(
        name="custom", h=0.05, method="euler", s1=0.5, y0=10.0, description="test run"
    )

    assert sc.name == "custom"
    assert sc.solver.h == 0.05
    assert sc.solver.method.value == "euler"
    assert sc.params.s1 == 0.5
    assert sc.initial.y == 10.0
    assert sc.description == "test run"


def test_with_overrides_ignores_none():
    base = builtin_scenario("situation2")

    assert base.with_overrides(h=None, t_end=None) == base


def test_with_overrides_rejects_unknown_field():
    with pytest.raises(ValidationError, match="Unknown scenario field 'speed'"):
        builtin_scenario("situation1").with_overrides(speed=3)


def test_scenario_validation():
    base = builtin_scenario("situation1")
    with pytest.raises(PydanticValidationError):
        base.with_overrides(h=-0.1)
    with pytest.raises(PydanticValidationError, match="nonnegative"):
        base.with_overrides(x0=-1.0)
    with pytest.raises(PydanticValidationError):
        base.with_overrides(saturation_fraction=1.5)
    with pytest.raises(PydanticValidationError):
        base.with_overrides(name="")


def test_compare_orders_by_saturation():
    """Test that the highest production rate saturates first."""
    names = ("situation2", "situation1", "situation3")
    scs = [builtin_scenario(name) for name in names]
    comparison = compare(scs)

    assert [name for name, _ in comparison.entries] == [
        "situation2",
        "situation1",
        "situation3",
    ]
    assert comparison.ordering == ["situation2", "situation1", "situation3"]
    assert comparison.fastest_saturation == "situation2"
    assert set(comparison.trajectories) == set(BUILTIN_NAMES)


def test_compare_breaks_ties_by_name():
    base = builtin_scenario("situation1")
    comparison = compare([base.with_overrides(name="b"), base.with_overrides(name="a")])

    assert comparison.ordering == ["a", "b"]


def test_compare_puts_unsaturated_last():
    quick = builtin_scenario("situation2")
    short = builtin_scenario("situation1").with_overrides(name="short", t_end=1.0)
    comparison = compare([short, quick])

    assert comparison.ordering == ["situation2", "short"]
    assert comparison.report("short").saturation_t is None


def test_compare_reports_none_when_nothing_saturates():
    base = builtin_scenario("situation1").with_overrides(t_end=1.0)
    comparison = compare([base.with_overrides(name="a"), base.with_overrides(name="b")])

    assert comparison.fastest_saturation is None


def test_compare_needs_two_scenarios():
    with pytest.raises(ValidationError, match="at least two"):
        compare([builtin_scenario("situation1")])


def test_compare_rejects_duplicate_names():
    sc = builtin_scenario("situation1")

    with pytest.raises(DuplicateScenarioError, match="situation1"):
        compare([sc, sc])


def test_compare_names_failing_scenario():
    """Test that a failure inside the batch identifies its scenario."""
    scs = builtin_scenarios()

    with pytest.raises(ScenarioRunError) as exc_info:
        compare(scs, Settings(max_steps=10))

    assert exc_info.value.name == "situation1"
    assert isinstance(exc_info.value.cause, StepBudgetExceededError)
    assert "situation1" in str(exc_info.value)


def test_compare_is_independent_of_worker_count():
    scs = builtin_scenarios()
    serial = compare(scs, Settings(max_workers=1))
    parallel = compare(scs, Settings(max_workers=3))

    assert serial.ordering == parallel.ordering
    assert serial.entries == parallel.entries


def test_sweep_production_rate():
    base = builtin_scenario("situation1")
    comparison = sweep(base, "r1", [0.5, 1.0, 2.0])

    assert comparison.ordering == [
        "situation1[r1=2]",
        "situation1[r1=1]",
        "situation1[r1=0.5]",
    ]


def test_sweep_rejects_unknown_parameter():
    with pytest.raises(ValidationError, match="Cannot sweep 'h'"):
        sweep(builtin_scenario("situation1"), "h", [0.1, 0.2])
