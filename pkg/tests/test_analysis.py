"""Tests for trajectory analytics."""

import logging

import numpy as np
import pytest

from compete_sim.analysis import (
    Species,
    analyze,
    crossover_time,
    market_share,
    peak,
    saturation_time,
    share_decline_time,
)
from compete_sim.exceptions import ValidationError
from compete_sim.integrator import SolverConfig, Trajectory, integrate
from compete_sim.model import ModelParams, OutcomeClass, State

# (r1, t_end) -> frozen values at h=0.1
BUILTIN_RUNS = {
    "situation1": (1.0, 10.0),
    "situation2": (2.0, 6.0),
    "situation3": (0.5, 20.0),
}
CROSSOVER = {
    "situation1": 2.750319557,
    "situation2": 1.231121608,
    "situation3": 5.443703739,
}
SATURATION = {
    "situation1": 6.691967924,
    "situation2": 3.294546195,
    "situation3": 13.523001119,
}
Y_PEAK = {
    "situation1": (1.6, 455.912255810),
    "situation2": (1.0, 249.337942150),
    "situation3": (2.1, 625.646046359),
}


def _run(which, h=0.1, t_end=None, initial=(30.0, 60.0)):
    r1, default_t_end = BUILTIN_RUNS[which]
    p = ModelParams(r1=r1, r2=3.0, n1=900.0, n2=900.0, s1=0.27, s2=3.75)
    cfg = SolverConfig(h=h, t_end=t_end or default_t_end)
    return integrate(p, State(x=initial[0], y=initial[1]), cfg)


@pytest.fixture(scope="module")
def runs():
    return {name: _run(name) for name in BUILTIN_RUNS}


@pytest.mark.parametrize("which", list(BUILTIN_RUNS))
def test_crossover_regression(runs, which):
    assert crossover_time(runs[which]) == pytest.approx(CROSSOVER[which], abs=1e-6)


def test_crossover_near_reported_milestones(runs):
    """Test the crossover times against the narrative milestones."""
    assert crossover_time(runs["situation1"]) == pytest.approx(2.8, abs=0.7)
    assert crossover_time(runs["situation2"]) == pytest.approx(1.2, abs=0.7)
    assert crossover_time(runs["situation3"]) == pytest.approx(5.8, abs=0.7)


def test_crossover_lies_between_bracketing_samples(runs):
    traj = runs["situation1"]
    t = crossover_time(traj)
    after = int(np.flatnonzero(traj.xs >= traj.ys)[0])

    assert traj.times[after - 1] < t <= traj.times[after]


def test_crossover_is_zero_when_x_leads_from_start():
    traj = _run("situation1", initial=(60.0, 30.0))

    assert crossover_time(traj) == 0.0


def test_crossover_is_none_when_never_reached():
    assert crossover_time(_run("situation1", t_end=1.0)) is None


@pytest.mark.parametrize("which", list(BUILTIN_RUNS))
def test_y_peak_regression(runs, which):
    t, value = peak(runs[which], Species.Y)
    expected_t, expected_value = Y_PEAK[which]

    assert t == pytest.approx(expected_t)
    assert value == pytest.approx(expected_value, abs=1e-6)
    assert value < 900.0


def test_peak_of_monotone_series_is_last_sample():
    p = ModelParams(r1=1.0, r2=1.0, n1=900.0, n2=900.0, s1=0.0, s2=0.0)
    traj = integrate(p, State(x=30.0, y=60.0), SolverConfig(h=0.1, t_end=2.0))

    assert peak(traj, Species.X) == (traj.t_end, float(traj.xs[-1]))


def test_peak_of_all_zero_series():
    p = ModelParams(r1=1.0, r2=3.0, n1=900.0, n2=900.0, s1=0.27, s2=3.75)
    traj = integrate(p, State(x=0.0, y=0.0), SolverConfig(h=0.1, t_end=1.0))

    assert peak(traj, Species.Y) == (0.0, 0.0)


@pytest.mark.parametrize("which", list(BUILTIN_RUNS))
def test_saturation_regression(runs, which):
    assert saturation_time(runs[which]) == pytest.approx(SATURATION[which], abs=1e-6)


def test_saturation_ordering_follows_production_rate(runs):
    """Test that faster KN95 production saturates sooner."""
    s1, s2, s3 = (saturation_time(runs[name]) for name in BUILTIN_RUNS)

    assert s2 < s1 < s3
    assert s2 == pytest.approx(4.0, abs=1.5)


def test_saturation_is_zero_when_already_saturated():
    traj = _run("situation1", t_end=1.0, initial=(880.0, 10.0))

    assert saturation_time(traj) == 0.0


def test_saturation_is_none_when_never_reached():
    assert saturation_time(_run("situation1", t_end=1.0)) is None


@pytest.mark.parametrize("fraction", [0.0, -0.5, 1.5])
def test_saturation_rejects_bad_fraction(runs, fraction):
    with pytest.raises(ValidationError, match="Saturation fraction"):
        saturation_time(runs["situation1"], fraction)


def test_event_times_stable_under_step_halving(runs):
    """Test crossover and saturation against a run at half the step."""
    for which in BUILTIN_RUNS:
        fine = _run(which, h=0.05)
        assert crossover_time(fine) == pytest.approx(
            crossover_time(runs[which]), abs=0.1
        )
        assert saturation_time(fine) == pytest.approx(
            saturation_time(runs[which]), abs=0.1
        )


def test_market_share_at_start(runs):
    t, share = market_share(runs["situation1"])[0]

    assert t == 0.0
    assert share == pytest.approx(1 / 3)


def test_market_share_undefined_without_stock():
    p = ModelParams(r1=1.0, r2=3.0, n1=900.0, n2=900.0, s1=0.27, s2=3.75)
    traj = integrate(p, State(x=0.0, y=0.0), SolverConfig(h=0.1, t_end=0.5))

    assert all(share is None for _, share in market_share(traj))
    assert share_decline_time(traj) is None


def test_market_share_rises_after_crossover(runs):
    """Test that the KN95 share only grows once KN95 leads."""
    traj = runs["situation1"]
    after = traj.times >= crossover_time(traj)
    shares = np.array([share for _, share in market_share(traj)])[after]

    assert (np.diff(shares) >= -1e-12).all()


def test_market_share_tends_to_one():
    traj = _run("situation1", t_end=30.0)

    assert market_share(traj)[-1][1] == pytest.approx(1.0, abs=1e-3)


def test_share_decline_time(runs):
    """Test when the disposable share peaks for situation 1."""
    traj = runs["situation1"]
    t = share_decline_time(traj)

    assert t == pytest.approx(1.1)
    assert 0 < t < crossover_time(traj)


def test_analyze_builds_full_report(runs):
    report = analyze(runs["situation1"])
    share_x, share_y = report.final_share

    assert report.outcome is OutcomeClass.X_EXCLUDES_Y
    assert report.crossover_t == pytest.approx(CROSSOVER["situation1"], abs=1e-6)
    assert report.saturation_t == pytest.approx(SATURATION["situation1"], abs=1e-6)
    assert report.saturation_fraction == 0.95
    assert report.final_state.t == pytest.approx(10.0)
    assert report.final_state.x == pytest.approx(898.270792, abs=1e-5)
    assert share_x == pytest.approx(1.0, abs=1e-6)
    assert share_x + share_y == pytest.approx(1.0)
    assert len(report.share_series) == len(runs["situation1"])
    assert report.negative_samples == 0


def test_analyze_reports_negative_samples(caplog):
    """Test that negative counts are counted and logged."""
    p = ModelParams(r1=1.0, r2=3.0, n1=900.0, n2=900.0, s1=0.27, s2=3.75)
    traj = Trajectory(
        params=p,
        config=SolverConfig(h=1.0, t_end=2.0),
        times=np.array([0.0, 1.0, 2.0]),
        xs=np.array([30.0, 400.0, 950.0]),
        ys=np.array([60.0, -5.0, -1.0]),
    )

    with caplog.at_level(logging.WARNING, logger="compete_sim.analysis"):
        report = analyze(traj)

    assert report.negative_samples == 2
    assert "negative counts" in caplog.text


def test_crossover_on_an_exact_sample_is_that_sample_time():
    """Test that a sample with x == y is reported as the crossover itself."""
    p = ModelParams(r1=1.0, r2=3.0, n1=900.0, n2=900.0, s1=0.27, s2=3.75)
    traj = Trajectory(
        params=p,
        config=SolverConfig(h=1.0, t_end=2.0),
        times=np.array([0.0, 1.0, 2.0]),
        xs=np.array([1.0, 5.0, 9.0]),
        ys=np.array([5.0, 5.0, 5.0]),
    )

    assert crossover_time(traj) == 1.0
