"""Tests for SVG chart generation."""

import numpy as np
import pytest

from compete_sim.exceptions import OutputError
from compete_sim.formatters import OutputFormat, parse_csv
from compete_sim.integrator import SolverConfig, Trajectory, integrate
from compete_sim.plotting import (
    HEIGHT,
    MARGIN_BOTTOM,
    build_chart,
    emit_plot,
    render_svg,
)
from compete_sim.scenarios import builtin_scenario


@pytest.fixture
def situation1():
    sc = builtin_scenario("situation1")
    return integrate(sc.params, sc.initial, sc.solver)


def test_time_series_chart(situation1):
    """Test the sigmoid x curve and the hump in y."""
    chart = build_chart(situation1)
    x_series, y_series = chart.series

    assert (x_series.key, y_series.key) == ("x", "y")
    assert len(x_series.values) == len(situation1)
    assert (np.diff(x_series.values) >= 0).all()
    assert x_series.values[-1] > 890.0

    peak_index = int(np.argmax(y_series.values))
    assert 0 < peak_index < len(y_series.values) - 1
    assert y_series.xs[peak_index] == pytest.approx(1.6)


def test_time_series_axes_start_at_zero(situation1):
    chart = build_chart(situation1)

    assert chart.y_ticks[0].label == "0"
    assert chart.y_ticks[0].position == f"{HEIGHT - MARGIN_BOTTOM:.2f}"
    assert chart.x_ticks[-1].label == "10"


def test_phase_chart(situation1):
    chart = build_chart(situation1, phase=True)

    assert [s.key for s in chart.series] == ["phase"]
    assert chart.series[0].xs == pytest.approx(situation1.xs.tolist())
    assert chart.x_label.startswith("KN95")


def test_render_is_deterministic(situation1):
    first = render_svg(build_chart(situation1, title="situation1"))
    second = render_svg(build_chart(situation1, title="situation1"))

    assert first == second
    assert first.startswith("<?xml")
    assert "<title>situation1</title>" in first
    assert 'id="series-x"' in first
    assert 'id="series-y"' in first
    assert "marker-" not in first


def test_single_sample_draws_a_marker(base_params):
    traj = Trajectory(
        params=base_params,
        config=SolverConfig(h=0.1, t_end=0.1),
        times=np.array([0.0]),
        xs=np.array([30.0]),
        ys=np.array([60.0]),
    )
    svg = render_svg(build_chart(traj))

    assert 'id="marker-x"' in svg
    assert 'id="marker-y"' in svg


def test_title_is_escaped(situation1):
    svg = render_svg(build_chart(situation1, title="r1 < 2 & s1 > 0"))

    assert "r1 &lt; 2 &amp; s1 &gt; 0" in svg


def test_emit_plot_svg(situation1, tmp_path):
    path = emit_plot(situation1, tmp_path / "run.svg")

    assert path.read_text() == render_svg(build_chart(situation1))


def test_emit_plot_csv(situation1, tmp_path):
    path = emit_plot(situation1, tmp_path / "run.csv", fmt=OutputFormat.CSV)

    assert len(parse_csv(path.read_text())) == len(situation1)


def test_emit_plot_unwritable(situation1, tmp_path):
    with pytest.raises(OutputError):
        emit_plot(situation1, tmp_path / "missing" / "run.svg")
