"""Shared fixtures for the compete-sim tests."""

import pytest

from compete_sim.integrator import SolverConfig
from compete_sim.model import ModelParams, State

# Published evolution table for situation 1: t -> (KN95, disposable)
PUBLISHED_ROWS = {
    0.0: (30.000, 60.000),
    0.1: (32.972, 76.128),
    0.2: (36.207, 95.648),
    0.3: (39.719, 118.820),
    0.4: (43.522, 145.711),
    0.5: (47.626, 176.117),
    0.6: (52.043, 209.493),
    0.7: (56.781, 244.940),
    0.8: (61.851, 281.242),
    0.9: (67.261, 316.971),
    1.0: (73.023, 350.663),
}


@pytest.fixture
def base_params():
    """Situation 1 coefficients."""
    return ModelParams(r1=1.0, r2=3.0, n1=900.0, n2=900.0, s1=0.27, s2=3.75)


@pytest.fixture
def base_initial():
    return State(t=0.0, x=30.0, y=60.0)


@pytest.fixture
def unit_solver():
    """RK4, h=0.1 over the first time unit."""
    return SolverConfig(method="rk4", h=0.1, t_end=1.0)


@pytest.fixture
def published_rows():
    return dict(PUBLISHED_ROWS)
