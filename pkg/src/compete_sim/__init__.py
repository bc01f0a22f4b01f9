"""compete-sim

Two-species competition simulator for KN95 vs. disposable medical mask
production: Lotka-Volterra competition dynamics, fixed-step RK4 integration,
equilibrium classification and scenario comparison.
"""

__version__ = "1.0.0"
__author__ = "Production Modelling Team"

from .analysis import ScenarioReport, analyze
from .integrator import SolverConfig, Trajectory, integrate, rk4_step
from .model import ModelParams, OutcomeClass, State, classify_outcome, equilibria
from .scenarios import Scenario, builtin_scenario, compare, run_scenario

__all__ = [
    "ModelParams",
    "OutcomeClass",
    "Scenario",
    "ScenarioReport",
    "SolverConfig",
    "State",
    "Trajectory",
    "analyze",
    "builtin_scenario",
    "classify_outcome",
    "compare",
    "equilibria",
    "integrate",
    "rk4_step",
    "run_scenario",
]
