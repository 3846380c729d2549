"""Joint tuning of PID gains and strut parameters with the Bees Algorithm.

The decision vector has 14 entries: nose and main PID gains, then nose and
main accumulator/reservoir pressures and strut damping/stiffness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .controller import DIRECT, ControlConfig, HydraulicParams, PidGains, ziegler_nichols_gains
from .dynamics import AircraftParams, IntegrationError
from .objectives import evaluate_objective
from .optimizer import BeesConfig, BeesResult, SearchSpace, bees_optimize
from .scenarios import (TUNED_GAINS, TUNED_SUSPENSION, Configuration, Scenario, Suspension,
                        run_configuration)

DECISION_VARIABLES = (
    "nose_kp", "nose_ki", "nose_kd",
    "main_kp", "main_ki", "main_kd",
    "nose_p_high", "nose_p_low", "nose_cs", "nose_ks",
    "main_p_high", "main_p_low", "main_cs", "main_ks",
)

# Pressures used when the baseline has none of its own.
BASELINE_PRESSURES = ((15_946_257.0, 98_653.0), (17_945_366.0, 99_136.0))


def _reference_points(params: AircraftParams) -> List[np.ndarray]:
    pts = [baseline_vector(params)]
    for k in (1, 2):
        ng, mg = TUNED_GAINS[k]
        ns, ms = TUNED_SUSPENSION[k]
        pts.append(np.array([ng.kp, ng.ki, ng.kd, mg.kp, mg.ki, mg.kd, *ns, *ms]))
    return pts


def default_search_space(params: Optional[AircraftParams] = None, factor: float = 10.0) -> SearchSpace:
    """Bounds spanning the reference values by ``factor`` down and up."""
    pts = np.array(_reference_points(params or AircraftParams.a320()))
    return SearchSpace(DECISION_VARIABLES, tuple(pts.min(axis=0) / factor),
                       tuple(pts.max(axis=0) * factor))


def baseline_vector(params: AircraftParams, control: Optional[ControlConfig] = None) -> np.ndarray:
    """Decision vector of the given (default Ziegler-Nichols) gains on the aircraft's own struts."""
    c = control or ziegler_nichols_gains()
    n, m = c.nose_gains, c.main_gains
    (nph, npl), (mph, mpl) = BASELINE_PRESSURES
    if c.nose_hydraulic is not None:
        nph, npl = c.nose_hydraulic.p_high, c.nose_hydraulic.p_low
    if c.main_hydraulic is not None:
        mph, mpl = c.main_hydraulic.p_high, c.main_hydraulic.p_low
    return np.array([n.kp, n.ki, n.kd, m.kp, m.ki, m.kd,
                     nph, npl, params.cs1, params.ks1,
                     mph, mpl, params.cs2, params.ks2])


def decode(x, force_mode: str = DIRECT, label: str = "tuned") -> Configuration:
    """Decision vector to a configuration (controller plus strut overrides)."""
    x = [float(v) for v in x]
    if len(x) != len(DECISION_VARIABLES):
        raise ValueError(f"decision vector needs {len(DECISION_VARIABLES)} entries")
    ctl = ControlConfig(
        nose_gains=PidGains(*x[0:3]),
        main_gains=PidGains(*x[3:6]),
        force_mode=force_mode,
        nose_hydraulic=HydraulicParams(x[6], x[7]),
        main_hydraulic=HydraulicParams(x[10], x[11]),
    )
    return Configuration(label, ctl, Suspension(nose_cs=x[8], nose_ks=x[9], main_cs=x[12], main_ks=x[13]))


def evaluate_configuration(config: Configuration, scenario: Scenario, objective_type: int,
                           params: Optional[AircraftParams] = None,
                           weights: Optional[Sequence[float]] = None) -> float:
    used, traj = run_configuration(scenario, config, params)
    return evaluate_objective(objective_type, traj, used, weights)


def make_fitness(scenario: Scenario, objective_type: int, params: Optional[AircraftParams] = None,
                 force_mode: str = DIRECT, weights: Optional[Sequence[float]] = None):
    """Fitness closure; failed or invalid candidates score ``inf``."""
    def fitness(x) -> float:
        try:
            config = decode(x, force_mode)
            value = evaluate_configuration(config, scenario, objective_type, params, weights)
        except (IntegrationError, ValueError, FloatingPointError):
            return math.inf
        return value if math.isfinite(value) else math.inf
    return fitness


@dataclass
class TuneResult:
    configuration: Configuration
    fitness: float
    baseline_fitness: float
    optimization: BeesResult

    @property
    def control(self) -> ControlConfig:
        return self.configuration.controller

    @property
    def suspension(self) -> Suspension:
        return self.configuration.suspension

    @property
    def history(self) -> List[float]:
        return self.optimization.history


def tune_controller(scenario: Scenario, objective_type: int, space: Optional[SearchSpace] = None,
                    cfg: Optional[BeesConfig] = None, params: Optional[AircraftParams] = None,
                    force_mode: str = DIRECT, weights: Optional[Sequence[float]] = None,
                    inject_baseline: bool = True, workers: int = 1,
                    label: Optional[str] = None) -> TuneResult:
    """Bees search for gains and strut parameters minimizing an ITAE objective.

    The Ziegler-Nichols gains on the aircraft's own struts are seeded into the
    first population, so the returned fitness never exceeds the baseline's.
    """
    if objective_type not in (1, 2):
        raise ValueError(f"objective type must be 1 or 2, got {objective_type!r}")
    params = params or AircraftParams.a320()
    space = space or default_search_space(params)
    cfg = cfg or BeesConfig()
    if space.names != DECISION_VARIABLES:
        raise ValueError(f"search space must list {DECISION_VARIABLES}")

    fitness = make_fitness(scenario, objective_type, params, force_mode, weights)
    base = space.clamp(baseline_vector(params))
    seeds = [base] if inject_baseline else []
    result = bees_optimize(fitness, space, cfg, seeds=seeds, workers=workers)
    best = decode(result.best.position, force_mode, label or f"ba{objective_type}_tuned")
    return TuneResult(best, result.best.fitness, fitness(base), result)
