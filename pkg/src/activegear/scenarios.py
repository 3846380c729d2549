"""Landing cases and the passive/active RMS comparison."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

import numpy as np

from .analysis import Spectrum, improvement_pct, psd, rms
from .controller import (ControlConfig, HydraulicParams, PidGains, make_controller,
                         ziegler_nichols_gains)
from .dynamics import (DEFAULT_DT, DEFAULT_DURATION, AircraftParams, State,
                       Trajectory, simulate, strut_map)
from .objectives import force_signals

METRICS = (
    "bounce_displacement",
    "bounce_momentum",
    "pitch_displacement",
    "pitch_momentum",
    "suspension_travel",
    "suspension_force",
)
GEAR_INDEX = {"nose": 0, "left": 1, "right": 2}


class ComparisonError(RuntimeError):
    pass


@dataclass(frozen=True)
class Scenario:
    name: str
    sink_speed: float = 3.0
    initial_pitch: float = 0.0
    initial_roll: float = 0.0
    sprung_mass_error: float = 0.0
    duration: float = DEFAULT_DURATION
    dt: float = DEFAULT_DT

    def __post_init__(self):
        if not self.sink_speed >= 0:
            raise ValueError(f"sink_speed must be >= 0, got {self.sink_speed!r}")
        if not self.duration > 0:
            raise ValueError(f"duration must be > 0, got {self.duration!r}")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        if not self.sprung_mass_error > -1:
            raise ValueError(f"sprung_mass_error must be > -1, got {self.sprung_mass_error!r}")

    def initial_state(self) -> State:
        """Rigid descent at the sink speed with the scenario's attitude."""
        v = self.sink_speed
        return State([0.0, self.initial_pitch, self.initial_roll, 0.0, 0.0, 0.0],
                     [v, 0.0, 0.0, v, v, v])

    def apply(self, params: AircraftParams) -> AircraftParams:
        if self.sprung_mass_error == 0:
            return params
        return params.with_mass_error(self.sprung_mass_error)


def three_point(**overrides) -> Scenario:
    return replace(Scenario("three_point"), **overrides)


def two_point(**overrides) -> Scenario:
    return replace(Scenario("two_point", initial_pitch=math.radians(12.0)), **overrides)


def one_point(**overrides) -> Scenario:
    return replace(Scenario("one_point", initial_pitch=math.radians(12.0),
                            initial_roll=math.radians(5.0)), **overrides)


BUILTIN_SCENARIOS = {"three_point": three_point, "two_point": two_point, "one_point": one_point}


def scenario_by_name(name: str, **overrides) -> Scenario:
    try:
        return BUILTIN_SCENARIOS[name](**overrides)
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; built-ins are {sorted(BUILTIN_SCENARIOS)}") from None


def sensitivity_variant(base: Scenario, mass_error: float) -> Scenario:
    if not mass_error > -1:
        raise ValueError(f"mass_error must be > -1, got {mass_error!r}")
    if mass_error == 0:
        return base
    return replace(base, sprung_mass_error=mass_error)


@dataclass(frozen=True)
class Suspension:
    """Strut damping/stiffness overrides; None keeps the aircraft's value."""

    nose_cs: Optional[float] = None
    nose_ks: Optional[float] = None
    main_cs: Optional[float] = None
    main_ks: Optional[float] = None

    def apply(self, params: AircraftParams) -> AircraftParams:
        return params.with_suspension(self.nose_cs, self.nose_ks, self.main_cs, self.main_ks)


@dataclass(frozen=True)
class Configuration:
    label: str
    controller: Optional[ControlConfig] = None
    suspension: Suspension = field(default_factory=Suspension)

    @property
    def passive(self) -> bool:
        return self.controller is None


TUNED_GAINS = {
    1: (PidGains(0.3568654, 1.6379851, 0.0253913), PidGains(0.652985, 1.753764, 0.0469735)),
    2: (PidGains(0.8943572, 4.63987612, 0.08956345), PidGains(0.1698754, 1.2568432, 0.06513287)),
}
# (p_high, p_low, cs, ks) for nose then main.
TUNED_SUSPENSION = {
    1: ((15_946_257.0, 98_653.0, 87_952.0, 1_235_469.0), (17_945_366.0, 99_136.0, 91_325.0, 1_495_631.0)),
    2: ((16_431_298.0, 95_431.0, 82_651.0, 1_132_781.0), (18_456_327.0, 97_649.0, 85_761.0, 1_394_218.0)),
}


def tuned_configuration(objective_type: int, label: Optional[str] = None) -> Configuration:
    """Reference Bees-tuned gains and strut parameters (direct PID forces)."""
    nose_g, main_g = TUNED_GAINS[objective_type]
    nose_s, main_s = TUNED_SUSPENSION[objective_type]
    ctl = ControlConfig(nose_g, main_g,
                        nose_hydraulic=HydraulicParams(nose_s[0], nose_s[1]),
                        main_hydraulic=HydraulicParams(main_s[0], main_s[1]))
    susp = Suspension(nose_cs=nose_s[2], nose_ks=nose_s[3], main_cs=main_s[2], main_ks=main_s[3])
    return Configuration(label or f"ba{objective_type}", ctl, susp)


def reference_configurations() -> List[Configuration]:
    """passive, zn, ba1, ba2 in that order."""
    return [
        Configuration("passive"),
        Configuration("zn", ziegler_nichols_gains()),
        tuned_configuration(1),
        tuned_configuration(2),
    ]


PRESETS = {
    "passive": lambda: Configuration("passive"),
    "zn": lambda: Configuration("zn", ziegler_nichols_gains()),
    "ba1": lambda: tuned_configuration(1),
    "ba2": lambda: tuned_configuration(2),
}


def run_configuration(scenario: Scenario, config: Configuration,
                      params: Optional[AircraftParams] = None):
    """Simulate one configuration; returns ``(params_used, trajectory)``."""
    base = params if params is not None else AircraftParams.a320()
    used = scenario.apply(config.suspension.apply(base))
    traj = simulate(used, scenario.initial_state(), make_controller(config.controller),
                    duration=scenario.duration, dt=scenario.dt)
    return used, traj


def metric_signals(traj: Trajectory, params: AircraftParams, gear: str = "nose") -> Dict[str, np.ndarray]:
    """Time series behind each comparison metric.

    ``gear`` picks which strut supplies travel and impact force; ``"max"``
    takes the largest magnitude over the three struts at each sample.
    """
    S = strut_map(params)
    rd = traj.coords @ S.T
    fs = force_signals(traj, params).suspension
    if gear == "max":
        idx = np.argmax(np.abs(rd), axis=1)
        travel = rd[np.arange(len(rd)), idx]
        jdx = np.argmax(np.abs(fs), axis=1)
        force = fs[np.arange(len(fs)), jdx]
    else:
        g = GEAR_INDEX[gear]
        travel, force = rd[:, g], fs[:, g]
    return {
        "bounce_displacement": traj.coords[:, 0],
        "bounce_momentum": params.sprung_mass * traj.velocities[:, 0],
        "pitch_displacement": traj.coords[:, 1],
        "pitch_momentum": params.pitch_inertia * traj.velocities[:, 1],
        "suspension_travel": travel,
        "suspension_force": force,
    }


def _improvement(base: float, new: float) -> int:
    # A motionless baseline (zero sink speed) leaves nothing to improve on.
    if base == 0 and new == 0:
        return 0
    return improvement_pct(base, new)


@dataclass
class ComparisonReport:
    scenario: Scenario
    labels: List[str]
    rms: Dict[str, Dict[str, float]]
    improvement: Dict[str, Dict[str, int]]
    spectra: Dict[str, Dict[str, Spectrum]]
    baseline: str = "passive"


def run_comparison(scenario: Scenario, configs: Sequence[Configuration],
                   params: Optional[AircraftParams] = None, gear: str = "nose",
                   baseline: str = "passive", workers: int = 1) -> ComparisonReport:
    labels = [c.label for c in configs]
    if baseline not in labels:
        raise ValueError(f"comparison needs a configuration labelled {baseline!r}")
    if len(set(labels)) != len(labels):
        raise ValueError("configuration labels must be unique")

    def one(config):
        try:
            used, traj = run_configuration(scenario, config, params)
        except Exception as exc:
            raise ComparisonError(f"{config.label}: {exc}") from exc
        return config.label, metric_signals(traj, used, gear), traj.dt

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(one, configs))
    else:
        outputs = [one(c) for c in configs]

    table, spectra = {}, {}
    for label, signals, dt in outputs:
        table[label] = {m: rms(signals[m]) for m in METRICS}
        spectra[label] = {m: psd(signals[m], dt) for m in METRICS}
    base = table[baseline]
    improvement = {label: {m: _improvement(base[m], table[label][m]) for m in METRICS}
                   for label in labels}
    return ComparisonReport(scenario, labels, table, improvement, spectra, baseline)
