"""PID control of the three active struts, with an optional servo-valve stage.

The error fed to each gear's PID is the reference strut rate minus the
measured strut rate ``rv``.  In ``direct`` mode the PID output is the control
force itself.  In ``hydraulic`` mode the PID output is a servo-valve
displacement ``l`` that sets the valve flow ``q``, and the actuator force is
``ka * q + kb * qdot * |q|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .dynamics import NDOF, NSTATE, AircraftParams, State, strut_map

DIRECT = "direct"
HYDRAULIC = "hydraulic"
FORCE_MODES = (DIRECT, HYDRAULIC)


@dataclass(frozen=True)
class PidGains:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0

    def __post_init__(self):
        for name in ("kp", "ki", "kd"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"PID gain {name} must be finite and >= 0, got {v!r}")


@dataclass(frozen=True)
class HydraulicParams:
    """Servo-valve and actuator constants.

    ``ka`` and ``kb`` default to placeholder magnitudes; no reference values
    exist for them.
    """

    p_high: float
    p_low: float
    ka: float = 1e4
    kb: float = 1e2
    cd: float = 0.6
    w: float = 0.01
    rho: float = 870.0

    def __post_init__(self):
        if not (self.p_high > self.p_low > 0):
            raise ValueError(f"need p_high > p_low > 0, got p_high={self.p_high!r}, p_low={self.p_low!r}")
        if not self.rho > 0:
            raise ValueError("rho must be > 0")
        if not 0 < self.cd <= 1:
            raise ValueError("cd must lie in (0, 1]")
        if not self.w > 0:
            raise ValueError("w must be > 0")

    @property
    def flow_gain(self) -> float:
        """Flow per unit valve displacement."""
        return self.cd * self.w * math.sqrt((self.p_high - self.p_low) / self.rho)


@dataclass(frozen=True)
class ControlConfig:
    nose_gains: PidGains
    main_gains: PidGains
    force_mode: str = DIRECT
    nose_hydraulic: Optional[HydraulicParams] = None
    main_hydraulic: Optional[HydraulicParams] = None
    reference: float = 0.0

    def __post_init__(self):
        if self.force_mode not in FORCE_MODES:
            raise ValueError(f"force_mode must be one of {FORCE_MODES}, got {self.force_mode!r}")
        if self.force_mode == HYDRAULIC and (self.nose_hydraulic is None or self.main_hydraulic is None):
            raise ValueError("hydraulic force mode needs nose_hydraulic and main_hydraulic")

    def gain_arrays(self):
        """(kp, ki, kd) as length-3 arrays in gear order nose, left, right."""
        n, m = self.nose_gains, self.main_gains
        return (np.array([n.kp, m.kp, m.kp]),
                np.array([n.ki, m.ki, m.ki]),
                np.array([n.kd, m.kd, m.kd]))


@dataclass
class ControllerState:
    """Discrete PID memory per gear; fresh instances start at rest."""

    integral: np.ndarray = field(default_factory=lambda: np.zeros(3))
    prev_error: np.ndarray = field(default_factory=lambda: np.zeros(3))
    prev_flow: np.ndarray = field(default_factory=lambda: np.zeros(3))
    prev_time: float = 0.0

    def reset(self):
        self.integral = np.zeros_like(self.integral)
        self.prev_error = np.zeros_like(self.prev_error)
        self.prev_flow = np.zeros_like(self.prev_flow)
        self.prev_time = 0.0


def ziegler_nichols_gains() -> ControlConfig:
    return ControlConfig(nose_gains=PidGains(0.2, 2.5, 0.0076),
                         main_gains=PidGains(0.5, 275.0, 0.0003))


def error_signals(state: State, params: AircraftParams, reference: float = 0.0) -> np.ndarray:
    """(e_n, e_l, e_r): reference strut rate minus each strut's relative velocity."""
    return reference - strut_map(params) @ state.qdot


def pid_force(gains, e, ctl_state: ControllerState, dt: float):
    """One discrete PID update; mutates ``ctl_state``.

    Trapezoidal integral and backward-difference derivative.  ``gains`` is a
    PidGains or a ``(kp, ki, kd)`` triple of per-gear arrays; ``e`` has the
    shape of the state's memory arrays (or is scalar with scalar memory).
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    if isinstance(gains, PidGains):
        kp, ki, kd = gains.kp, gains.ki, gains.kd
    else:
        kp, ki, kd = gains
    e = np.asarray(e, dtype=float)
    integral = ctl_state.integral + 0.5 * dt * (e + ctl_state.prev_error)
    derivative = (e - ctl_state.prev_error) / dt
    ctl_state.integral = integral
    ctl_state.prev_error = e
    ctl_state.prev_time = ctl_state.prev_time + dt
    return kp * e + ki * integral + kd * derivative


def hydraulic_force(hyd: HydraulicParams, valve_displacement, prev_q, dt: float):
    """Actuator force and the new valve flow, as ``(force, q)``."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    if not hyd.p_high > hyd.p_low:
        raise ValueError("p_high must exceed p_low")
    q = hyd.flow_gain * np.asarray(valve_displacement, dtype=float)
    qdot = (q - prev_q) / dt
    return hyd.ka * q + hyd.kb * qdot * np.abs(q), q


def active_forces(config: ControlConfig, state: State, ctl_state: ControllerState,
                  params: AircraftParams, dt: float) -> np.ndarray:
    e = error_signals(state, params, config.reference)
    out = pid_force(config.gain_arrays(), e, ctl_state, dt)
    if config.force_mode == DIRECT:
        return out
    forces = np.empty(3)
    flows = np.empty(3)
    for i, hyd in enumerate((config.nose_hydraulic, config.main_hydraulic, config.main_hydraulic)):
        forces[i], flows[i] = hydraulic_force(hyd, out[i], ctl_state.prev_flow[i], dt)
    ctl_state.prev_flow = flows
    return forces


class PassiveController:
    """No actuation.  Provided so every configuration has a controller object."""

    def reset(self):
        pass

    def forces(self, t, x, params, dt):
        return np.zeros(3)

    def linear_form(self, params, dt):
        return (np.zeros((3, NSTATE)), np.zeros((3, 0)), np.zeros((0, NSTATE)),
                np.zeros((0, 0)), np.zeros(0))


class Controller:
    """Stateful PID force provider for :func:`activegear.dynamics.simulate`."""

    def __init__(self, config: ControlConfig):
        self.config = config
        self.memory = ControllerState()

    def reset(self):
        self.memory.reset()

    def forces(self, t, x, params, dt):
        state = x if isinstance(x, State) else State.from_vector(x)
        return active_forces(self.config, state, self.memory, params, dt)

    def __call__(self, t, state, params, dt):
        return self.forces(t, state, params, dt)

    def linear_form(self, params: AircraftParams, dt: float):
        """Closed-loop matrices when the control law is linear, else None.

        With memory ``m = (integral, prev_error)`` the direct PID law reads
        ``u = Kx x + Km m`` and ``m+ = Mx x + Mm m``.
        """
        cfg = self.config
        if cfg.force_mode != DIRECT or cfg.reference != 0.0:
            return None
        kp, ki, kd = cfg.gain_arrays()
        C = np.zeros((3, NSTATE))
        C[:, NDOF:] = -strut_map(params)
        h = dt
        P, I_, D = np.diag(kp), np.diag(ki), np.diag(kd)
        eye = np.eye(3)
        Kx = (P + I_ * (h / 2.0) + D / h) @ C
        Km = np.hstack([I_, I_ * (h / 2.0) - D / h])
        Mx = np.vstack([(h / 2.0) * C, C])
        Mm = np.block([[eye, (h / 2.0) * eye], [np.zeros((3, 3)), np.zeros((3, 3))]])
        return Kx, Km, Mx, Mm, np.zeros(6)


def make_controller(config: Optional[ControlConfig]):
    return PassiveController() if config is None else Controller(config)


def with_gains(config: ControlConfig, nose: PidGains, main: PidGains) -> ControlConfig:
    return replace(config, nose_gains=nose, main_gains=main)
