"""Six-degree-of-freedom touchdown model of an aircraft on three landing gears.

Generalized coordinates are ``q = (z, theta, phi, z1, z2, z3)``: airframe
bounce, pitch and roll followed by the vertical displacements of the nose,
left-main and right-main gear masses.  Displacements are positive downward,
so a touchdown sink speed enters as a positive initial velocity.  Weight and
lift cancel, which leaves the homogeneous linear system

    mass @ q'' + damping @ q' + stiffness @ q = force_vector(f1, f2, f3)

driven only by the active control forces.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Tuple

import numpy as np

NDOF = 6
NSTATE = 2 * NDOF
COORD_NAMES = ("z", "theta", "phi", "z1", "z2", "z3")

DEFAULT_DT = 1e-3
DEFAULT_DURATION = 5.0
DEFAULT_MAX_STEPS = 10_000_000


class IntegrationError(RuntimeError):
    """Raised when the integrated state stops being finite."""


class StepBudgetError(ValueError):
    """Raised when duration / dt exceeds the configured step budget."""


@dataclass(frozen=True)
class AircraftParams:
    """Masses, inertias, spring/damper rates and gear geometry.

    ``a`` is the nose-gear arm ahead of the centre of gravity, ``b`` the
    main-gear arm behind it, ``d``/``e`` the lateral arms of the left/right
    main gears.  The nose gear sits at lateral offset ``d - e``.
    """

    sprung_mass: float
    pitch_inertia: float
    roll_inertia: float
    m1: float
    m2: float
    m3: float
    ks1: float
    ks2: float
    ks3: float
    cs1: float
    cs2: float
    cs3: float
    kt1: float
    kt2: float
    kt3: float
    a: float
    b: float
    d: float
    e: float

    _POSITIVE = ("sprung_mass", "pitch_inertia", "roll_inertia", "m1", "m2", "m3",
                 "ks1", "ks2", "ks3", "kt1", "kt2", "kt3", "a", "b", "d", "e")
    _NON_NEGATIVE = ("cs1", "cs2", "cs3")

    def __post_init__(self):
        for name in self._POSITIVE:
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        for name in self._NON_NEGATIVE:
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")

    @classmethod
    def a320(cls) -> "AircraftParams":
        """Airbus 320-200 values used throughout the landing studies."""
        return cls(
            sprung_mass=64500.0, pitch_inertia=3781268.0, roll_inertia=1278370.0,
            m1=300.0, m2=300.0, m3=300.0,
            ks1=15e5, ks2=15e5, ks3=15e5,
            cs1=1e5, cs2=1e5, cs3=1e5,
            kt1=3e6, kt2=3e6, kt3=3e6,
            a=10.88, b=1.76, d=3.795, e=3.795,
        )

    def with_suspension(self, nose_cs=None, nose_ks=None, main_cs=None, main_ks=None):
        """Copy with strut damping/stiffness replaced on the nose and/or both mains."""
        changes = {}
        if nose_cs is not None:
            changes["cs1"] = float(nose_cs)
        if nose_ks is not None:
            changes["ks1"] = float(nose_ks)
        if main_cs is not None:
            changes["cs2"] = changes["cs3"] = float(main_cs)
        if main_ks is not None:
            changes["ks2"] = changes["ks3"] = float(main_ks)
        return dataclasses.replace(self, **changes)

    def with_mass_error(self, fraction: float) -> "AircraftParams":
        if fraction <= -1:
            raise ValueError(f"mass error must be > -1, got {fraction!r}")
        return dataclasses.replace(self, sprung_mass=self.sprung_mass * (1.0 + fraction))

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data) -> "AircraftParams":
        base = cls.a320().to_dict()
        unknown = set(data) - set(base)
        if unknown:
            raise ValueError(f"unknown aircraft parameter(s): {sorted(unknown)}")
        base.update({k: float(v) for k, v in data.items()})
        return cls(**base)


@dataclass(frozen=True)
class State:
    """Generalized coordinates and their rates."""

    q: np.ndarray
    qdot: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).reshape(-1)
        qdot = np.asarray(self.qdot, dtype=float).reshape(-1)
        if q.shape != (NDOF,) or qdot.shape != (NDOF,):
            raise ValueError("State needs exactly 6 coordinates and 6 velocities")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(qdot))):
            raise ValueError("State entries must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qdot", qdot)

    @classmethod
    def zero(cls) -> "State":
        return cls(np.zeros(NDOF), np.zeros(NDOF))

    @classmethod
    def from_vector(cls, x) -> "State":
        x = np.asarray(x, dtype=float)
        return cls(x[:NDOF], x[NDOF:])

    def vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.qdot])


class SystemMatrices(NamedTuple):
    mass: np.ndarray
    damping: np.ndarray
    stiffness: np.ndarray


@dataclass(frozen=True)
class RelativeKinematics:
    """Strut relative displacement/velocity/acceleration, ordered (nose, left, right)."""

    rd: np.ndarray
    rv: np.ndarray
    ra: Optional[np.ndarray] = None

    @property
    def rd_f(self): return self.rd[0]

    @property
    def rd_rl(self): return self.rd[1]

    @property
    def rd_rr(self): return self.rd[2]

    @property
    def rv_f(self): return self.rv[0]

    @property
    def rv_rl(self): return self.rv[1]

    @property
    def rv_rr(self): return self.rv[2]


def strut_map(params: AircraftParams) -> np.ndarray:
    """3x6 matrix taking generalized coordinates to strut compressions.

    The same matrix maps velocities to strut rates and accelerations to
    strut accelerations.
    """
    a, b, d, e = params.a, params.b, params.d, params.e
    return np.array([
        [1.0, -a, -(d - e), -1.0, 0.0, 0.0],
        [1.0, b, -d, 0.0, -1.0, 0.0],
        [1.0, b, e, 0.0, 0.0, -1.0],
    ])


def force_map(params: AircraftParams) -> np.ndarray:
    """6x3 matrix taking gear forces (f1, f2, f3) to the generalized force vector."""
    a, b, d, e = params.a, params.b, params.d, params.e
    return np.array([
        [-1.0, -1.0, -1.0],
        [a, -b, -b],
        [d - e, d, -e],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
    ])


def _strut_matrix(params: AircraftParams, r1: float, r2: float, r3: float,
                  tyre: Tuple[float, float, float]) -> np.ndarray:
    a, b, d, e = params.a, params.b, params.d, params.e
    de = d - e
    t1 = -a * r1 + b * r2 + b * r3
    t2 = -de * r1 - d * r2 + e * r3
    t3 = (de * a * r1) - (d * b * r2) + (e * b * r3)
    return np.array([
        [r1 + r2 + r3, t1, t2, -r1, -r2, -r3],
        [t1, a * a * r1 + b * b * r2 + b * b * r3, t3, a * r1, -b * r2, -b * r3],
        [t2, t3, de * de * r1 + d * d * r2 + e * e * r3, de * r1, d * r2, -e * r3],
        [-r1, a * r1, de * r1, r1 + tyre[0], 0.0, 0.0],
        [-r2, -b * r2, d * r2, 0.0, r2 + tyre[1], 0.0],
        [-r3, -b * r3, -e * r3, 0.0, 0.0, r3 + tyre[2]],
    ])


def assemble_matrices(params: AircraftParams) -> SystemMatrices:
    """Mass, damping and stiffness matrices of the touchdown model."""
    if not isinstance(params, AircraftParams):
        raise TypeError("assemble_matrices expects AircraftParams")
    p = params
    mass = np.diag([p.sprung_mass, p.pitch_inertia, p.roll_inertia, p.m1, p.m2, p.m3])
    damping = _strut_matrix(p, p.cs1, p.cs2, p.cs3, (0.0, 0.0, 0.0))
    stiffness = _strut_matrix(p, p.ks1, p.ks2, p.ks3, (p.kt1, p.kt2, p.kt3))
    return SystemMatrices(mass, damping, stiffness)


def relative_kinematics(state: State, params: AircraftParams, accel=None) -> RelativeKinematics:
    S = strut_map(params)
    ra = None if accel is None else S @ np.asarray(accel, dtype=float)
    return RelativeKinematics(S @ state.q, S @ state.qdot, ra)


def force_vector(f1: float, f2: float, f3: float, params: AircraftParams) -> np.ndarray:
    return force_map(params) @ np.array([f1, f2, f3], dtype=float)


def state_derivative(state, forces, matrices: SystemMatrices, params: AircraftParams) -> np.ndarray:
    """``(qdot, qddot)`` as one 12-vector.  ``state`` may be a State or a raw 12-vector."""
    x = state.vector() if isinstance(state, State) else np.asarray(state, dtype=float)
    diag = np.diag(matrices.mass)
    if np.any(diag == 0):
        raise ZeroDivisionError("mass matrix has a zero diagonal entry")
    q, qdot = x[:NDOF], x[NDOF:]
    rhs = force_map(params) @ np.asarray(forces, dtype=float) \
        - matrices.damping @ qdot - matrices.stiffness @ q
    return np.concatenate([qdot, rhs / diag])


ForceProvider = Callable[[float, State], Sequence[float]]


def step(state: State, t: float, dt: float, force_provider: ForceProvider,
         params: AircraftParams, matrices: Optional[SystemMatrices] = None) -> State:
    """Advance one classical RK4 step.

    ``force_provider`` is called once, with the step-start state, and its
    forces are held over all four stages.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    if matrices is None:
        matrices = assemble_matrices(params)
    forces = np.asarray(force_provider(t, state), dtype=float)
    x = state.vector()
    k1 = state_derivative(x, forces, matrices, params)
    k2 = state_derivative(x + 0.5 * dt * k1, forces, matrices, params)
    k3 = state_derivative(x + 0.5 * dt * k2, forces, matrices, params)
    k4 = state_derivative(x + dt * k3, forces, matrices, params)
    x_new = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(x_new)):
        raise IntegrationError(f"non-finite state after step at t={t:.6g}")
    return State.from_vector(x_new)


def state_space(params: AircraftParams, matrices: Optional[SystemMatrices] = None):
    """First-order form ``x' = A x + G f`` with ``x = (q, qdot)`` and ``f = (f1, f2, f3)``."""
    if matrices is None:
        matrices = assemble_matrices(params)
    inv_m = 1.0 / np.diag(matrices.mass)
    A = np.zeros((NSTATE, NSTATE))
    A[:NDOF, NDOF:] = np.eye(NDOF)
    A[NDOF:, :NDOF] = -inv_m[:, None] * matrices.stiffness
    A[NDOF:, NDOF:] = -inv_m[:, None] * matrices.damping
    G = np.zeros((NSTATE, 3))
    G[NDOF:] = inv_m[:, None] * force_map(params)
    return A, G


def rk4_propagator(A: np.ndarray, G: np.ndarray, dt: float):
    """Exact one-step matrices of RK4 on a linear system with held input.

    Returns ``(Phi, Gamma)`` such that one RK4 step from ``x`` under constant
    ``f`` yields ``Phi @ x + Gamma @ f``.
    """
    n = A.shape[0]
    h = dt
    hA = h * A
    hA2 = hA @ hA
    hA3 = hA2 @ hA
    eye = np.eye(n)
    Phi = eye + hA + hA2 / 2.0 + hA3 / 6.0 + hA3 @ hA / 24.0
    Gamma = h * (eye + hA / 2.0 + hA2 / 6.0 + hA3 / 24.0) @ G
    return Phi, Gamma


@dataclass
class Trajectory:
    """Uniformly sampled simulation record.

    ``states`` is ``(n, 12)`` with coordinates then velocities; ``accelerations``
    ``(n, 6)``; ``control_forces`` ``(n, 3)``.
    """

    times: np.ndarray
    states: np.ndarray
    accelerations: np.ndarray
    control_forces: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        if n < 2:
            raise ValueError("trajectory needs at least two samples")
        for name, arr, width in (("states", self.states, NSTATE),
                                 ("accelerations", self.accelerations, NDOF),
                                 ("control_forces", self.control_forces, 3)):
            if arr.shape != (n, width):
                raise ValueError(f"{name} has shape {arr.shape}, expected {(n, width)}")

    def __len__(self):
        return len(self.times)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def coords(self) -> np.ndarray:
        return self.states[:, :NDOF]

    @property
    def velocities(self) -> np.ndarray:
        return self.states[:, NDOF:]

    def scaled(self, factor: float) -> "Trajectory":
        return Trajectory(self.times.copy(), self.states * factor,
                          self.accelerations * factor, self.control_forces * factor)


def accelerations_from(states: np.ndarray, forces: np.ndarray, params: AircraftParams,
                       matrices: Optional[SystemMatrices] = None) -> np.ndarray:
    """Row-wise generalized accelerations for stored states and forces."""
    if matrices is None:
        matrices = assemble_matrices(params)
    q, qdot = states[:, :NDOF], states[:, NDOF:]
    rhs = forces @ force_map(params).T - qdot @ matrices.damping.T - q @ matrices.stiffness.T
    return rhs / np.diag(matrices.mass)


def simulate(params: AircraftParams, initial: State, controller=None,
             duration: float = DEFAULT_DURATION, dt: float = DEFAULT_DT,
             max_steps: int = DEFAULT_MAX_STEPS) -> Trajectory:
    """Integrate the touchdown model from ``initial`` for ``duration`` seconds.

    ``controller`` is None (passive) or an object with the
    :class:`activegear.controller.Controller` interface.  Controllers that
    expose an affine closed-loop form are propagated as one augmented linear
    recursion; the rest are stepped with their forces held across each step.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    if not duration > 0:
        raise ValueError(f"duration must be > 0, got {duration!r}")
    n_steps = int(round(duration / dt))
    if n_steps > max_steps:
        raise StepBudgetError(f"{n_steps} steps exceeds the budget of {max_steps}")
    n_steps = max(n_steps, 1)

    matrices = assemble_matrices(params)
    A, G = state_space(params, matrices)
    Phi, Gamma = rk4_propagator(A, G, dt)
    times = np.arange(n_steps + 1) * dt
    x0 = initial.vector()

    linear = None if controller is None else controller.linear_form(params, dt)
    with np.errstate(over="ignore", invalid="ignore"):
        if controller is None:
            states, forces = _run_passive(Phi, x0, n_steps)
        elif linear is not None:
            states, forces = _run_linear(Phi, Gamma, x0, n_steps, linear)
        else:
            states, forces = _run_general(Phi, Gamma, initial, times, controller, params, dt)

    if not (np.all(np.isfinite(states)) and np.all(np.isfinite(forces))):
        bad = int(np.argmax(~np.all(np.isfinite(states), axis=1) | ~np.all(np.isfinite(forces), axis=1)))
        raise IntegrationError(f"non-finite state at t={times[bad]:.6g} s")
    accel = accelerations_from(states, forces, params, matrices)
    return Trajectory(times, states, accel, forces)


def _run_passive(Phi, x0, n_steps):
    states = np.empty((n_steps + 1, NSTATE))
    states[0] = x0
    x = x0
    for k in range(n_steps):
        x = Phi @ x
        states[k + 1] = x
    return states, np.zeros((n_steps + 1, 3))


def _run_linear(Phi, Gamma, x0, n_steps, linear):
    # Augmented state z = (x, controller memory); u_k = Kx x_k + Km m_k,
    # m_{k+1} = Mx x_k + Mm m_k.
    Kx, Km, Mx, Mm, m0 = linear
    nm = len(m0)
    F = np.zeros((NSTATE + nm, NSTATE + nm))
    F[:NSTATE, :NSTATE] = Phi + Gamma @ Kx
    F[:NSTATE, NSTATE:] = Gamma @ Km
    F[NSTATE:, :NSTATE] = Mx
    F[NSTATE:, NSTATE:] = Mm
    out = np.hstack([Kx, Km])
    z_hist = np.empty((n_steps + 1, NSTATE + nm))
    z = np.concatenate([x0, m0])
    z_hist[0] = z
    for k in range(n_steps):
        z = F @ z
        z_hist[k + 1] = z
    forces = z_hist @ out.T
    return z_hist[:, :NSTATE].copy(), forces


def _run_general(Phi, Gamma, initial, times, controller, params, dt):
    controller.reset()
    n = len(times)
    states = np.empty((n, NSTATE))
    forces = np.empty((n, 3))
    x = initial.vector()
    for k in range(n):
        states[k] = x
        u = np.asarray(controller.forces(times[k], x, params, dt), dtype=float)
        forces[k] = u
        if k + 1 < n:
            x = Phi @ x + Gamma @ u
            if not np.all(np.isfinite(x)):
                states[k + 1:] = np.nan
                forces[k + 1:] = np.nan
                break
    return states, forces


def mechanical_energy(states: np.ndarray, matrices: SystemMatrices) -> np.ndarray:
    """Kinetic plus elastic energy for each row of ``states``."""
    q, qdot = states[:, :NDOF], states[:, NDOF:]
    kin = 0.5 * np.einsum("ij,jk,ik->i", qdot, matrices.mass, qdot)
    pot = 0.5 * np.einsum("ij,jk,ik->i", q, matrices.stiffness, q)
    return kin + pot
