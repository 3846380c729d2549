"""ITAE-based scalar objectives computed from a simulated trajectory.

Type 1 sums the ITAE of all six displacements, velocities and accelerations.
Type 2 sums the ITAE of the three strut forces and the three tyre forces.
Both are plain sums of mixed units unless weights are supplied.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dynamics import NDOF, AircraftParams, Trajectory, strut_map

TYPE1_SIGNALS = 3 * NDOF
TYPE2_SIGNALS = 6


@dataclass(frozen=True)
class ForceSignals:
    suspension: np.ndarray  # (n, 3): Fs1, Fs2, Fs3
    tyre: np.ndarray  # (n, 3): Ft1, Ft2, Ft3


def itae(signal, times) -> float:
    """Trapezoidal ``integral t * |x(t)| dt`` over the sampled record."""
    x = np.asarray(signal, dtype=float)
    t = np.asarray(times, dtype=float)
    if x.shape != t.shape:
        raise ValueError(f"signal shape {x.shape} does not match times shape {t.shape}")
    if t.size < 2:
        raise ValueError("itae needs at least two samples")
    return float(np.trapezoid(t * np.abs(x), t))


def _itae_columns(columns: np.ndarray, times: np.ndarray) -> np.ndarray:
    return np.trapezoid(times[:, None] * np.abs(columns), times, axis=0)


def _weights(weights: Optional[Sequence[float]], n: int) -> np.ndarray:
    if weights is None:
        return np.ones(n)
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise ValueError(f"expected {n} weights, got shape {w.shape}")
    return w


def objective_type1(traj: Trajectory, weights: Optional[Sequence[float]] = None) -> float:
    """Displacement, velocity and acceleration ITAE total.

    ``weights`` (length 18, ordered displacements, velocities, accelerations)
    default to ones.
    """
    cols = np.hstack([traj.coords, traj.velocities, traj.accelerations])
    return float(_itae_columns(cols, traj.times) @ _weights(weights, TYPE1_SIGNALS))


def force_signals(traj: Trajectory, params: AircraftParams) -> ForceSignals:
    S = strut_map(params)
    rd = traj.coords @ S.T
    rv = traj.velocities @ S.T
    ks = np.array([params.ks1, params.ks2, params.ks3])
    cs = np.array([params.cs1, params.cs2, params.cs3])
    kt = np.array([params.kt1, params.kt2, params.kt3])
    suspension = ks * rd + cs * rv + traj.control_forces
    tyre = kt * traj.coords[:, 3:6]
    return ForceSignals(suspension, tyre)


def objective_type2(traj: Trajectory, params: AircraftParams,
                    weights: Optional[Sequence[float]] = None) -> float:
    """Strut-force plus tyre-force ITAE total (``weights`` length 6)."""
    fs = force_signals(traj, params)
    cols = np.hstack([fs.suspension, fs.tyre])
    return float(_itae_columns(cols, traj.times) @ _weights(weights, TYPE2_SIGNALS))


def evaluate_objective(objective_type: int, traj: Trajectory, params: AircraftParams,
                       weights: Optional[Sequence[float]] = None) -> float:
    if objective_type == 1:
        return objective_type1(traj, weights)
    if objective_type == 2:
        return objective_type2(traj, params, weights)
    raise ValueError(f"objective type must be 1 or 2, got {objective_type!r}")
