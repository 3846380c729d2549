"""RMS, improvement percentages and one-sided periodograms."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Spectrum:
    frequencies: np.ndarray  # Hz
    psd: np.ndarray  # signal units squared per Hz

    @property
    def df(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0]) if len(self.frequencies) > 1 else 0.0


def rms(signal) -> float:
    x = np.asarray(signal, dtype=float)
    if x.size == 0:
        raise ValueError("rms of an empty series")
    return float(np.sqrt(np.mean(x * x)))


def _round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def improvement_pct(base: float, new: float) -> int:
    """Percentage reduction of ``new`` relative to ``base``, rounded to an integer."""
    if not base > 0:
        raise ValueError(f"improvement baseline must be > 0, got {base!r}")
    return _round_half_away(100.0 * (base - new) / base)


def change_pct(base: float, new: float) -> float:
    """Unrounded relative change ``100 * (new - base) / base``."""
    if not base > 0:
        raise ValueError(f"change baseline must be > 0, got {base!r}")
    return 100.0 * (new - base) / base


def psd(signal, dt: float) -> Spectrum:
    """One-sided rectangular-window periodogram.

    Normalized so that ``sum(psd) * df`` equals the mean square of ``signal``.
    """
    x = np.asarray(signal, dtype=float).reshape(-1)
    n = x.size
    if n < 2:
        raise ValueError("psd needs at least two samples")
    if not dt > 0 or not math.isfinite(dt):
        raise ValueError(f"dt must be finite and > 0, got {dt!r}")
    if not np.all(np.isfinite(x)):
        raise ValueError("psd input must be finite")
    X = np.fft.rfft(x)
    power = X.real ** 2 + X.imag ** 2
    scale = np.full(power.shape, 2.0)
    scale[0] = 1.0
    if n % 2 == 0:
        scale[-1] = 1.0
    values = scale * dt / n * power
    freqs = np.fft.rfftfreq(n, d=dt)
    return Spectrum(freqs, values)
