"""Single-phase sinusoidal PWM schedules parameterised by displacement factors.

Each half period is cut into N equal subintervals.  The pulse in subinterval
``l`` has width ``(m T / 2N) sin(w tau_l)`` with ``tau_l`` the subinterval
centre, and its rising edge sits ``alpha_l`` of the way through the
remaining zero time.  ``alpha_l = 0.5`` everywhere is conventional centred
PWM.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from optpwm.waveform import SwitchingSchedule, require_valid


@dataclass(frozen=True)
class SinglePhaseConfig:
    Vo: float
    f: float
    m: float
    N: int

    def __post_init__(self):
        if not self.Vo > 0:
            raise ValueError("Vo must be positive")
        if not self.f > 0:
            raise ValueError("f must be positive")
        if not 0.0 < self.m < 1.0:
            raise ValueError("modulation index must satisfy 0 < m < 1")
        if int(self.N) != self.N or self.N < 3 or self.N % 2 == 0:
            raise ValueError("N must be an odd integer >= 3")

    @property
    def period(self) -> float:
        return 1.0 / self.f

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.f

    @property
    def Vm(self) -> float:
        return self.m * self.Vo

    @property
    def pulse_count(self) -> int:
        return self.N


@dataclass(frozen=True)
class DisplacementFactors:
    """Full displacement-factor vector; ``free`` is the independent half."""

    alphas: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(a) for a in self.alphas)
        if not values:
            raise ValueError("empty displacement factor vector")
        for a in values:
            if not (0.0 <= a <= 1.0):
                raise ValueError(f"displacement factor {a!r} outside [0, 1]")
        object.__setattr__(self, "alphas", values)

    def __len__(self) -> int:
        return len(self.alphas)

    @property
    def free_count(self) -> int:
        return (len(self.alphas) - 1) // 2

    @property
    def free(self) -> tuple[float, ...]:
        return self.alphas[: self.free_count]

    def is_paired(self, tol: float = 1e-12) -> bool:
        n = len(self.alphas)
        return all(abs(self.alphas[l] + self.alphas[n - 1 - l] - 1.0) <= tol for l in range(n))

    @classmethod
    def conventional(cls, count: int) -> "DisplacementFactors":
        return cls((0.5,) * count)


def paired_from_free(free: Sequence[float], count: int) -> DisplacementFactors:
    """Mirror ``free`` through ``a_l + a_{count+1-l} = 1`` (shared by both phases)."""
    free = [float(a) for a in free]
    if count % 2 == 0:
        raise ValueError("pulse count must be odd")
    if len(free) != (count - 1) // 2:
        raise ValueError(f"expected {(count - 1) // 2} free factors, got {len(free)}")
    for a in free:
        if not (0.0 <= a <= 1.0):
            raise ValueError(f"displacement factor {a!r} outside [0, 1]")
    return DisplacementFactors(tuple(free) + (0.5,) + tuple(1.0 - a for a in reversed(free)))


def expand_alphas(free: Sequence[float], N: int | None = None) -> DisplacementFactors:
    """Full N-vector from the (N-1)/2 independent factors."""
    if N is None:
        N = 2 * len(free) + 1
    return paired_from_free(free, N)


def subinterval_centers(config: SinglePhaseConfig) -> np.ndarray:
    T, N = config.period, config.N
    return T / (2 * N) * (np.arange(1, N + 1) - 0.5)


def pulse_widths(config: SinglePhaseConfig) -> tuple[np.ndarray, np.ndarray]:
    """Pulse widths and zero times per subinterval."""
    T, N = config.period, config.N
    slot = T / (2 * N)
    pulse = config.m * slot * np.sin(config.omega * subinterval_centers(config))
    return pulse, slot - pulse


def build_schedule(config: SinglePhaseConfig, alphas: DisplacementFactors) -> SwitchingSchedule:
    if len(alphas) != config.N:
        raise ValueError(f"expected {config.N} displacement factors, got {len(alphas)}")
    T, N = config.period, config.N
    slot = T / (2 * N)
    pulse, zero = pulse_widths(config)
    a = np.asarray(alphas.alphas)
    rise = slot * np.arange(N) + a * zero
    fall = rise + pulse
    instants = np.empty(2 * N)
    instants[0::2] = rise
    instants[1::2] = fall
    # flush pulses (alpha 0 or 1) can overshoot a slot edge by one ulp
    instants = np.clip(np.maximum.accumulate(instants), 0.0, 0.5 * T)
    return require_valid(SwitchingSchedule(T, config.Vo, tuple(instants)))
