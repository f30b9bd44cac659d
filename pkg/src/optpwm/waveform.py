"""Half-wave symmetric rectangular pulse trains.

A schedule is described by the switching instants ``t_1 < t_2 < ... < t_2N``
inside the half period ``(0, T/2)``.  The voltage is ``0`` on
``(t_2j, t_2j+1)`` and ``+Vo`` on ``(t_2j+1, t_2j+2)``; the second half
period is the negated copy, ``v(t + T/2) = -v(t)``.

An optional ``offset`` delays the whole waveform, ``v(t) = base(t - offset)``,
which is how shifted line voltages of a three-phase set are represented.
"""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class ScheduleError(ValueError):
    """Raised when a switching schedule violates its ordering invariants."""


@dataclass(frozen=True)
class SwitchingSchedule:
    period: float
    amplitude: float
    instants: tuple[float, ...]
    offset: float = 0.0
    groups: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "instants", tuple(float(t) for t in self.instants))
        if self.groups is not None:
            object.__setattr__(self, "groups", tuple(self.groups))

    @property
    def half_period(self) -> float:
        return 0.5 * self.period

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.period

    @property
    def pulse_count(self) -> int:
        return len(self.instants) // 2

    def pulses(self) -> list[tuple[float, float]]:
        """(rise, fall) pairs of the positive pulses in the first half period."""
        ts = self.instants
        return [(ts[2 * j], ts[2 * j + 1]) for j in range(len(ts) // 2)]

    def shifted(self, delay: float) -> "SwitchingSchedule":
        """Return the waveform delayed by ``delay`` seconds."""
        return SwitchingSchedule(
            self.period, self.amplitude, self.instants, self.offset + delay, self.groups
        )

    def scaled(self, factor: float) -> "SwitchingSchedule":
        return SwitchingSchedule(
            self.period, self.amplitude * factor, self.instants, self.offset, self.groups
        )

    def reversed(self) -> "SwitchingSchedule":
        """Time reversal about T/4: t -> T/2 - t."""
        half = self.half_period
        return SwitchingSchedule(
            self.period,
            self.amplitude,
            tuple(half - t for t in reversed(self.instants)),
            -self.offset,
        )

    def on_time(self) -> float:
        """Total time at +Vo within the first half period."""
        return math.fsum(b - a for a, b in self.pulses())

    def breakpoints(self) -> list[tuple[float, float]]:
        """(start, level) of the constant pieces over one full period [0, T).

        Offsets are folded in, so the list describes the waveform as seen on
        the absolute time axis.
        """
        T = self.period
        half = self.half_period
        edges = [0.0]
        for t in self.instants:
            edges.append(t)
        for t in self.instants:
            edges.append(t + half)
        edges.append(half)
        shifted = sorted({(e + self.offset) % T for e in edges} | {0.0})
        return [(s, voltage_at(self, s)) for s in shifted]


def validate(schedule: SwitchingSchedule) -> str | None:
    """Return ``None`` when the schedule is well formed, else a description.

    Instants must be non-decreasing and lie within ``[0, T/2]``.  Equal
    neighbouring instants are accepted: within a pulse they make a
    zero-width (absent) pulse, across pulses they are touching edges.
    """
    if not schedule.period > 0:
        return "period must be positive"
    if not schedule.amplitude > 0:
        return "amplitude must be positive"
    ts = schedule.instants
    if len(ts) == 0:
        return "no instants"
    if len(ts) % 2:
        return "odd count"
    if not all(math.isfinite(t) for t in ts):
        return "non-finite instant"
    half = schedule.half_period
    for k in range(1, len(ts)):
        if ts[k] < ts[k - 1]:
            return f"non-monotone at k={k + 1}"
    if ts[0] < 0.0 or ts[-1] > half:
        return "instant outside half period"
    return None


def require_valid(schedule: SwitchingSchedule) -> SwitchingSchedule:
    problem = validate(schedule)
    if problem is not None:
        raise ScheduleError(problem)
    return schedule


def voltage_at(schedule: SwitchingSchedule, t: float) -> float:
    """Instantaneous voltage; right-limit at an exact switching instant."""
    T = schedule.period
    u = (t - schedule.offset) % T
    sign = 1.0
    if u >= schedule.half_period:
        u -= schedule.half_period
        sign = -1.0
    count = bisect.bisect_right(schedule.instants, u)
    return sign * schedule.amplitude if count % 2 else 0.0


def voltage_samples(schedule: SwitchingSchedule, t: np.ndarray) -> np.ndarray:
    """Vectorised ``voltage_at``."""
    T = schedule.period
    u = np.mod(np.asarray(t, dtype=float) - schedule.offset, T)
    neg = u >= schedule.half_period
    u = np.where(neg, u - schedule.half_period, u)
    count = np.searchsorted(np.asarray(schedule.instants), u, side="right")
    level = np.where(count % 2 == 1, schedule.amplitude, 0.0)
    return np.where(neg, -level, level)


def is_quarter_wave_symmetric(schedule: SwitchingSchedule, tol: float) -> bool:
    """True iff ``t_k + t_{2N+1-k} = T/2`` within ``tol`` for every k."""
    ts = schedule.instants
    half = schedule.half_period
    n = len(ts)
    return all(abs(ts[k] + ts[n - 1 - k] - half) <= tol for k in range(n))


def voltage_harmonic(schedule: SwitchingSchedule, h: int) -> tuple[float, float]:
    """Exact Fourier component of order ``h`` as (amplitude, phase).

    The component is ``amplitude * sin(h w t + phase)``.  Each pulse of both
    half periods contributes ``(exp(-jhwa) - exp(-jhwb)) / (jhw)``, so even
    orders cancel numerically rather than by construction.
    """
    if h < 1:
        raise ValueError("harmonic order must be >= 1")
    c = _complex_coefficient(schedule, h)
    return abs(c), math.atan2(c.real, -c.imag)


def _complex_coefficient(schedule: SwitchingSchedule, h: int) -> complex:
    # (2/T) * integral over one period of v(t) exp(-j h w t)
    w = h * schedule.omega
    half = schedule.half_period
    ts = np.asarray(schedule.instants)
    a, b = ts[0::2], ts[1::2]
    first = np.sum(np.exp(-1j * w * a) - np.exp(-1j * w * b))
    second = -np.sum(np.exp(-1j * w * (a + half)) - np.exp(-1j * w * (b + half)))
    c = schedule.amplitude * (first + second) / (1j * w) * (2.0 / schedule.period)
    return complex(c * np.exp(-1j * w * schedule.offset))


def write_schedule_csv(path, schedule: SwitchingSchedule, header_comment: str = "") -> None:
    """Dump instants as ``k,t_k_seconds`` (plus ``group`` when known).

    ``header_comment`` lines must start with ``#``; readers skip them.
    """
    with open(path, "w", newline="") as fh:
        fh.write(header_comment)
        writer = csv.writer(fh, lineterminator="\n")
        header = ["k", "t_k_seconds"]
        if schedule.groups is not None:
            header.append("group")
        writer.writerow(header)
        for k, t in enumerate(schedule.instants, start=1):
            row = [k, repr(t)]
            if schedule.groups is not None:
                row.append(schedule.groups[k - 1])
            writer.writerow(row)


def read_schedule_csv(path, period: float, amplitude: float) -> SwitchingSchedule:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    instants = [float(r["t_k_seconds"]) for r in rows]
    groups = [r["group"] for r in rows] if rows and "group" in rows[0] else None
    return require_valid(SwitchingSchedule(period, amplitude, instants, groups=groups))


def from_pulses(
    period: float, amplitude: float, pulses: Iterable[Sequence[float]]
) -> SwitchingSchedule:
    instants: list[float] = []
    for a, b in pulses:
        instants.extend((a, b))
    return require_valid(SwitchingSchedule(period, amplitude, instants))
