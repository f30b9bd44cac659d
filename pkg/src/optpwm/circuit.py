"""Exact periodic steady-state current of an R-L branch driven by a pulse train.

On every constant-voltage piece ``(s, e)`` with level ``v`` the current is

    i(t) = v / R + A * exp(-(t - s) / tau),      tau = L / R,

so a ``PiecewiseCurrent`` stores, per piece, the start time, the offset
``v / R`` and the coefficient ``A`` referenced to the piece start.  Only
non-positive exponents are ever evaluated, which keeps small ``L / R``
ratios (``R t / L`` in the hundreds) finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from optpwm.waveform import SwitchingSchedule, require_valid, voltage_samples


@dataclass(frozen=True)
class RlBranch:
    R: float
    L: float

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("R must be positive")
        if not self.L > 0:
            raise ValueError("L must be positive")

    @property
    def tau(self) -> float:
        return self.L / self.R

    def impedance(self, omega: float) -> float:
        return math.hypot(self.R, omega * self.L)


@dataclass(frozen=True)
class ReferenceSinusoid:
    """``amplitude * sin(2 pi frequency t - phase)``."""

    amplitude: float
    phase: float
    frequency: float

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError("reference amplitude must be positive")

    def __call__(self, t):
        return self.amplitude * np.sin(2.0 * math.pi * self.frequency * np.asarray(t) - self.phase)


@dataclass(frozen=True)
class PiecewiseCurrent:
    """Piecewise-exponential current over ``[0, span)``.

    ``span`` is ``T/2`` for the usual antiperiodic representation (the
    second half period is the negated copy) or ``T`` when the current was
    solved without assuming half-wave symmetry.
    """

    period: float
    tau: float
    starts: np.ndarray
    coeffs: np.ndarray
    offsets: np.ndarray
    span: float
    scale: float  # Vo / R, used for relative tolerances

    @property
    def antiperiodic(self) -> bool:
        return self.span < self.period

    @property
    def ends(self) -> np.ndarray:
        return np.append(self.starts[1:], self.span)

    @property
    def omega(self) -> float:
        return 2.0 * math.pi / self.period

    def __call__(self, t):
        return current_samples(self, t)

    def boundary_values(self) -> tuple[np.ndarray, np.ndarray]:
        """Left and right limits at every internal piece boundary."""
        widths = self.ends - self.starts
        left = self.offsets + self.coeffs * np.exp(-widths / self.tau)
        right = self.offsets + self.coeffs
        return left[:-1], right[1:]

    def continuity_error(self) -> float:
        left, right = self.boundary_values()
        inner = float(np.max(np.abs(left - right))) if len(left) else 0.0
        end = self.offsets[-1] + self.coeffs[-1] * math.exp(-(self.span - self.starts[-1]) / self.tau)
        start = self.offsets[0] + self.coeffs[0]
        wrap = abs(end + start) if self.antiperiodic else abs(end - start)
        return max(inner, wrap)


def _pieces(schedule: SwitchingSchedule, span: float) -> tuple[np.ndarray, np.ndarray]:
    """Piece starts on [0, span) and the voltage level on each."""
    T = schedule.period
    half = schedule.half_period
    ts = np.asarray(schedule.instants)
    edges = np.concatenate([[0.0], (ts + schedule.offset) % half])
    if span > half:
        edges = np.concatenate([edges, edges + half])
    starts = np.unique(edges)
    starts = starts[(starts >= 0.0) & (starts < span)]
    ends = np.append(starts[1:], span)
    keep = ends - starts > 1e-15 * T
    starts, ends = starts[keep], ends[keep]
    levels = voltage_samples(schedule, 0.5 * (starts + ends))
    return starts, levels


def _solve(starts, levels, span, tau, R, antiperiodic):
    ends = np.append(starts[1:], span)
    decay = np.exp(-(ends - starts) / tau)
    targets = levels / R
    # response from zero initial current, then fix i(0) by the wrap condition
    x = 0.0
    for d, v in zip(decay.tolist(), targets.tolist()):
        x = v + (x - v) * d
    total = math.exp(-span / tau)
    i0 = -x / (1.0 + total) if antiperiodic else x / (1.0 - total)
    values = np.empty(len(starts))
    x = i0
    for k, (d, v) in enumerate(zip(decay.tolist(), targets.tolist())):
        values[k] = x
        x = v + (x - v) * d
    return values - targets, targets


def steady_state_current(
    schedule: SwitchingSchedule, branch: RlBranch, antiperiodic: bool = True
) -> PiecewiseCurrent:
    """Periodic steady-state current of ``L di/dt + R i = v(t)``.

    With ``antiperiodic=False`` the full period is solved under plain
    periodicity, so half-wave symmetry of the result is an outcome rather
    than an assumption.
    """
    require_valid(schedule)
    span = schedule.half_period if antiperiodic else schedule.period
    starts, levels = _pieces(schedule, span)
    coeffs, offsets = _solve(starts, levels, span, branch.tau, branch.R, antiperiodic)
    return PiecewiseCurrent(
        schedule.period, branch.tau, starts, coeffs, offsets, span, schedule.amplitude / branch.R
    )


def current_samples(current: PiecewiseCurrent, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    u = np.mod(t, current.period)
    sign = np.ones_like(u)
    if current.antiperiodic:
        second = u >= current.span
        u = np.where(second, u - current.span, u)
        sign = np.where(second, -1.0, 1.0)
    k = np.clip(np.searchsorted(current.starts, u, side="right") - 1, 0, len(current.starts) - 1)
    value = current.offsets[k] + current.coeffs[k] * np.exp(-(u - current.starts[k]) / current.tau)
    return sign * value


def current_at(current: PiecewiseCurrent, t: float) -> float:
    return float(current_samples(current, t))


def textbook_coefficients(schedule: SwitchingSchedule, branch: RlBranch) -> np.ndarray:
    """Coefficients ``A_1 .. A_2N+1`` of ``A_j exp(-R t / L)`` per piece.

    This is the textbook form with growing exponentials ``exp(R t_j / L)``;
    it overflows once ``R T / 2L`` exceeds ~700 and is kept only as a
    cross-check of ``steady_state_current`` in well conditioned cases.
    """
    require_valid(schedule)
    r = 1.0 / branch.tau
    ts = np.asarray(schedule.instants)
    signs = (-1.0) ** np.arange(1, len(ts) + 1)
    terms = signs * np.exp(r * ts)
    scale = schedule.amplitude / branch.R
    w = math.exp(-r * schedule.half_period)
    a1 = -scale * terms.sum() / (1.0 + w) * w
    return np.concatenate([[a1], a1 + scale * np.cumsum(terms)])


def combine(
    parts: list[tuple[float, PiecewiseCurrent, float]],
    voltage,
    R: float,
    scale: float,
) -> PiecewiseCurrent:
    """Weighted sum ``sum(w * c(t + shift))`` of antiperiodic currents.

    ``voltage`` is the matching combined forcing, used for the per-piece
    offsets.  Pieces are split at the union of all shifted boundaries.
    """
    first = parts[0][1]
    half = first.span
    edges = [np.array([0.0])]
    for _, c, shift in parts:
        edges.append(np.mod(c.starts - shift, half))
    starts = np.unique(np.concatenate(edges))
    ends = np.append(starts[1:], half)
    keep = ends - starts > 1e-15 * first.period
    starts, ends = starts[keep], ends[keep]
    values = sum(w * current_samples(c, starts + shift) for w, c, shift in parts)
    mids = 0.5 * (starts + ends)
    offsets = voltage(mids) / R
    return PiecewiseCurrent(first.period, first.tau, starts, values - offsets, offsets, half, scale)


def phase_current_a(vab: SwitchingSchedule, branch: RlBranch) -> PiecewiseCurrent:
    """Phase-a current of a balanced star load fed by the line voltages.

    ``i_a(t) = (i_ab(t) - i_ab(t + T/3)) / 3`` where ``i_ab`` is the branch
    current driven by ``v_ab`` alone.
    """
    T = vab.period
    iab = steady_state_current(vab, branch)

    def van(t):
        return (voltage_samples(vab, t) - voltage_samples(vab, t + T / 3.0)) / 3.0

    return combine(
        [(1.0 / 3.0, iab, 0.0), (-1.0 / 3.0, iab, T / 3.0)], van, branch.R, iab.scale
    )


def reference_current(config, branch: RlBranch, three_phase: bool | None = None) -> ReferenceSinusoid:
    """Ideal sinusoidal current for the configured fundamental voltage.

    Single phase: ``Vm / |Z|`` lagging by ``atan(wL/R)``.  Three phase
    (phase current): amplitude divided by sqrt(3), extra lag of pi/6.
    """
    if three_phase is None:
        three_phase = hasattr(config, "P")
    w = 2.0 * math.pi * config.f
    amplitude = config.m * config.Vo / branch.impedance(w)
    phase = math.atan2(w * branch.L, branch.R)
    if three_phase:
        amplitude /= math.sqrt(3.0)
        phase += math.pi / 6.0
    return ReferenceSinusoid(amplitude, phase, config.f)


def resistance_from_amplitude(
    Vm: float, f: float, L: float, Im: float, three_phase: bool = False
) -> float:
    """Resistance giving reference current amplitude ``Im`` at voltage ``Vm``."""
    z = Vm / Im
    if three_phase:
        z /= math.sqrt(3.0)
    x = 2.0 * math.pi * f * L
    if z <= x:
        raise ValueError(f"Im={Im} A unreachable: |Z|={z:.6g} ohm <= wL={x:.6g} ohm")
    return math.sqrt(z * z - x * x)
