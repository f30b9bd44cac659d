"""Three-phase sinusoidal PWM line voltages from P displacement factors.

In the first sector ``(0, T/6)`` the line voltages carry the p+ pulses of
``v_ab``, the q- pulses of ``v_bc`` and the r+ pulses of ``v_ca``.  Each of
the P subintervals holds one active stretch of width ``dt_bc``: a ``v_ab``
pulse and a ``v_ca`` pulse back to back (``v_ab`` first for odd ``l``,
``v_ca`` first for even ``l``), while ``v_bc`` is at ``-Vo`` across the
whole stretch.  The stretch starts ``alpha_l * dt_zero`` after the
subinterval start.

``v_ab`` over the half period is then

* p+ : the sector's ``v_ab`` pulses,
* q+ : the sector's ``v_bc`` stretches moved by ``+T/6`` with the sign
  flipped (translational plus half-wave symmetry),
* r+ : the mirror image of p+ about ``T/4``.

``v_bc`` and ``v_ca`` are ``v_ab`` delayed and advanced by ``T/3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from optpwm.single_phase import DisplacementFactors, paired_from_free
from optpwm.waveform import ScheduleError, SwitchingSchedule, require_valid, validate, voltage_samples

COLLISION_TOL = 1e-12  # relative to T


@dataclass(frozen=True)
class ThreePhaseConfig:
    Vo: float
    f: float
    m: float
    P: int

    def __post_init__(self):
        if not self.Vo > 0:
            raise ValueError("Vo must be positive")
        if not self.f > 0:
            raise ValueError("f must be positive")
        if not 0.0 < self.m < 1.0:
            raise ValueError("modulation index must satisfy 0 < m < 1")
        if int(self.P) != self.P or self.P < 3 or self.P % 2 == 0:
            raise ValueError("P must be an odd integer >= 3")

    @property
    def N(self) -> int:
        return 3 * self.P

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
        return self.P


@dataclass(frozen=True)
class SectorPulseSet:
    """Per-subinterval (start, end) pulses inside the first T/6 sector."""

    period: float
    ab: tuple[tuple[float, float], ...]
    ca: tuple[tuple[float, float], ...]
    bc: tuple[tuple[float, float], ...]

    @property
    def P(self) -> int:
        return len(self.ab)


def sector_widths(config: ThreePhaseConfig) -> tuple[np.ndarray, ...]:
    """Arrays ``(dt_ab, dt_bc, dt_ca, dt_zero)`` over l = 1..P."""
    T, P = config.period, config.P
    slot = T / (6 * P)
    wt = config.omega * slot * (np.arange(1, P + 1) - 0.5)
    k = config.m * slot
    ab = k * np.sin(wt)
    bc = -k * np.sin(wt - 2.0 * math.pi / 3.0)
    ca = k * np.sin(wt + 2.0 * math.pi / 3.0)
    return ab, bc, ca, slot - bc


def line_pulse_widths(config: ThreePhaseConfig, l: int) -> tuple[float, float, float, float]:
    """``(dt_ab, dt_bc, dt_ca, dt_zero)`` of subinterval ``l`` (1-based)."""
    if not 1 <= l <= config.P:
        raise IndexError(f"subinterval index {l} outside 1..{config.P}")
    return tuple(float(x[l - 1]) for x in sector_widths(config))


def expand_alphas_3p(free: Sequence[float], P: int | None = None) -> DisplacementFactors:
    if P is None:
        P = 2 * len(free) + 1
    return paired_from_free(free, P)


def build_sector(config: ThreePhaseConfig, alphas: DisplacementFactors) -> SectorPulseSet:
    P = config.P
    if len(alphas) != P:
        raise ValueError(f"expected {P} displacement factors, got {len(alphas)}")
    slot = config.period / (6 * P)
    dab, dbc, dca, dz = sector_widths(config)
    ab, ca, bc = [], [], []
    for l in range(1, P + 1):
        i = l - 1
        start = (l - 1) * slot + alphas.alphas[i] * dz[i]
        stop = start + dbc[i]
        if l % 2:
            mid = start + dab[i]
            ab.append((start, mid))
            ca.append((mid, stop))
        else:
            mid = start + dca[i]
            ca.append((start, mid))
            ab.append((mid, stop))
        bc.append((start, stop))
    return SectorPulseSet(config.period, tuple(ab), tuple(ca), tuple(bc))


def assemble_vab(config: ThreePhaseConfig, sector: SectorPulseSet) -> SwitchingSchedule:
    T = config.period
    half, sixth = 0.5 * T, T / 6.0
    p = [t for pulse in sector.ab for t in pulse]
    q = [t + sixth for pulse in sector.bc for t in pulse]
    r = [half - t for t in reversed(p)]
    tol = COLLISION_TOL * T
    if q[0] - p[-1] < tol:
        raise ScheduleError("edge collision between p+ and q+ groups")
    if r[0] - q[-1] < tol:
        raise ScheduleError("edge collision between q+ and r+ groups")
    groups = ["p+"] * len(p) + ["q+"] * len(q) + ["r+"] * len(r)
    return require_valid(SwitchingSchedule(T, config.Vo, tuple(p + q + r), groups=groups))


def build_vab(config: ThreePhaseConfig, alphas: DisplacementFactors) -> SwitchingSchedule:
    return assemble_vab(config, build_sector(config, alphas))


def line_schedules(vab: SwitchingSchedule) -> tuple[SwitchingSchedule, SwitchingSchedule, SwitchingSchedule]:
    """``(v_ab, v_bc, v_ca)`` with ``v_bc(t) = v_ab(t - T/3)`` and ``v_ca(t) = v_ab(t + T/3)``."""
    third = vab.period / 3.0
    return vab, vab.shifted(third), vab.shifted(-third)


def _edges(*schedules: SwitchingSchedule) -> np.ndarray:
    T = schedules[0].period
    pts = [np.array([0.0, T])]
    for s in schedules:
        ts = np.asarray(s.instants)
        pts.append(np.mod(np.concatenate([ts, ts + s.half_period]) + s.offset, T))
    return np.unique(np.concatenate(pts))


def _probe_points(edges: np.ndarray, tol: float) -> np.ndarray:
    lo, hi = edges[:-1], edges[1:]
    keep = hi - lo > tol
    return 0.5 * (lo[keep] + hi[keep])


def _same(f, g, edges, tol) -> bool:
    t = _probe_points(edges, tol)
    return bool(np.all(f(t) == g(t)))


def _cluster(times: np.ndarray, tol: float) -> list[float]:
    out: list[float] = []
    for t in np.sort(times):
        if not out or t - out[-1] > tol:
            out.append(float(t))
    return out


def validate_three_phase(
    vab: SwitchingSchedule, vbc: SwitchingSchedule, vca: SwitchingSchedule, tol: float | None = None
) -> str | None:
    """``None`` if the three line voltages form a consistent set, else the violated rule."""
    T = vab.period
    if tol is None:
        tol = COLLISION_TOL * T
    for name, s in (("v_ab", vab), ("v_bc", vbc), ("v_ca", vca)):
        problem = validate(s)
        if problem is not None:
            return f"{name}: {problem}"
        if s.period != T:
            return f"{name}: period mismatch"
    third = T / 3.0
    ab = lambda t: voltage_samples(vab, t)  # noqa: E731
    bc = lambda t: voltage_samples(vbc, t)  # noqa: E731
    ca = lambda t: voltage_samples(vca, t)  # noqa: E731

    # S1, translational symmetry
    e = _edges(vab, vbc.shifted(-third), vca.shifted(third))
    if not _same(ab, lambda t: bc(t + third), e, tol):
        return "S1: v_ab(t) != v_bc(t + T/3)"
    if not _same(ab, lambda t: ca(t - third), e, tol):
        return "S1: v_ab(t) != v_ca(t - T/3)"

    # S2, half-wave symmetry
    e = _edges(vab, vab.shifted(-0.5 * T))
    if not _same(ab, lambda t: -ab(t + 0.5 * T), e, tol):
        return "S2: v_ab(t) != -v_ab(t + T/2)"

    # S3, quarter-wave symmetry, plus instant pairing t_k + t_{6P+1-k} = T/2
    e = np.unique(np.concatenate([_edges(vab), np.mod(0.5 * T - _edges(vab), T)]))
    if not _same(ab, lambda t: ab(0.5 * T - t), e, tol):
        return "S3: v_ab(t) != v_ab(T/2 - t)"
    ts = np.asarray(vab.instants)
    if vab.offset != 0.0 or np.max(np.abs(ts + ts[::-1] - 0.5 * T)) > tol:
        return "pairing: t_k + t_(6P+1-k) != T/2"

    # KVL
    e = _edges(vab, vbc, vca)
    t = _probe_points(e, tol)
    if np.any(ab(t) + bc(t) + ca(t) != 0.0):
        return "KVL: v_ab + v_bc + v_ca != 0"

    # one leg switching at a time: every event moves exactly two line
    # voltages by one step each
    step = vab.amplitude
    for te in _cluster(e[(e > 0) & (e < T)], tol):
        before = np.array([f(te - 0.5 * tol) for f in (ab, bc, ca)])
        after = np.array([f(te + 0.5 * tol) for f in (ab, bc, ca)])
        jumps = np.abs(after - before).ravel()
        changed = jumps > 0
        if changed.sum() == 0:
            continue  # touching pulses, nothing switches
        if changed.sum() != 2 or np.any(jumps[changed] != step):
            return f"leg switching: simultaneous transitions at t={te!r}"

    # q- stretches of v_bc in (0, T/6): p and r contributions must alternate
    sixth = T / 6.0
    e = _edges(vab, vbc, vca)
    e = e[(e >= 0.0) & (e <= sixth)]
    mids = _probe_points(np.concatenate([[0.0], e, [sixth]]), tol)
    mids = mids[mids < sixth]
    # judged per subinterval, since flush neighbours can touch
    P = round(len(vab.instants) / 6)
    slot = sixth / P
    order: list[str] = []
    for l in range(P):
        inside = mids[(mids > l * slot) & (mids < (l + 1) * slot)]
        on = inside[bc(inside) < 0]
        if len(on):
            order.append("ab" if ab(on[:1])[0] > 0 else "ca")
    if any(a == b for a, b in zip(order, order[1:])):
        return "alternation: consecutive q pulses start with the same group"
    return None
