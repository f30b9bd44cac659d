"""Time-stepping reference for the analytic steady-state currents.

Integrates ``L di/dt + R i = v(t)`` with classical RK4 over one period and
closes the loop on the periodic fixed point of the stepping scheme itself.
The step grid is uniform
with the switching instants inserted, so no step straddles a voltage jump.
Nothing here uses the closed-form solution.
"""

from __future__ import annotations

import math

import numpy as np

from optpwm.circuit import RlBranch
from optpwm.waveform import SwitchingSchedule, voltage_samples


class OracleDivergence(RuntimeError):
    pass


def suggested_steps(branch: RlBranch, period: float, per_tau: int = 25) -> int:
    """Steps per period keeping ``h <= tau / per_tau`` (at least 10**4)."""
    return max(10_000, int(math.ceil(per_tau * period / branch.tau)))


def _grid(breaks: np.ndarray, period: float, steps: int) -> np.ndarray:
    uniform = np.linspace(0.0, period, steps + 1)
    grid = np.unique(np.concatenate([uniform, np.mod(breaks, period), [period]]))
    # drop slivers left by near-coincident points
    keep = np.concatenate([[True], np.diff(grid) > 1e-13 * period])
    return grid[keep]


def _rk4_period(i0: float, h: list[float], v: list[float], R: float, L: float) -> np.ndarray:
    out = np.empty(len(h) + 1)
    out[0] = x = i0
    a = R / L
    for k, (dt, vk) in enumerate(zip(h, v)):
        u = vk / L
        k1 = u - a * x
        k2 = u - a * (x + 0.5 * dt * k1)
        k3 = u - a * (x + 0.5 * dt * k2)
        k4 = u - a * (x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = x
    return out


def integrate_periodic(
    voltage,
    breaks: np.ndarray,
    period: float,
    branch: RlBranch,
    steps_per_period: int = 10_000,
    tol: float = 1e-10,
) -> tuple[np.ndarray, np.ndarray]:
    """Steady-state samples ``(t, i)`` over one period for forcing ``voltage(t)``.

    RK4 on a linear equation maps the initial value affinely onto the value
    one period later, ``i(T) = g i(0) + c``.  One sweep from rest gives
    ``c``, the product of the per-step amplification factors gives ``g``,
    and the fixed point is then integrated once more and checked.
    """
    if steps_per_period < 10_000:
        raise ValueError("steps_per_period must be >= 10**4")
    grid = _grid(np.asarray(breaks, dtype=float), period, steps_per_period)
    h = np.diff(grid).tolist()
    levels = voltage(0.5 * (grid[:-1] + grid[1:])).tolist()
    z = branch.R / branch.L * np.diff(grid)
    g = float(np.prod(1.0 - z + z**2 / 2.0 - z**3 / 6.0 + z**4 / 24.0))
    if not abs(g) < 1.0:
        raise OracleDivergence("RK4 step too large for the branch time constant")
    c = float(_rk4_period(0.0, h, levels, branch.R, branch.L)[-1])
    i0 = c / (1.0 - g)
    samples = _rk4_period(i0, h, levels, branch.R, branch.L)
    scale = math.sqrt(float(np.mean(samples**2))) or 1.0
    if abs(samples[-1] - samples[0]) > tol * scale:
        raise OracleDivergence("periodic fixed point not reproduced")
    return grid, samples


def ode_oracle(
    schedule: SwitchingSchedule, branch: RlBranch, steps_per_period: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Branch current driven directly by ``schedule``."""
    if steps_per_period is None:
        steps_per_period = suggested_steps(branch, schedule.period)
    breaks = np.array([b for b, _ in schedule.breakpoints()])
    return integrate_periodic(
        lambda t: voltage_samples(schedule, t), breaks, schedule.period, branch, steps_per_period
    )


def ode_oracle_three_phase(
    vab: SwitchingSchedule,
    vbc: SwitchingSchedule,
    vca: SwitchingSchedule,
    branch: RlBranch,
    steps_per_period: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Phase currents ``(t, i_a, i_b)`` of a balanced star R-L load.

    The star point is floating, so the phase voltages follow from the line
    voltages alone: ``v_an = (v_ab - v_ca) / 3`` and ``v_bn = (v_bc - v_ab) / 3``.
    """
    T = vab.period
    if steps_per_period is None:
        steps_per_period = suggested_steps(branch, T)
    breaks = np.array([b for s in (vab, vbc, vca) for b, _ in s.breakpoints()])

    def van(t):
        return (voltage_samples(vab, t) - voltage_samples(vca, t)) / 3.0

    def vbn(t):
        return (voltage_samples(vbc, t) - voltage_samples(vab, t)) / 3.0

    t, ia = integrate_periodic(van, breaks, T, branch, steps_per_period)
    _, ib = integrate_periodic(vbn, breaks, T, branch, steps_per_period)
    return t, ia, ib


def relative_rms(reference: np.ndarray, other: np.ndarray) -> float:
    num = math.sqrt(float(np.mean((reference - other) ** 2)))
    den = math.sqrt(float(np.mean(reference**2)))
    return num / den if den else num
