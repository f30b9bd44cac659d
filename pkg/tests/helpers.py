"""Shared strategies and oracles for the test-suite."""

import math

import numpy as np
from hypothesis import strategies as st

from optpwm import SwitchingSchedule

TABLE_I_SINGLE = (0.9567, 0.8621, 0.8347, 0.7837, 0.6410)
TABLE_I_THREE = (0.9776, 0.7652, 0.4322, 0.2231, 0.4457)
T60 = 1.0 / 60.0


def square_wave(T=T60, Vo=300.0):
    return SwitchingSchedule(T, Vo, (0.0, 0.5 * T))


@st.composite
def schedules(draw, max_pulses=8, period=T60):
    """Random valid half-period schedules (strictly increasing instants)."""
    n = draw(st.integers(1, max_pulses))
    raw = draw(
        st.lists(st.floats(0.01, 1.0, allow_nan=False), min_size=2 * n + 1, max_size=2 * n + 1)
    )
    cuts = np.cumsum(raw)
    ts = 0.5 * period * cuts[:-1] / cuts[-1]
    return SwitchingSchedule(period, 300.0, tuple(ts))


def free_vectors(n):
    return st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=n, max_size=n)


def quad_oracle(f, a, b, points=()):
    """Adaptive quadrature split at known discontinuities."""
    from scipy.integrate import quad

    edges = sorted({a, b, *[p for p in points if a < p < b]})
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        val, _ = quad(f, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
        total += val
    return total


def relative_rms(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return math.sqrt(float(np.mean((a - b) ** 2)) / float(np.mean(b**2)))
