import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import quad_oracle, schedules, square_wave
from optpwm import (
    DisplacementFactors,
    RlBranch,
    SinglePhaseConfig,
    SwitchingSchedule,
    build_schedule,
    current_thd,
    l2_error,
    percent_improvement,
    reference_current,
    steady_state_current,
)
from optpwm.circuit import ReferenceSinusoid, current_samples
from optpwm.metrics import (
    UndefinedThdError,
    fourier_coefficients,
    harmonic,
    mean_square,
    mean_value,
)

T = 1.0 / 60.0


def _breaks(current):
    half = current.starts.tolist()
    return half + [t + current.span for t in half] if current.antiperiodic else half


def test_l2_zero_current_closed_form(branch):
    s = SwitchingSchedule(T, 300.0, (0.001, 0.001))
    i = steady_state_current(s, branch)
    ref = ReferenceSinusoid(10.0, 0.3, 60.0)
    assert l2_error(i, ref) == pytest.approx(100.0 * T / 4, rel=1e-13)


def test_l2_vanishes_as_current_becomes_sinusoidal():
    # many narrow pulses into a large inductance: the current tends to its
    # reference, so the error shrinks far below the reference energy
    cfg = SinglePhaseConfig(300.0, 60.0, 0.9, 601)
    b = RlBranch(1.0, 20e-3)
    i = steady_state_current(build_schedule(cfg, DisplacementFactors.conventional(601)), b)
    ref = reference_current(cfg, b)
    energy = ref.amplitude**2 * T / 4
    assert l2_error(i, ref) < 1e-6 * energy


def test_l2_conventional_matches_quadrature(cfg11, branch):
    i = steady_state_current(build_schedule(cfg11, DisplacementFactors.conventional(11)), branch)
    ref = reference_current(cfg11, branch)
    expected = quad_oracle(
        lambda t: (float(current_samples(i, t)) - float(ref(t))) ** 2, 0.0, T / 2, _breaks(i)
    )
    assert l2_error(i, ref) == pytest.approx(expected, rel=1e-9)


def test_square_wave_thd_through_resistor():
    # L -> 0 leaves the square wave itself
    i = steady_state_current(square_wave(), RlBranch(1.0, 1e-12))
    rep = current_thd(i)
    assert rep.thd_rms == pytest.approx(math.sqrt(math.pi**2 / 8 - 1), rel=1e-6)
    truncated = math.sqrt(sum(1.0 / h**2 for h in range(3, 201, 2)))
    assert rep.thd == pytest.approx(truncated, rel=1e-6)
    assert rep.fundamental_amplitude == pytest.approx(4 * 300.0 / math.pi, rel=1e-6)


def test_sinusoid_like_current_has_small_thd():
    cfg = SinglePhaseConfig(300.0, 60.0, 0.9, 301)
    s = build_schedule(cfg, DisplacementFactors.conventional(301))
    rep = current_thd(steady_state_current(s, RlBranch(1.0, 10e-3)))
    assert rep.thd < 1e-3


def test_undefined_thd(branch):
    i = steady_state_current(SwitchingSchedule(T, 300.0, (0.001, 0.001)), branch)
    with pytest.raises(UndefinedThdError):
        current_thd(i)
    with pytest.raises(ValueError):
        current_thd(steady_state_current(square_wave(), branch), H_max=1)


@given(schedules(), st.integers(1, 30))
def test_even_current_harmonics_vanish(s, k):
    i = steady_state_current(s, RlBranch(1.0, 100e-6))
    i1 = harmonic(i, 1)[0]
    assert harmonic(i, 2 * k)[0] <= 1e-9 * max(i1, 1e-300) or i1 < 1e-9


@given(schedules())
def test_parseval_bound(s):
    i = steady_state_current(s, RlBranch(1.0, 100e-6))
    amps = np.abs(fourier_coefficients(i, np.arange(1, 201)))
    # truncated sum of squares never exceeds twice the mean square
    assert 0.5 * float(np.sum(amps**2)) <= mean_square(i) * (1 + 1e-9) + 1e-18
    assert mean_value(i) == 0.0


def test_full_period_form_agrees(cfg11, branch):
    s = build_schedule(cfg11, DisplacementFactors.conventional(11))
    a = steady_state_current(s, branch)
    b = steady_state_current(s, branch, antiperiodic=False)
    orders = [1, 2, 3, 5, 7, 21]
    assert np.allclose(fourier_coefficients(a, orders), fourier_coefficients(b, orders), atol=1e-9)
    assert mean_square(a) == pytest.approx(mean_square(b), rel=1e-9)
    assert abs(mean_value(b)) < 1e-9


def test_percent_improvement_examples():
    assert percent_improvement(36.15, 30.49) == pytest.approx(15.66, abs=0.005)
    assert percent_improvement(35.96, 29.16) == pytest.approx(18.91, abs=0.005)
    assert percent_improvement(40.0, 40.0) == 0.0
    with pytest.raises(ZeroDivisionError):
        percent_improvement(0.0, 0.0)


def test_report_json(cfg11, branch):
    i = steady_state_current(build_schedule(cfg11, DisplacementFactors.conventional(11)), branch)
    rep = current_thd(i, reference=reference_current(cfg11, branch))
    d = json.loads(rep.to_json())
    assert set(d) == {"fundamental_amplitude", "harmonic_amplitudes", "thd", "thd_rms", "rms", "l2_error"}
    assert len(d["harmonic_amplitudes"]) == 200
    assert rep.amplitude(1) == rep.fundamental_amplitude
    assert rep.thd <= rep.thd_rms + 1e-12
