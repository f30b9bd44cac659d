import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import TABLE_I_THREE, schedules, square_wave
from optpwm import (
    DisplacementFactors,
    RlBranch,
    SinglePhaseConfig,
    SwitchingSchedule,
    ThreePhaseConfig,
    build_schedule,
    current_at,
    expand_alphas_3p,
    line_schedules,
    phase_current_a,
    reference_current,
    resistance_from_amplitude,
    steady_state_current,
)
from optpwm.circuit import current_samples, textbook_coefficients
from optpwm.metrics import harmonic
from optpwm.ode import integrate_periodic, ode_oracle, ode_oracle_three_phase, relative_rms
from optpwm.three_phase import build_vab

T = 1.0 / 60.0


def test_zero_width_schedule_gives_zero_current(branch):
    s = SwitchingSchedule(T, 300.0, (0.001, 0.001, 0.004, 0.004))
    i = steady_state_current(s, branch)
    t = np.linspace(0.0, T, 101)
    assert np.all(current_samples(i, t) == 0.0)


@pytest.mark.parametrize("R,L", [(1.0, 100e-6), (5.0, 1e-3), (0.2, 50e-3)])
def test_square_wave_closed_form(R, L):
    b = RlBranch(R, L)
    i = steady_state_current(square_wave(), b)
    x = R * T / L
    expected = 300.0 / R * (1 - 2 * math.exp(-x / 4) / (1 + math.exp(-x / 2)))
    assert current_at(i, T / 4) == pytest.approx(expected, rel=1e-12)


@given(schedules(), st.floats(0.0, 1.0))
def test_symmetries(s, u):
    i = steady_state_current(s, RlBranch(1.0, 100e-6))
    t = u * T
    # (t + T) mod T rounds by ~1e-18 s while di/dt reaches Vo/L
    tol = 1e-12 * i.scale
    assert current_at(i, t + T / 2) == pytest.approx(-current_at(i, t), abs=tol)
    assert current_at(i, t + T) == pytest.approx(current_at(i, t), abs=tol)


@given(schedules(), st.floats(0.05, 20.0), st.floats(1e-5, 1e-2))
def test_continuity(s, R, L):
    i = steady_state_current(s, RlBranch(R, L))
    assert i.continuity_error() <= 1e-12 * i.scale


@given(schedules())
def test_full_period_solve_is_antiperiodic(s):
    b = RlBranch(2.0, 1e-3)
    half = steady_state_current(s, b)
    full = steady_state_current(s, b, antiperiodic=False)
    t = np.linspace(0.0, T, 301, endpoint=False)
    assert np.allclose(current_samples(full, t), current_samples(half, t), rtol=0, atol=1e-11 * half.scale)


def test_textbook_coefficients_agree(cfg11, branch):
    s = build_schedule(cfg11, DisplacementFactors.conventional(11))
    i = steady_state_current(s, branch)
    A = textbook_coefficients(s, branch)
    # stable form A'_j exp(-(t - s_j)/tau) equals A_j exp(-t/tau)
    stable = i.coeffs * np.exp(i.starts / branch.tau)
    assert np.allclose(stable, A, rtol=1e-9)


def test_conventional_matches_ode(cfg11, branch):
    s = build_schedule(cfg11, DisplacementFactors.conventional(11))
    t, i_ode = ode_oracle(s, branch)
    i = current_samples(steady_state_current(s, branch), t)
    assert relative_rms(i_ode, i) <= 1e-6


def test_ode_integrates_sinusoid():
    b = RlBranch(2.0, 5e-3)
    w = 2 * math.pi * 60.0
    Vm = 100.0
    t, i = integrate_periodic(lambda t: Vm * np.sin(w * t), np.array([0.0]), T, b, 10000)
    z = b.impedance(w)
    expected = Vm / z * np.sin(w * t - math.atan2(w * b.L, b.R))
    # forcing is held at step midpoints, so smooth inputs see O((w h)^2)
    assert relative_rms(i, expected) < 1e-7


def test_ode_square_wave():
    b = RlBranch(3.0, 2e-3)
    t, i = ode_oracle(square_wave(), b)
    exact = current_samples(steady_state_current(square_wave(), b), t)
    assert relative_rms(i, exact) < 1e-8


def test_ode_rejects_coarse_grid(branch):
    with pytest.raises(ValueError):
        ode_oracle(square_wave(), branch, 100)


def test_three_phase_current_matches_ode(branch):
    cfg = ThreePhaseConfig(300.0, 60.0, 0.9, 11)
    vab = build_vab(cfg, DisplacementFactors.conventional(11))
    t, ia, ib = ode_oracle_three_phase(*line_schedules(vab), branch)
    i = current_samples(phase_current_a(vab, branch), t)
    assert relative_rms(ia, i) <= 1e-6
    # balanced set: i_b lags i_a by T/3
    assert relative_rms(ib, current_samples(phase_current_a(vab, branch), t - T / 3)) <= 1e-6


def test_phase_current_triplen_and_symmetry(branch):
    cfg = ThreePhaseConfig(300.0, 60.0, 0.9, 11)
    ia = phase_current_a(build_vab(cfg, expand_alphas_3p(TABLE_I_THREE)), branch)
    i1, _ = harmonic(ia, 1)
    for h in (3, 9, 21):
        assert harmonic(ia, h)[0] <= 1e-9 * i1
    for t in np.linspace(0.0, T, 37):
        assert current_at(ia, t + T / 2) == pytest.approx(-current_at(ia, t), abs=1e-12 * ia.scale)


def test_reference_phase_limits():
    cfg = SinglePhaseConfig(300.0, 60.0, 0.9, 11)
    w = 2 * math.pi * 60.0
    assert reference_current(cfg, RlBranch(1e9, 1e-3)).phase == pytest.approx(0.0, abs=1e-9)
    L = 1e-3
    assert reference_current(cfg, RlBranch(w * L, L)).phase == pytest.approx(math.pi / 4, rel=1e-14)


def test_reference_three_phase_scaling(branch):
    single = reference_current(SinglePhaseConfig(300.0, 60.0, 0.9, 11), branch)
    three = reference_current(ThreePhaseConfig(300.0, 60.0, 0.9, 11), branch)
    assert three.amplitude == pytest.approx(single.amplitude / math.sqrt(3), rel=1e-15)
    assert three.phase == pytest.approx(single.phase + math.pi / 6, rel=1e-15)


def test_reference_matches_fundamental(branch):
    # the ideal sinusoid is the fundamental response to the sampled voltage
    for cfg, current in (
        (cfg := SinglePhaseConfig(300.0, 60.0, 0.9, 101),
         steady_state_current(build_schedule(cfg, DisplacementFactors.conventional(101)), branch)),
        (cfg3 := ThreePhaseConfig(300.0, 60.0, 0.9, 33),
         phase_current_a(build_vab(cfg3, DisplacementFactors.conventional(33)), branch)),
    ):
        ref = reference_current(cfg, branch)
        amp, phase = harmonic(current, 1)
        assert amp == pytest.approx(ref.amplitude, rel=2e-3)
        assert phase == pytest.approx(-ref.phase, abs=1e-9)


def test_resistance_from_amplitude():
    w = 2 * math.pi * 60.0
    R = resistance_from_amplitude(270.0, 60.0, 100e-6, 10.0)
    assert math.hypot(R, w * 100e-6) == pytest.approx(27.0, rel=1e-14)
    R3 = resistance_from_amplitude(270.0, 60.0, 100e-6, 10.0, three_phase=True)
    assert math.hypot(R3, w * 100e-6) == pytest.approx(27.0 / math.sqrt(3), rel=1e-14)
    with pytest.raises(ValueError):
        resistance_from_amplitude(1.0, 60.0, 1.0, 10.0)


def test_branch_rejects_nonpositive():
    with pytest.raises(ValueError):
        RlBranch(0.0, 1e-3)
    with pytest.raises(ValueError):
        RlBranch(1.0, -1e-3)
