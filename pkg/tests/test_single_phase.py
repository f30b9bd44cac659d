import math

import mpmath
import numpy as np
import pytest
from hypothesis import given

from helpers import TABLE_I_SINGLE, free_vectors
from optpwm import (
    DisplacementFactors,
    SinglePhaseConfig,
    build_schedule,
    expand_alphas,
    is_quarter_wave_symmetric,
    pulse_widths,
    subinterval_centers,
)

# (0.9 T / 22) sin(pi / 22) at f = 60 Hz, evaluated with mpmath at 40 digits
L1_PULSE_N11 = 9.70328442772398708783618224931e-05


def test_l1_pulse_oracle_value():
    mpmath.mp.dps = 40
    T = mpmath.mpf(1) / 60
    exact = mpmath.mpf("0.9") * T / 22 * mpmath.sin(mpmath.pi / 22)
    assert float(exact) == pytest.approx(L1_PULSE_N11, rel=1e-15)


def test_pulse_widths(cfg11):
    pulse, zero = pulse_widths(cfg11)
    T = cfg11.period
    assert pulse[5] == pytest.approx(0.9 * T / 22, rel=1e-14)
    assert pulse[0] == pytest.approx(L1_PULSE_N11, rel=1e-13)
    assert np.allclose(pulse, pulse[::-1], rtol=1e-13, atol=0)
    assert np.allclose(pulse + zero, T / 22, rtol=1e-14)


def test_centers():
    T = 1 / 60
    c11 = subinterval_centers(SinglePhaseConfig(300, 60, 0.9, 11))
    assert c11[5] == pytest.approx(T / 4, rel=1e-15)
    assert c11[0] == pytest.approx(T / 44, rel=1e-15)
    c3 = subinterval_centers(SinglePhaseConfig(300, 60, 0.9, 3))
    assert np.allclose(c3, [T / 12, T / 4, 5 * T / 12], rtol=1e-15)


@pytest.mark.parametrize(
    "kwargs", [dict(m=1.0), dict(m=0.0), dict(N=10), dict(N=1), dict(Vo=-1.0), dict(f=0.0)]
)
def test_config_rejects(kwargs):
    base = dict(Vo=300.0, f=60.0, m=0.9, N=11)
    base.update(kwargs)
    with pytest.raises(ValueError):
        SinglePhaseConfig(**base)


def test_expand_table_one():
    a = expand_alphas(TABLE_I_SINGLE)
    assert len(a) == 11
    assert a.alphas[5] == 0.5
    assert a.alphas[6] == pytest.approx(0.3590, abs=1e-12)
    assert a.alphas[10] == pytest.approx(0.0433, abs=1e-12)
    assert a.free == TABLE_I_SINGLE
    assert a.is_paired()


def test_expand_conventional_and_errors():
    assert expand_alphas([0.5] * 5).alphas == (0.5,) * 11
    with pytest.raises(ValueError):
        expand_alphas([0.5, 1.2, 0.5, 0.5, 0.5])
    with pytest.raises(ValueError):
        expand_alphas([0.5] * 4, N=11)
    with pytest.raises(ValueError):
        DisplacementFactors((0.3, -0.1))


def test_conventional_pulses_centred(cfg11):
    s = build_schedule(cfg11, DisplacementFactors.conventional(11))
    centers = subinterval_centers(cfg11)
    for (a, b), c in zip(s.pulses(), centers):
        assert a + b == pytest.approx(2 * c, rel=1e-13)


def test_alpha_zero_flush(cfg11):
    a = list(DisplacementFactors.conventional(11).alphas)
    a[2] = 0.0
    s = build_schedule(cfg11, DisplacementFactors(tuple(a)))
    assert s.instants[4] == pytest.approx(2 * cfg11.period / 22, rel=1e-14)


def test_table_one_quarter_wave(cfg11):
    s = build_schedule(cfg11, expand_alphas(TABLE_I_SINGLE))
    assert is_quarter_wave_symmetric(s, 1e-12 * cfg11.period)


@given(free_vectors(5))
def test_schedule_valid_for_any_box_point(free):
    cfg = SinglePhaseConfig(300.0, 60.0, 0.9, 11)
    s = build_schedule(cfg, expand_alphas(free))
    ts = np.asarray(s.instants)
    assert np.all(np.diff(ts) >= 0)
    # pulse widths do not depend on alpha
    pulse, _ = pulse_widths(cfg)
    assert np.allclose(ts[1::2] - ts[0::2], pulse, rtol=0, atol=1e-15)
    # each pulse stays inside its own subinterval
    slot = cfg.period / 22
    k = np.arange(11)
    assert np.all(ts[0::2] >= k * slot - 1e-18)
    assert np.all(ts[1::2] <= (k + 1) * slot + 1e-18)


def test_build_rejects_wrong_length(cfg11):
    with pytest.raises(ValueError):
        build_schedule(cfg11, DisplacementFactors.conventional(9))


def test_fundamental_tracks_modulation_index():
    # narrow subintervals: the fundamental approaches Vm
    from optpwm import voltage_harmonic

    cfg = SinglePhaseConfig(300.0, 60.0, 0.8, 101)
    s = build_schedule(cfg, DisplacementFactors.conventional(101))
    amp, phase = voltage_harmonic(s, 1)
    assert amp == pytest.approx(cfg.Vm, rel=1e-3)
    assert abs(phase) < 1e-9
    assert math.isfinite(amp)
