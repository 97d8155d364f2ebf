import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wavebound.errors import BelowCriticalError, DomainError
from wavebound.models import FluidParams
from wavebound.scaling import (
    SQRT2,
    Q_tilde_of_d,
    critical_depth_tilde,
    d_tilde_of_s,
    map_wave_to_nondim,
    nondim_params,
    nondimensionalize,
    s_of_d_tilde,
    scale_amplitude,
    unscale_wave,
)
from wavebound.stream_flows import bernoulli_of_s, critical_speed, depth_of_s, stream_window
from wavebound.wave_solver import height_residual, stream_wave

PARAMS = FluidParams(g=2.0, omega=3.0, m=0.5)


def test_unit_params_are_fixed_points(unit_params):
    nd = nondimensionalize(unit_params, Q=1.25)
    assert nd.epsilon == 1.0
    assert nd.lambda_ == 1.0
    assert nd.Q_tilde == 1.25


def test_epsilon_and_lambda():
    nd = nondimensionalize(PARAMS, Q=4.0)
    assert nd.epsilon == pytest.approx(2.0 / (math.sqrt(0.5) * 3.0 ** 1.5), rel=1e-15)
    assert nd.lambda_ == pytest.approx(math.sqrt(6.0), rel=1e-15)
    assert nd.Q_tilde == pytest.approx(4.0 / 1.5, rel=1e-15)


@given(st.floats(min_value=0.05, max_value=1.41))
def test_depth_and_speed_are_inverse(d):
    assert d_tilde_of_s(s_of_d_tilde(d)) == pytest.approx(d, rel=1e-12)


@given(d=st.floats(min_value=0.05, max_value=1.41), epsilon=st.floats(min_value=0.01, max_value=20.0))
def test_scaled_bernoulli_matches_laminar_family(d, epsilon):
    Q_family = bernoulli_of_s(s_of_d_tilde(d), nondim_params(epsilon))
    assert Q_tilde_of_d(d, epsilon) == pytest.approx(Q_family, rel=1e-11)


def test_physical_and_scaled_families_agree():
    nd = nondimensionalize(PARAMS)
    speed = 1.0 / (PARAMS.m * nd.lambda_)
    assert critical_speed(PARAMS) * speed == pytest.approx(SQRT2, rel=1e-15)
    for s in np.linspace(1.01, 3.0, 7) * critical_speed(PARAMS):
        d = depth_of_s(s, PARAMS)
        assert d_tilde_of_s(s * speed) == pytest.approx(nd.lambda_ * d, rel=1e-13)
        Q_tilde = bernoulli_of_s(s, PARAMS) / (PARAMS.m * PARAMS.omega)
        assert Q_tilde_of_d(nd.lambda_ * d, nd.epsilon) == pytest.approx(Q_tilde, rel=1e-12)


def test_top_of_window_is_exact():
    assert Q_tilde_of_d(SQRT2, 0.3) == pytest.approx(0.3 * SQRT2, rel=1e-15)


def test_critical_depth_matches_window():
    for epsilon in (0.05, 0.5, 1.0, 5.0):
        window = stream_window(nondim_params(epsilon))
        assert critical_depth_tilde(epsilon) == pytest.approx(d_tilde_of_s(window.sc), rel=1e-9)


def test_out_of_range():
    with pytest.raises(BelowCriticalError):
        d_tilde_of_s(1.3)
    with pytest.raises(DomainError):
        s_of_d_tilde(1.5)
    with pytest.raises(DomainError):
        Q_tilde_of_d(0.0, 1.0)
    with pytest.raises(DomainError):
        critical_depth_tilde(-1.0)


def test_wave_rescaling_round_trip():
    window = stream_window(PARAMS)
    wave = stream_wave(PARAMS, window.s0 + 0.5 * (window.sc - window.s0), 7.0)
    nd = nondimensionalize(PARAMS, wave.Q)

    scaled = map_wave_to_nondim(wave, PARAMS)
    assert scaled.params == nondim_params(nd.epsilon)
    assert scaled.L == pytest.approx(7.0 * nd.lambda_, rel=1e-15)
    assert scaled.Q == pytest.approx(nd.Q_tilde, rel=1e-14)
    assert np.allclose(scaled.eta, nd.lambda_ * wave.eta, rtol=1e-14, atol=0.0)
    assert height_residual(scaled.field).interior_norm < 1e-10

    back = unscale_wave(scaled, PARAMS)
    assert back.params == PARAMS
    assert np.allclose(back.field.h, wave.field.h, rtol=1e-13, atol=1e-15)
    assert back.Q == pytest.approx(wave.Q, rel=1e-13)


def test_scale_amplitude():
    assert scale_amplitude(0.25, PARAMS) == pytest.approx(0.25 * math.sqrt(6.0), rel=1e-15)


@given(st.floats(min_value=1.5, max_value=50.0))
def test_speed_and_depth_are_inverse(s):
    assert s_of_d_tilde(d_tilde_of_s(s)) == pytest.approx(s, rel=1e-12)
