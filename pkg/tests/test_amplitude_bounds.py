import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wavebound.amplitude_bounds import (
    SMALL_EPSILON_LIMIT,
    bernoulli_gap,
    d_tilde_1,
    delta_root,
    gap_expansion,
    proof_inequality_check,
    refined_bound,
    theorem_bound,
    theorem_bound_tilde,
)
from wavebound.errors import BranchCaseError, DomainError
from wavebound.models import FluidParams
from wavebound.scaling import SQRT2, Q_tilde_of_d, critical_depth_tilde, nondim_params
from wavebound.stream_flows import depth_pair, stream_window

positive = st.floats(min_value=0.2, max_value=5.0)


def test_theorem_bound(unit_params):
    assert theorem_bound(unit_params) == 2.0
    assert theorem_bound(FluidParams(g=9.81, omega=2.0, m=1.0)) == pytest.approx(9.81 / 2.0, rel=1e-15)
    assert theorem_bound_tilde(0.25) == 0.5


def test_delta_root_small_epsilon():
    delta = delta_root(0.1)
    assert delta == pytest.approx(0.1747, abs=1e-3)
    assert float(bernoulli_gap(delta, 0.1)) == pytest.approx(0.0, abs=1e-12)
    assert 0.0 < delta < 0.2


@given(st.floats(min_value=1e-3, max_value=0.7))
def test_delta_root_is_below_two_epsilon(epsilon):
    delta = delta_root(epsilon)
    assert 0.0 < delta < 2.0 * epsilon
    assert abs(float(bernoulli_gap(delta, epsilon))) < 1e-10


def test_delta_root_rejects_large_epsilon():
    with pytest.raises(BranchCaseError):
        delta_root(0.8)
    with pytest.raises(DomainError):
        delta_root(0.0)


def test_d_tilde_1_at_unit_epsilon():
    d1 = d_tilde_1(1.0)
    assert d1 == pytest.approx(0.6391, abs=1e-3)
    assert Q_tilde_of_d(d1, 1.0) == pytest.approx(SQRT2, rel=1e-12)
    assert d1 < critical_depth_tilde(1.0)


def test_d_tilde_1_is_the_lower_conjugate_depth():
    for epsilon in (0.1, 1.0, 3.0):
        window = stream_window(nondim_params(epsilon))
        pair = depth_pair(window.Q0 * (1.0 - 1e-15), nondim_params(epsilon), window)
        assert d_tilde_1(epsilon) == pytest.approx(pair.d_minus, abs=1e-10)


def test_branches_meet_at_the_switch():
    below = d_tilde_1(SMALL_EPSILON_LIMIT * (1.0 - 1e-9))
    above = d_tilde_1(SMALL_EPSILON_LIMIT)
    assert below == pytest.approx(above, abs=1e-6)


def test_refined_bound_branches(unit_params):
    bound = refined_bound(unit_params)
    assert bound.branch == "large_epsilon"
    assert bound.epsilon == 1.0
    assert bound.refined_bound == pytest.approx(SQRT2 - bound.d_tilde_1, rel=1e-15)

    small = refined_bound(FluidParams(g=0.1, omega=1.0, m=1.0))
    assert small.branch == "small_epsilon"
    assert small.refined_bound == pytest.approx(delta_root(0.1), rel=1e-15)


@given(g=positive, omega=positive, m=positive)
def test_refined_bound_is_sharper(g, omega, m):
    bound = refined_bound(FluidParams(g=g, omega=omega, m=m))
    assert 0.0 < bound.refined_bound < bound.theorem_bound


def test_bound_decays_like_inverse_square_vorticity():
    bounds = [theorem_bound(FluidParams(g=1.0, omega=w, m=1.0)) for w in (0.5, 1.0, 2.0, 4.0, 8.0)]
    assert bounds[1] / bounds[2] == pytest.approx(4.0, rel=1e-15)
    slope = np.polyfit(np.log([0.5, 1.0, 2.0, 4.0, 8.0]), np.log(bounds), 1)[0]
    assert slope == pytest.approx(-2.0, abs=1e-12)


def test_gap_expansion_sums_to_gap():
    delta = np.linspace(0.01, 1.4, 50)
    leading, remainder = gap_expansion(delta, 0.3)
    assert np.allclose(leading + remainder, bernoulli_gap(delta, 0.3), rtol=1e-12, atol=1e-15)
    assert np.all(remainder > 0.0)


@pytest.mark.parametrize("epsilon", [1e-3, 0.1, 0.5, 2.0])
def test_proof_inequality_check(epsilon):
    report = proof_inequality_check(epsilon, 1000, seed=7)
    assert report.n_samples == 1000
    assert report.max_identity_residual < 1e-12
    assert report.min_remainder > 0.0
    assert report.max_violation < 0.0


def test_proof_inequality_check_is_reproducible():
    a = proof_inequality_check(0.2, 500, seed=3)
    b = proof_inequality_check(0.2, 500, seed=3)
    assert a == b
    assert not math.isnan(a.max_violation)


def test_delta_root_increases_with_epsilon():
    deltas = [delta_root(eps) for eps in np.linspace(1e-4, 0.7, 200)]
    assert np.all(np.diff(deltas) > 0.0)


@pytest.mark.parametrize("epsilon", np.geomspace(1e-3, 0.7, 20).tolist())
def test_gap_is_the_fast_conjugate_depth(epsilon):
    params = nondim_params(epsilon)
    window = stream_window(params)
    pair = depth_pair(window.Q0 * (1.0 - 1e-15), params, window)
    assert SQRT2 - pair.d_minus == pytest.approx(delta_root(epsilon), rel=1e-8)


def test_scaled_refined_bound_stays_below_theorem_constant():
    omegas = np.geomspace(0.5, 100.0, 50)
    scaled = np.array([refined_bound(FluidParams(g=1.0, omega=w, m=1.0)).refined_bound for w in omegas])
    scaled *= omegas ** 2
    assert np.all(scaled > 0.0)
    assert np.all(scaled < 2.0)
    assert scaled[-1] == pytest.approx(2.0, rel=1e-2)
