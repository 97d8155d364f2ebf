import math

import pytest

from wavebound.models import FluidParams, SolverSettings
from wavebound.stream_flows import stream_window
from wavebound.wave_solver import bifurcation_wavelength, continue_branch


@pytest.fixture(scope="session")
def unit_params() -> FluidParams:
    return FluidParams(g=1.0, omega=1.0, m=1.0)


@pytest.fixture(scope="session")
def small_settings() -> SolverSettings:
    return SolverSettings(n_x=64, n_p=40)


@pytest.fixture(scope="session")
def unit_wavelength(unit_params) -> float:
    window = stream_window(unit_params)
    return bifurcation_wavelength(unit_params, window.s0 + 0.75 * (window.sc - window.s0))


@pytest.fixture(scope="session")
def small_branch(unit_params, small_settings, unit_wavelength):
    """Branch of unit-parameter waves up to half crest-to-trough 5e-3·d0 on a 64 × 40 grid."""
    return continue_branch(unit_params, unit_wavelength, 5e-3 * math.sqrt(2.0), small_settings)


@pytest.fixture(scope="session")
def small_wave(small_branch):
    return small_branch[-1]
