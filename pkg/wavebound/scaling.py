"""wavebound — Nondimensional scaling.

Lengths are scaled by λ = (ω/m)^(1/2) and the stream function by 1/m, so the
scaled problem has unit vorticity, unit flux and gravity ε = g/(m^(1/2)ω^(3/2)).
In these variables the laminar family is explicit:

    d̃(s̃) = s̃ − √(s̃² − 2),   s̃(d̃) = d̃/2 + 1/d̃,   Q̃(d̃) = d̃²/8 + 1/(2d̃²) − 1/2 + εd̃.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from wavebound.config import RADICAND_CLAMP
from wavebound.errors import BelowCriticalError, DomainError
from wavebound.models import FluidParams, NondimParams
from wavebound.rootfind import safe_newton
from wavebound.wave_solver import HeightField, WaveField

SQRT2 = math.sqrt(2.0)
_ENDPOINT_SLACK = 1e-15


def nondimensionalize(params: FluidParams, Q: float | None = None) -> NondimParams:
    epsilon = params.g / (math.sqrt(params.m) * params.omega ** 1.5)
    lam = math.sqrt(params.omega / params.m)
    Q_tilde = None if Q is None else Q / (params.m * params.omega)
    return NondimParams(epsilon=epsilon, lambda_=lam, Q_tilde=Q_tilde)


def nondim_params(epsilon: float) -> FluidParams:
    """The unit-flux, unit-vorticity problem with gravity ε."""
    return FluidParams(g=epsilon, omega=1.0, m=1.0)


# ── Closed-form maps ─────────────────────────────────────────────────────────

def d_tilde_of_s(s_tilde: float) -> float:
    r = s_tilde * s_tilde - 2.0
    if abs(r) <= RADICAND_CLAMP * s_tilde * s_tilde:
        r = 0.0
    elif r < 0.0:
        raise BelowCriticalError(f"s̃ = {s_tilde!r} is below √2")
    return 2.0 / (s_tilde + math.sqrt(r))


def _check_depth(d_tilde: float) -> None:
    if not (0.0 < d_tilde <= SQRT2 * (1.0 + _ENDPOINT_SLACK)):
        raise DomainError(f"d̃ = {d_tilde!r} is outside (0, √2]")


def s_of_d_tilde(d_tilde: float) -> float:
    _check_depth(d_tilde)
    return 0.5 * d_tilde + 1.0 / d_tilde


def Q_tilde_of_d(d_tilde: float, epsilon: float) -> float:
    """Q̃(d̃) written as (d̃² − 2)²/(8d̃²) + εd̃, which is exact at d̃ = √2."""
    _check_depth(d_tilde)
    return (d_tilde * d_tilde - 2.0) ** 2 / (8.0 * d_tilde * d_tilde) + epsilon * d_tilde


def Q_tilde_slope(d_tilde: float, epsilon: float) -> float:
    return 0.25 * d_tilde - 1.0 / d_tilde ** 3 + epsilon


def critical_depth_tilde(epsilon: float) -> float:
    """d̃_c, the minimiser of Q̃ on (0, √2): root of d̃/4 − 1/d̃³ + ε."""
    if epsilon <= 0.0:
        raise DomainError(f"ε = {epsilon!r} must be positive")
    lo = SQRT2
    while Q_tilde_slope(lo, epsilon) >= 0.0:
        lo *= 0.5
    return safe_newton(
        lambda d: Q_tilde_slope(d, epsilon),
        lambda d: 0.25 + 3.0 / d ** 4,
        lo,
        SQRT2,
    )


# ── Wave rescaling ───────────────────────────────────────────────────────────

def _rescale(wave: WaveField, target: FluidParams, length: float, flux: float) -> WaveField:
    """Lengths × *length*, stream function × *flux*; grid nodes map one to one.

    Velocities scale by flux/length, so Q and the laminar parameter follow; the
    interior (vorticity) residual scales by flux/length².
    """
    speed = flux / length
    field = wave.field
    scaled = HeightField(
        h=field.h * length,
        p=field.p * flux,
        L=field.L * length,
        Q=field.Q * speed * speed,
        params=target,
        base_s=field.base_s * speed,
    )
    residuals = dict(wave.residuals)
    if "interior" in residuals:
        residuals["interior"] *= flux / (length * length)
    if "surface" in residuals:
        residuals["surface"] *= speed * speed
    return dataclasses.replace(
        wave,
        field=scaled,
        residuals=residuals,
        amplitude_target=wave.amplitude_target * length,
    )


def map_wave_to_nondim(wave: WaveField, params: FluidParams) -> WaveField:
    nd = nondimensionalize(params)
    return _rescale(wave, nondim_params(nd.epsilon), nd.lambda_, 1.0 / params.m)


def unscale_wave(wave: WaveField, params: FluidParams) -> WaveField:
    """Inverse of :func:`map_wave_to_nondim`."""
    nd = nondimensionalize(params)
    return _rescale(wave, params, 1.0 / nd.lambda_, params.m)


def scale_amplitude(amplitude: float | np.ndarray, params: FluidParams):
    return nondimensionalize(params).lambda_ * amplitude
