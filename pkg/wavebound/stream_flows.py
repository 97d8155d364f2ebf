"""wavebound — Laminar stream solutions.

For constant vorticity ω and mass flux m the x-independent solutions are

    Ψ(y; s) = −ωy²/2 + s·y,     d(s) = ∫₀^m (s² − 2ωp)^(−1/2) dp,
    Q(s)    = s²/2 − ωm + g·d(s),

defined for s ≥ s0 = √(2mω). Q decreases on (s0, sc), increases on (sc, ∞),
and every q in (Qc, Q0) is attained twice; the two conjugate depths d_∓(q)
pinch the surface of any non-stream wave with Bernoulli constant q.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.integrate import quad

from wavebound.config import FOLD_TOLERANCE, MAX_BRACKET_DOUBLINGS, RADICAND_CLAMP, ROOT_RTOL
from wavebound.errors import BelowCriticalError, OutOfWindowError, RootFindingError
from wavebound.models import DepthPair, FluidParams, StreamWindow
from wavebound.rootfind import grow_upper, safe_newton

logger = logging.getLogger(__name__)


# ── Closed forms ─────────────────────────────────────────────────────────────

def psi_stream(y, s, omega):
    """Ψ(y; s) = −ωy²/2 + s·y (accepts scalars or arrays)."""
    return -0.5 * omega * y * y + s * y


def stream_velocity(y, s, omega):
    """Ψ_y(y; s) = s − ωy; positive on [0, d(s)] whenever s > s0."""
    return s - omega * y


def _radicand(s: float, params: FluidParams) -> float:
    r = s * s - 2.0 * params.omega * params.m
    if abs(r) <= RADICAND_CLAMP * s * s:
        return 0.0
    if r < 0.0:
        raise BelowCriticalError(
            f"s = {s!r} is below s0 = {math.sqrt(2.0 * params.omega * params.m)!r}"
        )
    return r


def critical_speed(params: FluidParams) -> float:
    """s0 = √(2mω), the parameter at which the surface velocity vanishes."""
    return math.sqrt(2.0 * params.m * params.omega)


def depth_of_s(s: float, params: FluidParams) -> float:
    """Depth of the stream with parameter *s*; ``s = s0`` gives d0 = √(2m/ω)."""
    if s <= 0.0:
        raise BelowCriticalError(f"s = {s!r} must be positive")
    r = _radicand(s, params)
    # (s − √r)/ω without the cancellation for large s.
    return 2.0 * params.m / (s + math.sqrt(r))


def depth_integral(s: float, params: FluidParams) -> float:
    """The depth integral evaluated by adaptive quadrature (oracle for the closed form)."""
    _radicand(s, params)
    value, _ = quad(
        lambda p: 1.0 / math.sqrt(s * s - 2.0 * params.omega * p),
        0.0,
        params.m,
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )
    return value


def bernoulli_of_s(s: float, params: FluidParams) -> float:
    return 0.5 * s * s - params.omega * params.m + params.g * depth_of_s(s, params)


def bernoulli_slope(s: float, params: FluidParams) -> float:
    """dQ/ds = s·(1 − g∫₀^m (s² − 2ωp)^(−3/2) dp) = s − g·d(s)/√(s² − 2ωm)."""
    r = _radicand(s, params)
    if r == 0.0:
        return -math.inf
    return s - params.g * depth_of_s(s, params) / math.sqrt(r)


# ── Surface-speed form ───────────────────────────────────────────────────────
#
# Near s0 the window (s0, sc) is only O(ε²)·s0 wide, below what s resolves in
# double precision for strong vorticity. The surface speed u = √(s² − 2ωm)
# spans (0, uc) with uc = O(ε), so roots are taken in u and s = √(u² + s0²).

def surface_speed(s: float, params: FluidParams) -> float:
    """u = Ψ_y(d(s); s) = √(s² − 2ωm), the speed of the stream at its surface."""
    return math.sqrt(_radicand(s, params))


def s_of_surface_speed(u: float, params: FluidParams) -> float:
    return math.hypot(u, critical_speed(params))


def depth_of_u(u: float, params: FluidParams) -> float:
    return 2.0 * params.m / (s_of_surface_speed(u, params) + u)


def bernoulli_of_u(u: float, params: FluidParams) -> float:
    """Q = u²/2 + g·d, free of the cancellation in s²/2 − ωm."""
    return 0.5 * u * u + params.g * depth_of_u(u, params)


def bernoulli_u_slope(u: float, params: FluidParams) -> float:
    """dQ/du = u − g·d/s."""
    s = s_of_surface_speed(u, params)
    return u - params.g * 2.0 * params.m / (s * (s + u))


# ── Critical constants ───────────────────────────────────────────────────────

def _criticality(u: float, params: FluidParams) -> float:
    """u·s − g·d, which has the sign of dQ/du; increasing in u, −g·d0 at u = 0."""
    s = s_of_surface_speed(u, params)
    return u * s - params.g * 2.0 * params.m / (s + u)


def _criticality_slope(u: float, params: FluidParams) -> float:
    s = s_of_surface_speed(u, params)
    d = 2.0 * params.m / (s + u)
    return s + (u * u + params.g * d) / s


def critical_surface_speed(params: FluidParams) -> float:
    """uc, the surface speed of the critical stream."""
    s0 = critical_speed(params)
    # u·s ≥ u·s0 = g·d0 > g·d at u = g·d0/s0, so the root lies below it.
    hi = params.g * math.sqrt(2.0 * params.m / params.omega) / s0
    return safe_newton(
        lambda u: _criticality(u, params),
        lambda u: _criticality_slope(u, params),
        0.0,
        hi,
        rtol=ROOT_RTOL,
    )


def critical_s(params: FluidParams) -> float:
    """The unique minimiser sc > s0 of Q(s)."""
    s0 = critical_speed(params)
    sc = s_of_surface_speed(critical_surface_speed(params), params)
    if not sc > s0:
        raise RootFindingError("sc is indistinguishable from s0 at double precision")
    logger.debug("critical parameter sc = %.17g (s0 = %.17g)", sc, s0)
    return sc


def stream_window(params: FluidParams) -> StreamWindow:
    s0 = critical_speed(params)
    d0 = math.sqrt(2.0 * params.m / params.omega)
    uc = critical_surface_speed(params)
    sc = s_of_surface_speed(uc, params)
    Q0 = params.g * d0
    Qc = bernoulli_of_u(uc, params)
    if not (sc > s0 and Qc < Q0):
        raise RootFindingError(
            f"stream window (s0, sc) = ({s0!r}, {sc!r}), (Qc, Q0) = ({Qc!r}, {Q0!r}) "
            "is not resolved at double precision"
        )
    return StreamWindow(s0=s0, sc=sc, uc=uc, Q0=Q0, Qc=Qc, d0=d0)


# ── Conjugate depths ─────────────────────────────────────────────────────────

def depth_pair(q: float, params: FluidParams, window: StreamWindow | None = None) -> DepthPair:
    """The two laminar flows sharing the Bernoulli value *q* ∈ (Qc, Q0).

    ``d_plus`` belongs to the slower flow ``s_minus`` and ``d_minus`` to the
    faster flow ``s_plus``.
    """
    window = window or stream_window(params)
    if not (window.Qc < q < window.Q0):
        raise OutOfWindowError(f"q = {q!r} is outside ({window.Qc!r}, {window.Q0!r})")

    if q - window.Qc < FOLD_TOLERANCE * window.Q0:
        d = depth_of_u(window.uc, params)
        return DepthPair(
            q=q,
            s_minus=window.sc,
            s_plus=window.sc,
            u_minus=window.uc,
            u_plus=window.uc,
            d_minus=d,
            d_plus=d,
            degenerate=True,
        )

    def excess(u: float) -> float:
        return bernoulli_of_u(u, params) - q

    def slope(u: float) -> float:
        return bernoulli_u_slope(u, params)

    # q within rounding of Q0 puts the slow flow at stagnation.
    u_minus = 0.0 if excess(0.0) <= 0.0 else safe_newton(excess, slope, 0.0, window.uc)

    try:
        upper = grow_upper(excess, 2.0 * window.uc, max_steps=MAX_BRACKET_DOUBLINGS)
    except RootFindingError as exc:
        raise RootFindingError(f"internal failure bracketing s_plus for q = {q!r}") from exc
    u_plus = safe_newton(excess, slope, window.uc, upper)

    return DepthPair(
        q=q,
        s_minus=s_of_surface_speed(u_minus, params),
        s_plus=s_of_surface_speed(u_plus, params),
        u_minus=u_minus,
        u_plus=u_plus,
        d_minus=depth_of_u(u_plus, params),
        d_plus=depth_of_u(u_minus, params),
    )


def stream_profile(p: np.ndarray, s: float, params: FluidParams) -> np.ndarray:
    """Height h(p) at which the stream Ψ(·; s) takes the value p ∈ [0, m]."""
    _radicand(s, params)
    r = np.maximum(s * s - 2.0 * params.omega * np.asarray(p, dtype=float), 0.0)
    return 2.0 * np.asarray(p, dtype=float) / (s + np.sqrt(r))
