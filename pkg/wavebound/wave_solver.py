"""wavebound — Periodic steady waves in height-function variables.

For a unidirectional flow (ψ_y > 0) the height h(x, p) at which ψ(x, ·) = p
maps the fluid onto the fixed strip [0, L) × [0, m]. Constant vorticity gives

    (1 + h_x²) h_pp − 2 h_p h_x h_xp + h_p² h_xx − ω h_p³ = 0     0 < p < m
    (1 + h_x²) / (2 h_p²) + g h = Q                               p = m
    h = 0                                                          p = 0

The interior equation is solved after division by h_p³, where it reads
−(Δψ + ω) = 0 and its residual carries units of vorticity.

The unknown is the deviation w = h − H from a reference laminar profile H(p; s)
whose derivatives are analytic, so laminar fields have zero discrete residual.
x-derivatives are fourth-order periodic differences. p-derivatives are
fourth-order differences, one-sided at the bottom and the surface, on the
levels of H at equally spaced heights.
Waves are computed on the symmetric subspace h(x) = h(L − x) (crest at x = 0),
with Q as an extra unknown closed by the amplitude constraint
(h(0, m) − h(L/2, m))/2 = a.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import sparse
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.signal import resample
from scipy.sparse.linalg import spsolve

from wavebound.config import default_settings
from wavebound.errors import (
    BelowCriticalError,
    BifurcationNotFoundError,
    BranchTerminatedError,
    ConvergenceError,
    DomainError,
    MonotonicityError,
)
from wavebound.models import FluidParams, RefinementReport, SolverSettings
from wavebound.rootfind import bracketed_root, first_sign_change
from wavebound.stream_flows import bernoulli_of_s, critical_speed, depth_of_s, stream_profile, stream_window

logger = logging.getLogger(__name__)


# ── Field types ──────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class HeightField:
    """h sampled on n_x × n_p nodes: x_i = iL/n_x and p_j from :func:`flux_grid` at ``base_s``."""

    h: np.ndarray
    p: np.ndarray
    L: float
    Q: float
    params: FluidParams
    base_s: float

    @property
    def n_x(self) -> int:
        return self.h.shape[0]

    @property
    def n_p(self) -> int:
        return self.h.shape[1]

    @property
    def x(self) -> np.ndarray:
        return self.L * np.arange(self.n_x) / self.n_x

    @property
    def eta(self) -> np.ndarray:
        return self.h[:, -1]


@dataclass(frozen=True, eq=False)
class WaveField:
    field: HeightField
    residuals: dict[str, float]
    converged: bool
    iterations: int = 0
    amplitude_target: float = 0.0

    @property
    def params(self) -> FluidParams:
        return self.field.params

    @property
    def eta(self) -> np.ndarray:
        return self.field.eta

    @property
    def x(self) -> np.ndarray:
        return self.field.x

    @property
    def Q(self) -> float:
        return self.field.Q

    @property
    def L(self) -> float:
        return self.field.L

    def stream_samples(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Physical positions (x, y) of the grid nodes and ψ there (ψ = p by construction)."""
        X = np.broadcast_to(self.x[:, None], self.field.h.shape)
        P = np.broadcast_to(self.field.p[None, :], self.field.h.shape)
        return X, self.field.h, P


@dataclass(frozen=True, eq=False)
class HeightResidual:
    interior: np.ndarray
    surface: np.ndarray
    bottom: np.ndarray
    interior_norm: float
    surface_norm: float
    min_hp: float
    max_hp: float


@dataclass(frozen=True, eq=False)
class VelocitySamples:
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray


# ── Discretisation ───────────────────────────────────────────────────────────

class _Operators(NamedTuple):
    Dx: sparse.csr_matrix
    Dxx: sparse.csr_matrix
    Dp: sparse.csr_matrix
    Dpp: sparse.csr_matrix
    Dxp: sparse.csr_matrix
    S: sparse.csr_matrix        # symmetric half grid -> full grid
    interior: np.ndarray
    surface: np.ndarray
    bottom: np.ndarray
    n_half: int                 # unknowns / equations on the half grid


def _circulant(stencil: dict[int, float], n: int) -> sparse.csr_matrix:
    i = np.arange(n)
    rows = np.concatenate([i for _ in stencil])
    cols = np.concatenate([(i + k) % n for k in stencil])
    vals = np.concatenate([np.full(n, c) for c in stencil.values()])
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


def _banded(n: int, interior: list[float], edge: list[list[float]], odd: bool) -> sparse.csr_matrix:
    """Centred stencil *interior* with one-sided closures *edge* on the first rows.

    The last rows mirror the first ones; *odd* flips their sign (first derivatives).
    """
    half = len(interior) // 2
    if n < len(edge[0]):
        raise DomainError(f"{n} levels are too few for the strip stencils")
    D = sparse.lil_matrix((n, n))
    for j in range(half, n - half):
        D[j, j - half:j + half + 1] = interior
    sign = -1.0 if odd else 1.0
    for j, row in enumerate(edge):
        D[j, :len(row)] = row
        D[n - 1 - j, n - len(row):] = [sign * c for c in reversed(row)]
    return D.tocsr()


def _uniform_first(n: int, dxi: float) -> sparse.csr_matrix:
    edge = [[-25.0, 48.0, -36.0, 16.0, -3.0], [-3.0, -10.0, 18.0, -6.0, 1.0]]
    return _banded(n, [1.0, -8.0, 0.0, 8.0, -1.0], edge, odd=True) / (12.0 * dxi)


def _uniform_second(n: int, dxi: float) -> sparse.csr_matrix:
    edge = [[45.0, -154.0, 214.0, -156.0, 61.0, -10.0], [10.0, -15.0, -4.0, 14.0, -6.0, 1.0]]
    return _banded(n, [-1.0, 16.0, -30.0, 16.0, -1.0], edge, odd=False) / (12.0 * dxi * dxi)


def flux_grid(params: FluidParams, n_p: int, s: float) -> np.ndarray:
    """Stream-function levels p_j = Ψ(y_j; s) of equally spaced heights y_j = j·d(s)/(n_p − 1).

    Nodes crowd towards p = m where the reference flow is slow, which keeps the
    near-surface layer resolved when s is close to s0.
    """
    d = depth_of_s(s, params)
    y = np.linspace(0.0, d, n_p)
    p = s * y - 0.5 * params.omega * y * y
    p[0], p[-1] = 0.0, params.m
    return p


def _strip_operators(n_p: int, s: float, params: FluidParams) -> tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """d/dp and d²/dp² on :func:`flux_grid` nodes via the chain rule from a uniform ξ ∈ [0, 1]."""
    d = depth_of_s(s, params)
    xi = np.linspace(0.0, 1.0, n_p)
    dxi = 1.0 / (n_p - 1)
    P1 = d * (s - params.omega * d * xi)       # dp/dξ
    P2 = -params.omega * d * d                 # d²p/dξ²
    D1 = _uniform_first(n_p, dxi)
    D2 = _uniform_second(n_p, dxi)
    Dp = sparse.diags(1.0 / P1) @ D1
    Dpp = sparse.diags(1.0 / P1 ** 2) @ (D2 - sparse.diags(P2 / P1) @ D1)
    return Dp.tocsr(), Dpp.tocsr()


@functools.lru_cache(maxsize=16)
def _operators(n_x: int, n_p: int, L: float, s: float, params: FluidParams) -> _Operators:
    if n_x % 2 or n_x < 8 or n_p < 6:
        raise DomainError(f"unsupported grid {n_x} × {n_p}")
    dx = L / n_x
    Dx1 = _circulant({-2: 1 / 12, -1: -2 / 3, 1: 2 / 3, 2: -1 / 12}, n_x) / dx
    Dxx1 = _circulant({-2: -1 / 12, -1: 4 / 3, 0: -5 / 2, 1: 4 / 3, 2: -1 / 12}, n_x) / (dx * dx)
    Dp1, Dpp1 = _strip_operators(n_p, s, params)
    Ix = sparse.identity(n_x, format="csr")
    Ip = sparse.identity(n_p, format="csr")

    Dx = sparse.kron(Dx1, Ip, format="csr")
    Dxx = sparse.kron(Dxx1, Ip, format="csr")
    Dp = sparse.kron(Ix, Dp1, format="csr")
    Dpp = sparse.kron(Ix, Dpp1, format="csr")
    Dxp = (Dx @ Dp).tocsr()

    half = n_x // 2 + 1
    i = np.repeat(np.arange(n_x), n_p)
    j = np.tile(np.arange(n_p), n_x)
    mirrored = np.minimum(i, n_x - i)
    S = sparse.csr_matrix(
        (np.ones(n_x * n_p), (np.arange(n_x * n_p), mirrored * n_p + j)),
        shape=(n_x * n_p, half * n_p),
    )
    return _Operators(
        Dx=Dx,
        Dxx=Dxx,
        Dp=Dp,
        Dpp=Dpp,
        Dxp=Dxp,
        S=S,
        interior=(j > 0) & (j < n_p - 1),
        surface=j == n_p - 1,
        bottom=j == 0,
        n_half=half * n_p,
    )


class _Base(NamedTuple):
    H: np.ndarray
    Hp: np.ndarray
    Hpp: np.ndarray


def _base_profile(p: np.ndarray, s: float, params: FluidParams, n_x: int) -> _Base:
    r = s * s - 2.0 * params.omega * p
    if np.any(r <= 0.0):
        raise BelowCriticalError(f"reference parameter s = {s!r} must exceed s0")
    root = np.sqrt(r)
    Hp = 1.0 / root
    return _Base(
        H=np.tile(stream_profile(p, s, params), n_x),
        Hp=np.tile(Hp, n_x),
        Hpp=np.tile(params.omega * Hp ** 3, n_x),
    )


class _Derivatives(NamedTuple):
    h: np.ndarray
    hx: np.ndarray
    hxx: np.ndarray
    hp: np.ndarray
    hpp: np.ndarray
    hxp: np.ndarray


def _derivatives(w: np.ndarray, ops: _Operators, base: _Base) -> _Derivatives:
    return _Derivatives(
        h=w + base.H,
        hx=ops.Dx @ w,
        hxx=ops.Dxx @ w,
        hp=ops.Dp @ w + base.Hp,
        hpp=ops.Dpp @ w + base.Hpp,
        hxp=ops.Dxp @ w,
    )


def _interior_equation(d: _Derivatives, omega: float) -> np.ndarray:
    """The height equation divided by h_p³, which equals −(Δψ + ω)."""
    return (
        (1.0 + d.hx ** 2) * d.hpp / d.hp ** 3
        - 2.0 * d.hx * d.hxp / d.hp ** 2
        + d.hxx / d.hp
        - omega
    )


def _surface_equation(d: _Derivatives, params: FluidParams, Q: float) -> np.ndarray:
    return (1.0 + d.hx ** 2) / (2.0 * d.hp ** 2) + params.g * d.h - Q


def _check_monotone(hp: np.ndarray) -> None:
    if not np.all(np.isfinite(hp)) or hp.min() <= 0.0:
        raise MonotonicityError(f"h_p = {hp.min():.3e} ≤ 0: flow is not unidirectional")


def _setup(field: HeightField) -> tuple[_Operators, _Base]:
    ops = _operators(field.n_x, field.n_p, float(field.L), float(field.base_s), field.params)
    base = _base_profile(field.p, field.base_s, field.params, field.n_x)
    return ops, base


# ── Residuals ────────────────────────────────────────────────────────────────

def height_residual(field: HeightField) -> HeightResidual:
    ops, base = _setup(field)
    w = field.h.ravel() - base.H
    d = _derivatives(w, ops, base)
    _check_monotone(d.hp)

    interior = np.where(ops.interior, _interior_equation(d, field.params.omega), 0.0)
    surface = _surface_equation(d, field.params, field.Q)[ops.surface]
    bottom = d.h[ops.bottom]
    return HeightResidual(
        interior=interior.reshape(field.h.shape),
        surface=surface,
        bottom=bottom,
        interior_norm=float(max(np.abs(interior).max(), np.abs(bottom).max())),
        surface_norm=float(np.abs(surface).max()),
        min_hp=float(d.hp.min()),
        max_hp=float(d.hp.max()),
    )


def vorticity_defect(wave: WaveField) -> np.ndarray:
    """Δψ + ω at the interior nodes (NaN on the bottom and surface rows)."""
    defect = -height_residual(wave.field).interior
    defect[:, 0] = np.nan
    defect[:, -1] = np.nan
    return defect


def velocity_from_stream(wave: WaveField, c: float = 0.0) -> VelocitySamples:
    """u = c − ψ_y, v = ψ_x at the grid nodes, using ψ_y = 1/h_p and ψ_x = −h_x/h_p."""
    field = wave.field
    ops, base = _setup(field)
    d = _derivatives(field.h.ravel() - base.H, ops, base)
    _check_monotone(d.hp)
    shape = field.h.shape
    X, Y, _ = wave.stream_samples()
    return VelocitySamples(
        x=np.array(X),
        y=np.array(Y),
        u=(c - 1.0 / d.hp).reshape(shape),
        v=(-d.hx / d.hp).reshape(shape),
    )


# ── Laminar fields ───────────────────────────────────────────────────────────

def _settings(settings: SolverSettings | None) -> SolverSettings:
    return settings if settings is not None else SolverSettings(**default_settings())


def stream_height(
    params: FluidParams,
    s: float,
    L: float | None = None,
    n_x: int | None = None,
    n_p: int | None = None,
) -> HeightField:
    """The x-independent field h(p) = (s − √(s² − 2ωp))/ω, with Q = Q(s)."""
    if not s > critical_speed(params):
        raise BelowCriticalError(f"s = {s!r} must exceed s0 for a unidirectional stream")
    defaults = default_settings()
    n_x = n_x or defaults["n_x"]
    n_p = n_p or defaults["n_p"]
    window_d0 = math.sqrt(2.0 * params.m / params.omega)
    p = flux_grid(params, n_p, s)
    base = _base_profile(p, s, params, 1)
    return HeightField(
        h=np.tile(base.H, (n_x, 1)),
        p=p,
        L=float(L if L is not None else 2.0 * math.pi * window_d0),
        Q=bernoulli_of_s(s, params),
        params=params,
        base_s=s,
    )


def stream_wave(params: FluidParams, s: float, L: float, settings: SolverSettings | None = None) -> WaveField:
    settings = _settings(settings)
    field = stream_height(params, s, L=L, n_x=settings.n_x, n_p=settings.n_p)
    res = height_residual(field)
    return WaveField(
        field=field,
        residuals={"interior": res.interior_norm, "surface": res.surface_norm},
        converged=True,
    )


# ── Linear dispersion ────────────────────────────────────────────────────────

def _shoot(s: float, k: float, params: FluidParams, dense: bool = False):
    """Integrate the linearised height equation for v(p)cos(kx) across the strip.

    With r = s² − 2ωp and the flux variable w = (r/s²)^(3/2) v', the system
    v' = w s³ / r^(3/2),  w' = k² √r v / s³ starts from v = 0, v' = 1.
    """
    omega = params.omega
    s3 = s ** 3

    def rhs(p, y):
        r = s * s - 2.0 * omega * p
        return [y[1] * s3 / r ** 1.5, k * k * math.sqrt(r) / s3 * y[0]]

    sol = solve_ivp(
        rhs,
        (0.0, params.m),
        [0.0, 1.0],
        method="DOP853",
        rtol=1e-11,
        atol=1e-14,
        dense_output=dense,
    )
    if not sol.success:
        raise BifurcationNotFoundError(f"shooting failed at s = {s!r}, k = {k!r}: {sol.message}")
    return sol


def dispersion_function(s: float, k: float, params: FluidParams) -> float:
    """g·v(m)/s³ − w(m); zero exactly when v(p)cos(kx) solves the linearised problem.

    At k = 0 it reduces to g∫₀^m (s² − 2ωp)^(−3/2) dp − 1, which vanishes at sc.
    """
    if not s > critical_speed(params):
        raise BelowCriticalError(f"s = {s!r} must exceed s0")
    sol = _shoot(s, k, params)
    v_m, w_m = sol.y[:, -1]
    return params.g * v_m / s ** 3 - w_m


def bifurcation_point(params: FluidParams, L: float) -> float:
    """Laminar parameter s* at which waves of wavelength *L* bifurcate."""
    if not L > 0.0:
        raise DomainError(f"L = {L!r} must be positive")
    k = 2.0 * math.pi / L
    window = stream_window(params)
    gap = window.sc - window.s0
    grid = np.concatenate([
        window.s0 + gap * np.geomspace(1e-4, 1.0, 48),
        np.linspace(window.sc, 4.0 * window.sc, 25)[1:],
    ])
    bracket = first_sign_change(lambda s: dispersion_function(s, k, params), grid)
    if bracket is None:
        raise BifurcationNotFoundError(f"no laminar parameter in (s0, 4sc) admits wavelength {L!r}")
    s_star = bracketed_root(lambda s: dispersion_function(s, k, params), *bracket)
    logger.info("bifurcation at s* = %.12g for L = %.6g (s0 = %.6g, sc = %.6g)", s_star, L, window.s0, window.sc)
    return s_star


def bifurcation_wavelength(params: FluidParams, s: float) -> float:
    """Wavelength whose bifurcation point is the laminar parameter *s* ∈ (s0, sc)."""
    window = stream_window(params)
    if not window.s0 < s < window.sc:
        raise BifurcationNotFoundError(f"s = {s!r} is outside (s0, sc); no periodic bifurcation")

    def D(k: float) -> float:
        return dispersion_function(s, k, params)

    k_prev = 0.0
    k = 0.25 / window.d0
    for _ in range(60):
        if D(k) < 0.0:
            k_star = bracketed_root(D, k_prev, k)
            return 2.0 * math.pi / k_star
        k_prev, k = k, 2.0 * k
    raise BifurcationNotFoundError(f"dispersion function keeps its sign for s = {s!r}")


def _kernel_mode(params: FluidParams, s: float, k: float, p: np.ndarray) -> np.ndarray:
    sol = _shoot(s, k, params, dense=True)
    v = sol.sol(p)[0]
    return v / v[-1]


# ── Newton solve ─────────────────────────────────────────────────────────────

def _jacobian(d: _Derivatives, ops: _Operators, params: FluidParams, n_p: int, n_x: int) -> sparse.csc_matrix:
    # dF for the unscaled equation F = h_p³·E, then dE = dF/h_p³ − (3E/h_p)·dh_p.
    omega = params.omega
    E = _interior_equation(d, omega)
    A = 1.0 + d.hx ** 2
    diag = sparse.diags
    dF = (
        diag(2.0 * d.hx * d.hpp - 2.0 * d.hp * d.hxp) @ ops.Dx
        + diag(A) @ ops.Dpp
        + diag(-2.0 * d.hx * d.hxp + 2.0 * d.hp * d.hxx - 3.0 * omega * d.hp ** 2) @ ops.Dp
        + diag(-2.0 * d.hp * d.hx) @ ops.Dxp
        + diag(d.hp ** 2) @ ops.Dxx
    )
    dE = diag(1.0 / d.hp ** 3) @ dF - diag(3.0 * E / d.hp) @ ops.Dp
    dG = (
        diag(d.hx / d.hp ** 2) @ ops.Dx
        - diag(A / d.hp ** 3) @ ops.Dp
        + params.g * sparse.identity(d.h.size, format="csr")
    )
    J = (
        diag(ops.interior.astype(float)) @ dE
        + diag(ops.surface.astype(float)) @ dG
        + diag(ops.bottom.astype(float))
    ).tocsr()

    J_half = J[: ops.n_half] @ ops.S
    q_col = sparse.csr_matrix(-ops.surface[: ops.n_half].astype(float)).T
    crest = n_p - 1
    trough = (n_x // 2) * n_p + n_p - 1
    amp_row = sparse.csr_matrix(([0.5, -0.5], ([0, 0], [crest, trough])), shape=(1, ops.n_half))
    return sparse.bmat([[J_half, q_col], [amp_row, None]], format="csc")


def _newton(guess: HeightField, amplitude: float, settings: SolverSettings) -> WaveField:
    params = guess.params
    ops, base = _setup(guess)
    n_x, n_p = guess.n_x, guess.n_p
    d0 = math.sqrt(2.0 * params.m / params.omega)
    crest, trough = n_p - 1, (n_x // 2) * n_p + n_p - 1

    w_half = (guess.h.ravel() - base.H)[: ops.n_half].copy()
    Q = float(guess.Q)

    for iteration in range(settings.max_newton + 1):
        w = ops.S @ w_half
        d = _derivatives(w, ops, base)
        _check_monotone(d.hp)

        E = _interior_equation(d, params.omega)
        G = _surface_equation(d, params, Q)
        full = np.where(ops.interior, E, np.where(ops.surface, G, d.h))
        amp = 0.5 * (w_half[crest] - w_half[trough]) - amplitude

        interior_norm = float(np.abs(full[ops.interior | ops.bottom]).max())
        surface_norm = float(np.abs(G[ops.surface]).max())
        logger.debug(
            "newton %d: interior %.3e surface %.3e amplitude %.3e", iteration, interior_norm, surface_norm, amp
        )
        if (
            interior_norm <= settings.interior_tol
            and surface_norm <= settings.surface_tol
            and abs(amp) <= settings.surface_tol * d0
        ):
            field = HeightField(
                h=w.reshape(n_x, n_p) + base.H.reshape(n_x, n_p),
                p=guess.p,
                L=guess.L,
                Q=Q,
                params=params,
                base_s=guess.base_s,
            )
            return WaveField(
                field=field,
                residuals={"interior": interior_norm, "surface": surface_norm},
                converged=True,
                iterations=iteration,
                amplitude_target=amplitude,
            )
        if iteration == settings.max_newton:
            break

        J = _jacobian(d, ops, params, n_p, n_x)
        rhs = -np.concatenate([full[: ops.n_half], [amp]])
        step = spsolve(J, rhs)
        if not np.all(np.isfinite(step)):
            raise ConvergenceError("singular Newton system", {"interior": interior_norm, "surface": surface_norm})
        w_half = w_half + step[:-1]
        Q += float(step[-1])

    raise ConvergenceError(
        f"Newton did not converge in {settings.max_newton} iterations (amplitude {amplitude:.6g})",
        {"interior": interior_norm, "surface": surface_norm},
    )


# ── Continuation ─────────────────────────────────────────────────────────────

def min_surface_speed(wave: WaveField) -> float:
    """min ψ_y over the grid, the distance from stagnation."""
    return 1.0 / height_residual(wave.field).max_hp


def _predict(branch: list[WaveField], amplitude: float, mode: np.ndarray, k: float) -> HeightField:
    last = branch[-1].field
    if len(branch) == 1:
        h = last.h + amplitude * np.cos(k * last.x)[:, None] * mode[None, :]
        return HeightField(h=h, p=last.p, L=last.L, Q=last.Q, params=last.params, base_s=last.base_s)
    prev = branch[-2]
    a0, a1 = prev.amplitude_target, branch[-1].amplitude_target
    t = (amplitude - a1) / (a1 - a0)
    return HeightField(
        h=last.h + t * (last.h - prev.field.h),
        p=last.p,
        L=last.L,
        Q=last.Q + t * (last.Q - prev.Q),
        params=last.params,
        base_s=last.base_s,
    )


def continue_branch(
    params: FluidParams,
    L: float,
    target: float,
    settings: SolverSettings | None = None,
    max_steps: int | None = None,
) -> list[WaveField]:
    """Follow the branch bifurcating at wavelength *L* from amplitude 0 to *target*.

    Steps in amplitude with a secant predictor; a failed step is halved. The
    branch stops early (BranchTerminatedError, carrying the last wave) when the
    step falls below ``min_step·d0`` or the minimum of ψ_y drops below
    ``stagnation_fraction·m/d0``. With ``target = inf`` the branch runs until it
    stops or *max_steps* waves have been computed.
    """
    settings = _settings(settings)
    if not target >= 0.0:
        raise DomainError(f"amplitude {target!r} must be non-negative")
    d0 = math.sqrt(2.0 * params.m / params.omega)
    s_star = bifurcation_point(params, L)
    k = 2.0 * math.pi / L
    branch = [stream_wave(params, s_star, L, settings)]
    mode = _kernel_mode(params, s_star, k, branch[0].field.p)

    base_step = settings.amplitude_step * d0
    step = base_step
    stagnation = settings.stagnation_fraction * params.m / d0
    amplitude = 0.0

    while amplitude < target:
        if max_steps is not None and len(branch) > max_steps:
            break
        trial = min(amplitude + step, target)
        try:
            wave = _newton(_predict(branch, trial, mode, k), trial, settings)
        except (ConvergenceError, MonotonicityError) as exc:
            step *= 0.5
            logger.debug("step to %.6g failed (%s); halving to %.3g", trial, exc, step)
            if step < settings.min_step * d0:
                raise BranchTerminatedError(
                    f"continuation stalled at amplitude {amplitude:.6g} (target {target:.6g})",
                    last_wave=branch[-1],
                ) from exc
            continue

        branch.append(wave)
        amplitude = trial
        logger.info("amplitude %.6g: Q = %.12g (%d iterations)", amplitude, wave.Q, wave.iterations)
        if min_surface_speed(wave) < stagnation:
            if amplitude < target:
                raise BranchTerminatedError(
                    f"approaching stagnation at amplitude {amplitude:.6g} (target {target:.6g})",
                    last_wave=wave,
                )
            break
        step = min(2.0 * step, base_step)

    return branch


def solve_periodic(
    params: FluidParams,
    L: float,
    amplitude: float,
    init: HeightField | WaveField | None = None,
    settings: SolverSettings | None = None,
) -> WaveField:
    """Periodic wave of wavelength *L* and half crest-to-trough height *amplitude*.

    Without *init* the wave is reached by continuation from its bifurcation
    point; with *init* a single Newton solve starts from that field.
    """
    settings = _settings(settings)
    if not L > 0.0:
        raise DomainError(f"L = {L!r} must be positive")
    if not amplitude >= 0.0:
        raise DomainError(f"amplitude {amplitude!r} must be non-negative")

    if init is not None:
        field = init.field if isinstance(init, WaveField) else init
        return _newton(field, amplitude, settings)
    if amplitude == 0.0:
        return stream_wave(params, bifurcation_point(params, L), L, settings)
    return continue_branch(params, L, amplitude, settings)[-1]


# ── Grid refinement ──────────────────────────────────────────────────────────

def resample_field(field: HeightField, n_x: int, n_p: int) -> HeightField:
    """Spectral resampling in x and cubic-spline resampling in the grid coordinate of the deviation h − H."""
    base_old = _base_profile(field.p, field.base_s, field.params, field.n_x)
    w = field.h - base_old.H.reshape(field.h.shape)
    if n_x != field.n_x:
        w = resample(w, n_x, axis=0)
    p = flux_grid(field.params, n_p, field.base_s)
    if n_p != field.n_p:
        w = CubicSpline(np.linspace(0.0, 1.0, field.n_p), w, axis=1)(np.linspace(0.0, 1.0, n_p))
    base_new = _base_profile(p, field.base_s, field.params, n_x)
    return HeightField(
        h=w + base_new.H.reshape(n_x, n_p),
        p=p,
        L=field.L,
        Q=field.Q,
        params=field.params,
        base_s=field.base_s,
    )


def refine_and_compare(wave: WaveField, settings: SolverSettings | None = None) -> RefinementReport:
    """Truncation error of a converged wave on grids with spacing h and h/2.

    The wave is re-solved on a grid four times finer in both directions; that
    solution, injected onto the original and the twice-finer grid, leaves
    residuals that shrink at the order of the scheme.
    """
    settings = _settings(settings)
    field = wave.field
    n_x, n_p = field.n_x, field.n_p
    fine_n_x, fine_n_p = 4 * n_x, 4 * (n_p - 1) + 1
    fine = _newton(resample_field(field, fine_n_x, fine_n_p), wave.amplitude_target, settings).field

    levels = []
    residuals = []
    for stride in (4, 2):
        injected = HeightField(
            h=fine.h[::stride, ::stride],
            p=fine.p[::stride],
            L=fine.L,
            Q=fine.Q,
            params=fine.params,
            base_s=fine.base_s,
        )
        res = height_residual(injected)
        levels.append((injected.n_x, injected.n_p))
        residuals.append(max(res.interior_norm, res.surface_norm))
    ratio = residuals[0] / residuals[1]
    return RefinementReport(levels=levels, residuals=residuals, ratio=ratio, observed_order=math.log2(ratio))
