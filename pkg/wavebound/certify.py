"""wavebound — Certification of computed waves against the amplitude bounds.

A converged wave is checked against

    amplitude < 2g/ω²              amplitude < λ⁻¹(√2 − d̃₁)
    Qc < Q < Q0                    inf η ≥ d_−(Q)
    sup η ≥ d_+(Q)                 sup η ≤ d0

Every margin is computed twice, once in physical units and once from the
rescaled problem, so the two columns cross-check the scaling.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy import stats

from wavebound.amplitude_bounds import refined_bound, theorem_bound_tilde
from wavebound.config import INTERIOR_TOL, STREAM_AMPLITUDE, STRICTNESS, SURFACE_TOL
from wavebound.errors import (
    BranchTerminatedError,
    DomainError,
    InsufficientRowsError,
    OutOfWindowError,
    UnconvergedWaveError,
    WaveboundError,
)
from wavebound.models import (
    BoundCertificate,
    BranchSpec,
    DecayReport,
    DepthPair,
    FluidParams,
    InequalityCheck,
    SolverSettings,
    StreamWindow,
    SweepRow,
)
from wavebound.scaling import SQRT2, nondim_params, nondimensionalize, scale_amplitude
from wavebound.stream_flows import depth_pair, stream_window
from wavebound.wave_solver import WaveField, bifurcation_wavelength, continue_branch

logger = logging.getLogger(__name__)

NAN = float("nan")
BOUND_SLOPE_TOL = 1e-12


def _vertex(eta: np.ndarray, i: int) -> float:
    n = eta.size
    fm, f0, fp = eta[(i - 1) % n], eta[i], eta[(i + 1) % n]
    b = 0.5 * (fp - fm)
    c = 0.5 * (fm - 2.0 * f0 + fp)
    if c == 0.0:
        return float(f0)
    return float(f0 - b * b / (4.0 * c))


def surface_extrema(wave: WaveField) -> tuple[float, float]:
    """(inf η, sup η), each refined by the parabola through the extremal node and its neighbours."""
    eta = np.asarray(wave.eta, dtype=float)
    lo = _vertex(eta, int(np.argmin(eta)))
    hi = _vertex(eta, int(np.argmax(eta)))
    return min(lo, float(eta.min())), max(hi, float(eta.max()))


def _check_residuals(wave: WaveField) -> None:
    if not wave.converged:
        raise UnconvergedWaveError("wave is marked as not converged")
    limits = {"interior": INTERIOR_TOL, "surface": SURFACE_TOL}
    for name, limit in limits.items():
        value = wave.residuals.get(name)
        if value is None or not math.isfinite(value):
            raise UnconvergedWaveError(f"wave carries no '{name}' residual")
        if value > limit:
            raise UnconvergedWaveError(f"{name} residual {value:.3e} exceeds {limit:.1e}")


def _pair_or_none(q: float, params: FluidParams, window: StreamWindow) -> DepthPair | None:
    try:
        return depth_pair(q, params, window)
    except OutOfWindowError:
        return None


def _check(
    name: str,
    lhs: float,
    rhs: float | None,
    margin: float | None,
    margin_tilde: float | None,
    scale: float,
    vacuous: bool = False,
) -> InequalityCheck:
    passed = vacuous or (margin is not None and bool(margin > -STRICTNESS * scale))
    return InequalityCheck(
        name=name,
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        margin_tilde=margin_tilde,
        passed=passed,
        vacuous=vacuous,
    )


def certify_wave(wave: WaveField, params: FluidParams | None = None) -> BoundCertificate:
    params = params or wave.params
    _check_residuals(wave)

    window = stream_window(params)
    bound = refined_bound(params)
    nd = nondimensionalize(params, wave.Q)
    lam = nd.lambda_
    nd_params = nondim_params(nd.epsilon)
    nd_window = stream_window(nd_params)

    inf_eta, sup_eta = surface_extrema(wave)
    amplitude = sup_eta - inf_eta
    inf_t, sup_t = scale_amplitude(np.array([inf_eta, sup_eta]), params)
    amplitude_t = scale_amplitude(amplitude, params)
    is_stream = amplitude < STREAM_AMPLITUDE * window.d0
    Q, Q_t = wave.Q, nd.Q_tilde

    pair = _pair_or_none(Q, params, window)
    pair_t = _pair_or_none(Q_t, nd_params, nd_window)

    checks = {
        "amplitude": _check(
            "amplitude",
            amplitude,
            bound.theorem_bound,
            bound.theorem_bound - amplitude,
            theorem_bound_tilde(nd.epsilon) - amplitude_t,
            window.d0,
        ),
        "refined_amplitude": _check(
            "refined_amplitude",
            amplitude,
            bound.refined_bound,
            bound.refined_bound - amplitude,
            (SQRT2 - bound.d_tilde_1) - amplitude_t,
            window.d0,
        ),
        "bernoulli_window": _check(
            "bernoulli_window",
            Q,
            window.Q0,
            min(Q - window.Qc, window.Q0 - Q),
            min(Q_t - nd_window.Qc, nd_window.Q0 - Q_t),
            window.Q0,
            vacuous=is_stream,
        ),
        "inf_eta_lower": _check(
            "inf_eta_lower",
            inf_eta,
            pair.d_minus if pair is not None else None,
            inf_eta - pair.d_minus if pair is not None else None,
            inf_t - pair_t.d_minus if pair_t is not None else None,
            window.d0,
            vacuous=is_stream,
        ),
        "sup_eta_lower": _check(
            "sup_eta_lower",
            sup_eta,
            pair.d_plus if pair is not None else None,
            sup_eta - pair.d_plus if pair is not None else None,
            sup_t - pair_t.d_plus if pair_t is not None else None,
            window.d0,
            vacuous=is_stream,
        ),
        "sup_eta_upper": _check(
            "sup_eta_upper",
            sup_eta,
            window.d0,
            window.d0 - sup_eta,
            SQRT2 - sup_t,
            window.d0,
        ),
    }

    cert = BoundCertificate(
        amplitude=amplitude,
        theorem_bound=bound.theorem_bound,
        refined_bound=bound.refined_bound,
        Q=Q,
        Qc=window.Qc,
        Q0=window.Q0,
        d_minus_Q=pair.d_minus if pair is not None else None,
        d_plus_Q=pair.d_plus if pair is not None else None,
        d0=window.d0,
        inf_eta=inf_eta,
        sup_eta=sup_eta,
        epsilon=nd.epsilon,
        lambda_=lam,
        is_stream=is_stream,
        checks=checks,
        passed=all(c.passed for c in checks.values()),
    )
    if not cert.passed:
        logger.warning("certificate failed: %s", cert.flags())
    return cert


def certify_many(waves: list[WaveField], workers: int = 1) -> list[BoundCertificate]:
    """Certify independent waves, in a process pool when *workers* > 1."""
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(certify_wave, waves))
    return [certify_wave(w) for w in waves]


# ── Vorticity sweeps ─────────────────────────────────────────────────────────

def _sweep_row(omega: float, base: FluidParams, spec: BranchSpec, settings: SolverSettings | None) -> SweepRow:
    params = FluidParams(g=base.g, omega=omega, m=base.m)
    window = stream_window(params)
    bound = refined_bound(params)
    row: dict = {
        "omega": omega,
        "g": params.g,
        "m": params.m,
        "theorem_bound": bound.theorem_bound,
        "refined_bound": bound.refined_bound,
        "Qc": window.Qc,
        "Q0": window.Q0,
        "d0": window.d0,
    }
    try:
        s_mid = window.s0 + spec.window_fraction * (window.sc - window.s0)
        L = bifurcation_wavelength(params, s_mid)
        row["L"] = L
        target = math.inf if spec.target_fraction is None else spec.target_fraction * window.d0
        try:
            wave = continue_branch(params, L, target, settings, max_steps=spec.max_steps)[-1]
        except BranchTerminatedError as exc:
            wave = exc.last_wave
            if spec.target_fraction is not None:
                row["error"] = f"{type(exc).__name__}: {exc}"
        cert = certify_wave(wave, params)
        row.update(
            amplitude=cert.amplitude,
            Q=cert.Q,
            d_minus=cert.d_minus_Q if cert.d_minus_Q is not None else NAN,
            d_plus=cert.d_plus_Q if cert.d_plus_Q is not None else NAN,
            inf_eta=cert.inf_eta,
            sup_eta=cert.sup_eta,
            flags=cert.flags(),
        )
    except WaveboundError as exc:
        logger.warning("ω = %g: %s", omega, exc)
        row["error"] = f"{type(exc).__name__}: {exc}"
    return SweepRow(**row)


def sweep_vorticity(
    omegas: list[float],
    base: FluidParams,
    spec: BranchSpec | None = None,
    settings: SolverSettings | None = None,
) -> list[SweepRow]:
    """One certified row per vorticity, in increasing ω; failed rows carry ``error``."""
    spec = spec or BranchSpec()
    omegas = sorted(float(w) for w in omegas)
    if len(omegas) < 2:
        raise DomainError("a vorticity sweep needs at least two values of ω")
    if any(not w > 0.0 for w in omegas):
        raise DomainError("every vorticity must be strictly positive")

    workers = settings.workers if settings is not None else 1
    logger.info("sweeping %d vorticities with %d worker(s)", len(omegas), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_sweep_row, w, base, spec, settings) for w in omegas]
            return [f.result() for f in futures]
    return [_sweep_row(w, base, spec, settings) for w in omegas]


def compare_decay_rates(rows: list[SweepRow]) -> DecayReport:
    """Log-log slopes of the bound columns (and of the achieved amplitudes) against ω."""
    if len(rows) < 4:
        raise InsufficientRowsError(f"need at least 4 rows, got {len(rows)}")
    log_w = np.log([r.omega for r in rows])
    bound_slope = float(np.polyfit(log_w, np.log([r.theorem_bound for r in rows]), 1)[0])
    if abs(bound_slope + 2.0) > BOUND_SLOPE_TOL:
        raise DomainError(f"theorem-bound slope {bound_slope!r} is not −2; rows mix g or m")
    refined_slope = float(np.polyfit(log_w, np.log([r.refined_bound for r in rows]), 1)[0])

    solved = [r for r in rows if r.error is None and math.isfinite(r.amplitude) and r.amplitude > 0.0]
    amplitude_slope = ci = None
    if len(solved) >= 3:
        fit = stats.linregress(np.log([r.omega for r in solved]), np.log([r.amplitude for r in solved]))
        half = float(stats.t.ppf(0.975, len(solved) - 2)) * fit.stderr
        amplitude_slope = float(fit.slope)
        ci = (amplitude_slope - half, amplitude_slope + half)

    report = DecayReport(
        n_rows=len(rows),
        bound_slope=bound_slope,
        refined_slope=refined_slope,
        amplitude_slope=amplitude_slope,
        amplitude_slope_ci=ci,
    )
    logger.info("decay slopes: bound %.12f, refined %.6f, amplitude %s", bound_slope, refined_slope, amplitude_slope)
    return report
