"""wavebound — Explicit amplitude bounds.

Any non-stream wave with positive constant vorticity satisfies

    sup η − inf η ≤ λ⁻¹(√2 − d̃₁) < 2g/ω²,

where d̃₁ = d̃_−(Q̃₀) is the lower conjugate depth of the top of the Bernoulli
window in scaled variables. For ε < √2/2 the gap √2 − d̃₁ is the nonzero root δ*
of Q̃(√2 − δ) = ε√2; for ε ≥ √2/2 it is at most √2 ≤ 2ε outright, and d̃₁ is
solved for directly.
"""

from __future__ import annotations

import logging

import numpy as np

from wavebound.errors import BranchCaseError, DomainError
from wavebound.models import AmplitudeBound, FluidParams, InequalityReport
from wavebound.rootfind import safe_newton
from wavebound.scaling import (
    SQRT2,
    Q_tilde_of_d,
    Q_tilde_slope,
    critical_depth_tilde,
    nondimensionalize,
)

logger = logging.getLogger(__name__)

ROOT_ATOL = 1e-14
SMALL_EPSILON_LIMIT = SQRT2 / 2.0


def theorem_bound(params: FluidParams) -> float:
    return 2.0 * params.g / params.omega ** 2


def theorem_bound_tilde(epsilon: float) -> float:
    return 2.0 * epsilon


# ── δ-form of the Bernoulli gap ──────────────────────────────────────────────

def bernoulli_gap(delta, epsilon: float):
    """Q̃(√2 − δ) − ε√2, evaluated without forming √2 − δ first.

    With d̃ = √2 − δ one has d̃² − 2 = δ(δ − 2√2), so the gap is
    δ²(2√2 − δ)²/(8(√2 − δ)²) − εδ.
    """
    delta = np.asarray(delta, dtype=float)
    return delta ** 2 * (2.0 * SQRT2 - delta) ** 2 / (8.0 * (SQRT2 - delta) ** 2) - epsilon * delta


def gap_expansion(delta, epsilon: float):
    """The three-term form −εδ + δ²/2 + δ³(4√2 − 3δ)/(8(√2 − δ)²), split as (leading, remainder)."""
    delta = np.asarray(delta, dtype=float)
    leading = -epsilon * delta + 0.5 * delta ** 2
    remainder = delta ** 3 * (4.0 * SQRT2 - 3.0 * delta) / (8.0 * (SQRT2 - delta) ** 2)
    return leading, remainder


def _reduced_gap(delta: float, epsilon: float) -> float:
    # gap/δ, which drops the trivial root δ = 0; strictly increasing on (0, √2).
    return delta * (2.0 * SQRT2 - delta) ** 2 / (8.0 * (SQRT2 - delta) ** 2) - epsilon


def _reduced_gap_slope(delta: float) -> float:
    a = (2.0 * SQRT2 - delta) ** 2
    b = 8.0 * (SQRT2 - delta) ** 2
    da = -2.0 * (2.0 * SQRT2 - delta)
    db = -16.0 * (SQRT2 - delta)
    return a / b + delta * da / b - delta * a * db / (b * b)


def delta_root(epsilon: float) -> float:
    """Nonzero root δ* ∈ (0, 2ε) of Q̃(√2 − δ) = ε√2, for 0 < ε < √2/2."""
    if not epsilon > 0.0:
        raise DomainError(f"ε = {epsilon!r} must be positive")
    if epsilon >= SMALL_EPSILON_LIMIT:
        raise BranchCaseError(f"ε = {epsilon!r} ≥ √2/2: use the large-ε branch")

    hi = 2.0 * epsilon
    lo = hi
    # Scan down from 2ε to the sign change; the gap is positive at 2ε.
    while float(bernoulli_gap(lo, epsilon)) >= 0.0:
        lo *= 0.5
    return safe_newton(
        lambda d: _reduced_gap(d, epsilon),
        _reduced_gap_slope,
        lo,
        hi,
        atol=ROOT_ATOL,
    )


def d_tilde_1(epsilon: float) -> float:
    """d̃₁ = d̃_−(ε√2), the lower conjugate depth of Q̃₀ in scaled variables."""
    if epsilon < SMALL_EPSILON_LIMIT:
        return SQRT2 - delta_root(epsilon)

    target = epsilon * SQRT2
    d_c = critical_depth_tilde(epsilon)
    lo = d_c
    while Q_tilde_of_d(lo, epsilon) <= target:
        lo *= 0.5
    return safe_newton(
        lambda d: Q_tilde_of_d(d, epsilon) - target,
        lambda d: Q_tilde_slope(d, epsilon),
        lo,
        d_c,
        atol=ROOT_ATOL,
    )


def refined_bound(params: FluidParams) -> AmplitudeBound:
    nd = nondimensionalize(params)
    eps = nd.epsilon
    if eps < SMALL_EPSILON_LIMIT:
        branch = "small_epsilon"
        gap = delta_root(eps)
        d1 = SQRT2 - gap
    else:
        branch = "large_epsilon"
        d1 = d_tilde_1(eps)
        gap = SQRT2 - d1
    bound = AmplitudeBound(
        theorem_bound=theorem_bound(params),
        refined_bound=gap / nd.lambda_,
        epsilon=eps,
        d_tilde_1=d1,
        branch=branch,
    )
    logger.debug("ε = %.6g (%s): refined %.6g < theorem %.6g", eps, branch, bound.refined_bound, bound.theorem_bound)
    return bound


def proof_inequality_check(epsilon: float, n_samples: int, seed: int = 0) -> InequalityReport:
    """Sample δ ∈ (0, √2) and check the gap expansion and its strict lower bound.

    ``max_violation`` is max over samples of (−εδ + δ²/2) − gap, which must be
    negative; ``max_identity_residual`` is relative to the size of the terms.
    """
    if not epsilon > 0.0:
        raise DomainError(f"ε = {epsilon!r} must be positive")
    if n_samples < 1:
        raise DomainError("n_samples must be at least 1")

    rng = np.random.default_rng(seed)
    delta = rng.uniform(0.0, SQRT2, size=n_samples)
    delta = delta[(delta > 0.0) & (delta < SQRT2)]

    gap = bernoulli_gap(delta, epsilon)
    leading, remainder = gap_expansion(delta, epsilon)
    scale = np.maximum.reduce([np.abs(epsilon * delta), 0.5 * delta ** 2, np.abs(remainder)])
    identity = np.abs(gap - (leading + remainder)) / scale

    report = InequalityReport(
        epsilon=epsilon,
        n_samples=int(delta.size),
        max_identity_residual=float(identity.max()),
        min_remainder=float(remainder.min()),
        max_violation=float(np.max(leading - gap)),
    )
    if report.max_violation >= 0.0:
        logger.warning("gap lower bound violated for ε = %g: %s", epsilon, report)
    return report
