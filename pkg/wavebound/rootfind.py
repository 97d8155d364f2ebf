"""wavebound — Bracketed root finding.

Bisection refined by a safeguarded Newton step: a Newton step is accepted only
when it lands strictly inside the current bracket and shrinks the step faster
than bisection would; otherwise the bracket is halved. The bracket always keeps
a sign change, so the iteration cannot escape it.
"""

from __future__ import annotations

import math
from typing import Callable

from scipy.optimize import brentq

from wavebound.config import ROOT_RTOL
from wavebound.errors import RootFindingError

Scalar = Callable[[float], float]


def safe_newton(
    f: Scalar,
    fprime: Scalar,
    lo: float,
    hi: float,
    rtol: float = ROOT_RTOL,
    atol: float = 0.0,
    maxiter: int = 200,
) -> float:
    """Root of *f* in ``[lo, hi]``; ``f(lo)`` and ``f(hi)`` must differ in sign."""
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise RootFindingError(f"no sign change on [{lo!r}, {hi!r}]: f = {f_lo!r}, {f_hi!r}")

    # Orient so that f(a) < 0 < f(b).
    a, b = (lo, hi) if f_lo < 0 else (hi, lo)
    x = 0.5 * (lo + hi)
    dx_old = abs(hi - lo)
    dx = dx_old
    fx, dfx = f(x), fprime(x)

    for _ in range(maxiter):
        newton_out = ((x - b) * dfx - fx) * ((x - a) * dfx - fx) > 0.0
        slow = abs(2.0 * fx) > abs(dx_old * dfx)
        dx_old = dx
        if dfx == 0.0 or newton_out or slow:
            dx = 0.5 * (b - a)
            x = a + dx
        else:
            dx = fx / dfx
            x -= dx
        if abs(dx) <= rtol * abs(x) + atol:
            return x
        fx, dfx = f(x), fprime(x)
        if fx == 0.0:
            return x
        if fx < 0.0:
            a = x
        else:
            b = x

    raise RootFindingError(f"safeguarded Newton did not converge in {maxiter} iterations")


def bracketed_root(f: Scalar, lo: float, hi: float, rtol: float = ROOT_RTOL, atol: float = 1e-300) -> float:
    """Derivative-free root on a sign-change bracket (Brent's method)."""
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo < 0) == (f_hi < 0):
        raise RootFindingError(f"no sign change on [{lo!r}, {hi!r}]: f = {f_lo!r}, {f_hi!r}")
    return float(brentq(f, lo, hi, xtol=atol, rtol=max(rtol, 4.0 * 2.220446049250313e-16), maxiter=500))


def grow_upper(
    f: Scalar,
    start: float,
    target_sign: float = 1.0,
    factor: float = 2.0,
    max_steps: int = 60,
) -> float:
    """Multiply *start* by *factor* until ``f`` has sign *target_sign*."""
    x = start
    for _ in range(max_steps):
        if math.copysign(1.0, f(x)) == target_sign:
            return x
        x *= factor
    raise RootFindingError(f"bracket growth exhausted after {max_steps} steps from {start!r}")


def first_sign_change(f: Scalar, grid) -> tuple[float, float] | None:
    """First adjacent pair of *grid* points where *f* changes sign, or ``None``."""
    prev_x = None
    prev_f = None
    for x in grid:
        fx = f(float(x))
        if not math.isfinite(fx):
            continue
        if prev_f is not None and (fx < 0) != (prev_f < 0):
            return prev_x, float(x)
        prev_x, prev_f = float(x), fx
    return None
