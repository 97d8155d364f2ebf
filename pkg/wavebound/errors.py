from __future__ import annotations

from typing import Any


class WaveboundError(Exception):
    """Base class for every error raised by wavebound."""


class BelowCriticalError(WaveboundError, ValueError):
    """Laminar parameter below s0 (or s̃ below √2)."""


class DomainError(WaveboundError, ValueError):
    """Argument outside the interval on which a closed form is defined."""


class OutOfWindowError(WaveboundError, ValueError):
    """Bernoulli value outside the open window (Qc, Q0)."""


class BranchCaseError(WaveboundError, ValueError):
    """delta_root called in the large-ε regime; use the direct d̃₁ solve instead."""


class RootFindingError(WaveboundError, RuntimeError):
    pass


class ConvergenceError(WaveboundError, RuntimeError):
    def __init__(self, message: str, residuals: dict[str, float] | None = None) -> None:
        super().__init__(message)
        self.residuals = residuals or {}


class MonotonicityError(WaveboundError, RuntimeError):
    """h_p ≤ 0 at some node: the flow is no longer unidirectional."""


class BranchTerminatedError(ConvergenceError):
    """Continuation stopped before reaching the requested amplitude."""

    def __init__(self, message: str, last_wave: Any = None) -> None:
        super().__init__(message)
        self.last_wave = last_wave


class BifurcationNotFoundError(WaveboundError, RuntimeError):
    pass


class UnconvergedWaveError(WaveboundError, ValueError):
    pass


class InsufficientRowsError(WaveboundError, ValueError):
    pass


class ConfigError(WaveboundError, ValueError):
    pass


class WaveFileError(WaveboundError, ValueError):
    pass
