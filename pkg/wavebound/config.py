"""wavebound — Configuration settings."""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any

from dotenv import dotenv_values, load_dotenv

from wavebound.errors import ConfigError

BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv(BASE_DIR / ".env")

# ── Root finding ─────────────────────────────────────────────────────────────
ROOT_RTOL = float(os.getenv("WAVEBOUND_ROOT_RTOL", "1e-12"))
MAX_BRACKET_DOUBLINGS = 60         # Upper-bracket growth cap for the fast conjugate flow
RADICAND_CLAMP = 1e-15             # |s² − 2ωm| below this · s² is treated as 0
FOLD_TOLERANCE = 1e-13             # q − Qc below this · Q0 is a degenerate pair

# ── Height-function solver ───────────────────────────────────────────────────
N_X = int(os.getenv("WAVEBOUND_N_X", "64"))              # Nodes along one wavelength
N_P = int(os.getenv("WAVEBOUND_N_P", "40"))              # Nodes across the flux strip [0, m]
MAX_NEWTON = int(os.getenv("WAVEBOUND_MAX_NEWTON", "12"))
INTERIOR_TOL = float(os.getenv("WAVEBOUND_INTERIOR_TOL", "1e-10"))
SURFACE_TOL = float(os.getenv("WAVEBOUND_SURFACE_TOL", "1e-8"))

# ── Continuation ─────────────────────────────────────────────────────────────
AMPLITUDE_STEP = float(os.getenv("WAVEBOUND_AMPLITUDE_STEP", "2e-3"))   # Fraction of d0 per step
MIN_STEP = float(os.getenv("WAVEBOUND_MIN_STEP", "1e-6"))               # Fraction of d0
STAGNATION_FRACTION = float(os.getenv("WAVEBOUND_STAGNATION_FRACTION", "0.02"))

# ── Certification ────────────────────────────────────────────────────────────
STRICTNESS = 1e-9                  # Inequalities pass with margin > −STRICTNESS · scale
STREAM_AMPLITUDE = 1e-12           # amplitude < this · d0 marks a stream

# ── Sweeps / server ──────────────────────────────────────────────────────────
WORKERS = int(os.getenv("WAVEBOUND_WORKERS", "1"))
LOG_LEVEL = os.getenv("WAVEBOUND_LOG_LEVEL", "INFO")
HOST = os.getenv("WAVEBOUND_HOST", "0.0.0.0")
PORT = int(os.getenv("WAVEBOUND_PORT", "8000"))
CORS_ORIGINS = os.getenv(
    "WAVEBOUND_CORS_ORIGINS",
    "http://localhost:3000,http://localhost:5173",
).split(",")

_SETTING_KEYS = (
    "n_x",
    "n_p",
    "max_newton",
    "interior_tol",
    "surface_tol",
    "amplitude_step",
    "min_step",
    "stagnation_fraction",
    "workers",
)


def default_settings() -> dict[str, Any]:
    return {
        "n_x": N_X,
        "n_p": N_P,
        "max_newton": MAX_NEWTON,
        "interior_tol": INTERIOR_TOL,
        "surface_tol": SURFACE_TOL,
        "amplitude_step": AMPLITUDE_STEP,
        "min_step": MIN_STEP,
        "stagnation_fraction": STAGNATION_FRACTION,
        "workers": WORKERS,
    }


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse a plain-text ``key=value`` file; keys are normalised to lower case."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    raw = dotenv_values(path)
    values: dict[str, str] = {}
    for key, value in raw.items():
        name = key.strip().lower()
        if name.startswith("wavebound_"):
            name = name[len("wavebound_"):]
        if value is None:
            raise ConfigError(f"{path}: key '{key}' has no value")
        values[name] = value.strip()
    return values


def load_settings(path: str | Path | None = None, **overrides: Any):
    """Build validated solver settings.

    Precedence: defaults and environment < config file < explicit *overrides*
    (``None`` overrides are ignored). Physical keys in the file are left for the
    CLI to consume and are not rejected here.
    """
    from pydantic import ValidationError

    from wavebound.models import RUN_KEYS, SolverSettings

    values: dict[str, Any] = default_settings()
    if path is not None:
        for key, value in read_config_file(path).items():
            if key in _SETTING_KEYS:
                values[key] = value
            elif key not in RUN_KEYS:
                raise ConfigError(f"unknown config key '{key}'")
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SolverSettings(**values)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def configure_logging(level: str | int = LOG_LEVEL) -> None:
    logging.basicConfig(
        level=level if isinstance(level, int) else level.upper(),
        format="[%(name)s] %(message)s",
        force=True,
    )
