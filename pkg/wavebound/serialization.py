"""wavebound — Wave files, certificates and sweep tables on disk.

JSON floats are written with Python's shortest round-trip repr, CSV floats with
17 significant digits; both read back to the same doubles.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np
from pydantic import ValidationError

from wavebound.errors import WaveboundError, WaveFileError
from wavebound.models import (
    SWEEP_COLUMNS,
    AmplitudeBound,
    BoundCertificate,
    DecayReport,
    FluidParams,
    StreamWindow,
    SweepRow,
)
from wavebound.wave_solver import HeightField, WaveField, flux_grid

WAVE_FORMAT = "wavebound.wave/1"


# ── Waves ────────────────────────────────────────────────────────────────────

def wave_to_dict(wave: WaveField) -> dict[str, Any]:
    field = wave.field
    return {
        "format": WAVE_FORMAT,
        "metadata": {
            "params": field.params.model_dump(),
            "L": float(field.L),
            "Q": float(field.Q),
            "base_s": float(field.base_s),
            "amplitude_target": float(wave.amplitude_target),
            "n_x": field.n_x,
            "n_p": field.n_p,
            "residuals": {k: float(v) for k, v in wave.residuals.items()},
            "converged": bool(wave.converged),
            "iterations": int(wave.iterations),
        },
        "grid": {
            "x": field.x.tolist(),
            "p": field.p.tolist(),
            "h": field.h.tolist(),
        },
        "eta": field.eta.tolist(),
    }


def wave_from_dict(data: Any) -> WaveField:
    if not isinstance(data, dict) or data.get("format") != WAVE_FORMAT:
        raise WaveFileError(f"not a {WAVE_FORMAT} document")
    try:
        meta = data["metadata"]
        grid = data["grid"]
        params = FluidParams(**meta["params"])
        h = np.asarray(grid["h"], dtype=float)
        p = np.asarray(grid["p"], dtype=float)
        n_x, n_p = int(meta["n_x"]), int(meta["n_p"])
        field = HeightField(
            h=h,
            p=p,
            L=float(meta["L"]),
            Q=float(meta["Q"]),
            params=params,
            base_s=float(meta["base_s"]),
        )
        wave = WaveField(
            field=field,
            residuals={str(k): float(v) for k, v in meta.get("residuals", {}).items()},
            converged=bool(meta.get("converged", False)),
            iterations=int(meta.get("iterations", 0)),
            amplitude_target=float(meta.get("amplitude_target", 0.0)),
        )
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise WaveFileError(f"malformed wave document: {exc}") from exc

    if h.shape != (n_x, n_p) or p.shape != (n_p,):
        raise WaveFileError(f"grid shape {h.shape} does not match n_x × n_p = {n_x} × {n_p}")
    if not field.L > 0.0:
        raise WaveFileError(f"wavelength must be positive, got {field.L!r}")
    if not (np.all(np.isfinite(h)) and np.all(np.isfinite(p))):
        raise WaveFileError("grid values must be finite")
    try:
        expected = flux_grid(params, n_p, field.base_s)
    except WaveboundError as exc:
        raise WaveFileError(f"base_s is not a valid laminar parameter: {exc}") from exc
    if not np.allclose(p, expected, rtol=1e-10, atol=1e-12 * params.m):
        raise WaveFileError("p grid does not match the flux grid of base_s")
    return wave


def write_wave(path: str | Path, wave: WaveField) -> None:
    Path(path).write_text(json.dumps(wave_to_dict(wave)))


def read_wave(path: str | Path) -> WaveField:
    return wave_from_dict(_load(path, "wave"))


# ── Certificates ─────────────────────────────────────────────────────────────

def write_certificate(path: str | Path, cert: BoundCertificate) -> None:
    Path(path).write_text(json.dumps(cert.model_dump(by_alias=True), indent=2))


def read_certificate(path: str | Path) -> BoundCertificate:
    return BoundCertificate.model_validate(json.loads(Path(path).read_text()))


# ── Sweep tables ─────────────────────────────────────────────────────────────

def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return "" if value is None else str(value)


def write_sweep_csv(path: str | Path, rows: Iterable[SweepRow]) -> None:
    columns = SWEEP_COLUMNS + ("error",)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(columns)
        for row in rows:
            data = row.model_dump()
            writer.writerow([_cell(data[c]) for c in columns])


def read_sweep_csv(path: str | Path) -> list[SweepRow]:
    rows = []
    with open(path, newline="") as f:
        for record in csv.DictReader(f):
            values: dict[str, Any] = {}
            for key, text in record.items():
                if key in ("flags", "error"):
                    values[key] = text or (None if key == "error" else "")
                else:
                    values[key] = float(text) if text else math.nan
            rows.append(SweepRow(**values))
    return rows


def _nulls(value: Any) -> Any:
    """NaN → None throughout, since JSON has no NaN token."""
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, dict):
        return {k: _nulls(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_nulls(v) for v in value]
    return value


def _dump(path: str | Path, document: dict[str, Any]) -> None:
    Path(path).write_text(json.dumps(_nulls(document), indent=2, allow_nan=False))


def _load(path: str | Path, what: str) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise WaveFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise WaveFileError(f"{path} is not a valid {what} document: {exc}") from exc


def sweep_to_dict(rows: list[SweepRow], report: DecayReport | None = None) -> dict[str, Any]:
    return _nulls({
        "columns": list(SWEEP_COLUMNS),
        "rows": [row.model_dump() for row in rows],
        "decay": report.model_dump() if report is not None else None,
    })


def write_sweep_json(path: str | Path, rows: list[SweepRow], report: DecayReport | None = None) -> None:
    _dump(path, sweep_to_dict(rows, report))


def read_sweep_json(path: str | Path) -> tuple[list[SweepRow], DecayReport | None]:
    data = _load(path, "sweep")
    try:
        rows = [
            SweepRow(**{k: (math.nan if v is None and k not in ("error", "flags") else v) for k, v in record.items()})
            for record in data["rows"]
        ]
        report = DecayReport(**data["decay"]) if data.get("decay") is not None else None
    except (KeyError, TypeError, AttributeError, ValidationError) as exc:
        raise WaveFileError(f"malformed sweep document: {exc}") from exc
    return rows, report


# ── Bounds ───────────────────────────────────────────────────────────────────

def bounds_to_dict(params: FluidParams, window: StreamWindow, bound: AmplitudeBound) -> dict[str, Any]:
    return {"params": params.model_dump(), "window": window.model_dump(), "bound": bound.model_dump()}


def write_bounds(path: str | Path, params: FluidParams, window: StreamWindow, bound: AmplitudeBound) -> None:
    _dump(path, bounds_to_dict(params, window, bound))


def read_bounds(path: str | Path) -> tuple[FluidParams, StreamWindow, AmplitudeBound]:
    data = _load(path, "bounds")
    try:
        return FluidParams(**data["params"]), StreamWindow(**data["window"]), AmplitudeBound(**data["bound"])
    except (KeyError, TypeError, ValidationError) as exc:
        raise WaveFileError(f"malformed bounds document: {exc}") from exc
