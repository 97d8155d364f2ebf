from __future__ import annotations

import asyncio
import logging

from fastapi import Body, FastAPI, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from wavebound import __version__
from wavebound.amplitude_bounds import refined_bound
from wavebound.certify import certify_wave
from wavebound.config import CORS_ORIGINS
from wavebound.errors import UnconvergedWaveError, WaveboundError, WaveFileError
from wavebound.models import FluidParams
from wavebound.serialization import wave_from_dict
from wavebound.stream_flows import depth_pair, stream_window

logger = logging.getLogger(__name__)

# ── App setup ────────────────────────────────────────────────────────────────

app = FastAPI(title="Wavebound", version=__version__, description="Amplitude bounds for steady vortical water waves")

app.add_middleware(
    CORSMiddleware,
    allow_origins=CORS_ORIGINS,
    allow_methods=["*"],
    allow_headers=["*"],
)


def _error(exc: Exception, status_code: int = 400) -> JSONResponse:
    return JSONResponse({"status": "error", "message": str(exc)}, status_code=status_code)


def _params(g: float, omega: float, m: float) -> FluidParams:
    return FluidParams(g=g, omega=omega, m=m)


# ── REST: closed-form quantities ─────────────────────────────────────────────

@app.get("/api/health")
async def health() -> JSONResponse:
    return JSONResponse({"status": "ok"})


@app.get("/api/bounds")
async def bounds(
    g: float = Query(..., gt=0),
    omega: float = Query(..., gt=0),
    m: float = Query(..., gt=0),
) -> JSONResponse:
    """Stream window and amplitude bounds for (g, ω, m)."""
    params = _params(g, omega, m)
    try:
        window, bound = await asyncio.to_thread(lambda: (stream_window(params), refined_bound(params)))
    except WaveboundError as exc:
        return _error(exc, 422)
    return JSONResponse({
        "status": "ok",
        "params": params.model_dump(),
        "window": window.model_dump(),
        "bound": bound.model_dump(),
    })


@app.get("/api/window/depths")
async def window_depths(
    q: float = Query(...),
    g: float = Query(..., gt=0),
    omega: float = Query(..., gt=0),
    m: float = Query(..., gt=0),
) -> JSONResponse:
    """The conjugate depths d_∓(q) of a Bernoulli value inside the window."""
    params = _params(g, omega, m)
    try:
        pair = await asyncio.to_thread(depth_pair, q, params)
    except WaveboundError as exc:
        return _error(exc)
    return JSONResponse({"status": "ok", **pair.model_dump()})


# ── REST: certification ──────────────────────────────────────────────────────

@app.post("/api/certify")
async def certify(document: dict = Body(...)) -> JSONResponse:
    """Certify a wave posted in the ``wavebound.wave/1`` JSON layout."""
    try:
        wave = wave_from_dict(document)
        cert = await asyncio.to_thread(certify_wave, wave)
    except (WaveFileError, UnconvergedWaveError) as exc:
        return _error(exc, 422)
    except WaveboundError as exc:
        logger.warning("certification failed: %s", exc)
        return _error(exc)
    return JSONResponse({"status": "ok", "certificate": cert.model_dump(by_alias=True, mode="json")})
