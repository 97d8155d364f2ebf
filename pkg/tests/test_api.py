import math

import pytest
from fastapi.testclient import TestClient

from wavebound.api import app
from wavebound.models import SolverSettings
from wavebound.serialization import wave_to_dict
from wavebound.wave_solver import stream_wave


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    response = client.get("/api/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_bounds(client):
    response = client.get("/api/bounds", params={"g": 1, "omega": 1, "m": 1})
    assert response.status_code == 200
    body = response.json()
    assert body["window"]["s0"] == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert body["bound"]["theorem_bound"] == 2.0
    assert body["bound"]["branch"] == "large_epsilon"


def test_bounds_rejects_non_positive_vorticity(client):
    response = client.get("/api/bounds", params={"g": 1, "omega": 0, "m": 1})
    assert response.status_code == 422


def test_window_depths(client):
    response = client.get("/api/window/depths", params={"q": 1.2, "g": 1, "omega": 1, "m": 1})
    assert response.status_code == 200
    body = response.json()
    assert body["d_minus"] < body["d_plus"]

    response = client.get("/api/window/depths", params={"q": 2.0, "g": 1, "omega": 1, "m": 1})
    assert response.status_code == 400
    assert response.json()["status"] == "error"


def test_certify_stream(client, unit_params):
    wave = stream_wave(unit_params, 1.5, 10.0, SolverSettings(n_x=16, n_p=9))
    response = client.post("/api/certify", json=wave_to_dict(wave))
    assert response.status_code == 200
    cert = response.json()["certificate"]
    assert cert["passed"] is True
    assert cert["is_stream"] is True
    assert cert["checks"]["bernoulli_window"]["vacuous"] is True


def test_certify_malformed(client):
    response = client.post("/api/certify", json={"format": "something-else"})
    assert response.status_code == 422
    assert response.json()["status"] == "error"
