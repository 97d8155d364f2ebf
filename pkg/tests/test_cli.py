import json

import pytest

from wavebound.cli import EXIT_CERTIFICATION, EXIT_OK, EXIT_SOLVER, EXIT_USAGE, main
from wavebound.serialization import read_bounds

UNIT = ["--g", "1", "--omega", "1", "--m", "1"]
GRID = ["--n-x", "64", "--n-p", "40"]


@pytest.fixture(scope="module")
def wave_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "wave.json"
    code = main(["solve", *UNIT, *GRID, "--amplitude", "0.003", "--output", str(path)])
    assert code == EXIT_OK
    return path


def test_bounds(tmp_path, capsys):
    out = tmp_path / "bounds.json"
    assert main(["bounds", *UNIT, "--output", str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert data["bound"]["theorem_bound"] == 2.0
    assert data["bound"]["refined_bound"] < 2.0
    assert "refined bound" in capsys.readouterr().out


def test_bounds_from_config_file(tmp_path):
    config = tmp_path / "run.env"
    config.write_text("g=1\nomega=2\nm=1\n")
    out = tmp_path / "bounds.json"
    assert main(["bounds", "--omega", "1", "--config", str(config), "--output", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["params"]["omega"] == 2.0


def test_missing_parameter_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["bounds", "--g", "1", "--m", "1"])
    assert info.value.code == EXIT_USAGE


def test_non_positive_parameter_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["bounds", "--g", "-1", "--omega", "1", "--m", "1"])
    assert info.value.code == EXIT_USAGE


def test_unknown_config_key(tmp_path):
    config = tmp_path / "bad.env"
    config.write_text("bogus=1\n")
    assert main(["solve", *UNIT, "--config", str(config)]) == EXIT_USAGE


def test_solve_writes_a_converged_wave(wave_file):
    data = json.loads(wave_file.read_text())
    assert data["metadata"]["converged"]
    assert data["metadata"]["amplitude_target"] == 0.003
    assert data["metadata"]["n_x"] == 64


def test_certify_passes(wave_file, tmp_path):
    out = tmp_path / "certificate.json"
    assert main(["certify", str(wave_file), "--output", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["passed"] is True


def test_certify_inflated_wave_fails(wave_file, tmp_path):
    data = json.loads(wave_file.read_text())
    data["grid"]["h"] = [[2.0 * v for v in row] for row in data["grid"]["h"]]
    data["eta"] = [2.0 * v for v in data["eta"]]
    inflated = tmp_path / "inflated.json"
    inflated.write_text(json.dumps(data))
    assert main(["certify", str(inflated)]) == EXIT_CERTIFICATION


def test_certify_unconverged_wave(wave_file, tmp_path):
    data = json.loads(wave_file.read_text())
    data["metadata"]["converged"] = False
    path = tmp_path / "unconverged.json"
    path.write_text(json.dumps(data))
    assert main(["certify", str(path)]) == EXIT_SOLVER


def test_certify_unreadable_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("[1, 2")
    assert main(["certify", str(path)]) == EXIT_USAGE
    assert main(["certify", str(tmp_path / "missing.json")]) == EXIT_USAGE


def test_sweep_needs_two_vorticities():
    with pytest.raises(SystemExit) as info:
        main(["sweep", "--g", "1", "--m", "1", "--omegas", "1"])
    assert info.value.code == EXIT_USAGE


def test_sweep_table(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main([
        "sweep", "--g", "1", "--m", "1", "--omegas", "1", "2",
        *GRID, "--target-fraction", "2e-3", "--format", "csv", "--output", str(out),
    ])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("omega,g,m,L,amplitude")
    assert len(lines) == 3


def test_bounds_with_gravity(tmp_path):
    out = tmp_path / "bounds.json"
    assert main(["bounds", "--g", "9.81", "--omega", "3", "--m", "1", "--output", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["bound"]["theorem_bound"] == pytest.approx(2.18, abs=1e-2)


def test_zero_amplitude_writes_a_stream(tmp_path):
    path = tmp_path / "stream.json"
    assert main(["solve", *UNIT, *GRID, "--amplitude", "0", "--output", str(path)]) == EXIT_OK
    eta = json.loads(path.read_text())["eta"]
    assert max(eta) == min(eta)
    assert main(["certify", str(path)]) == EXIT_OK


def test_stalled_branch_exits_with_solver_code(tmp_path):
    config = tmp_path / "strict.env"
    config.write_text("max_newton=1\ninterior_tol=1e-16\nsurface_tol=1e-16\nmin_step=0.5\n")
    path = tmp_path / "wave.json"
    code = main(["solve", *UNIT, *GRID, "--amplitude", "0.01", "--config", str(config), "--output", str(path)])
    assert code == EXIT_SOLVER
    assert json.loads(path.read_text())["metadata"]["amplitude_target"] == 0.0


def test_empty_vorticity_list():
    with pytest.raises(SystemExit) as info:
        main(["sweep", "--g", "1", "--m", "1", "--omegas"])
    assert info.value.code == EXIT_USAGE


def test_bounds_reads_back(tmp_path):
    out = tmp_path / "bounds.json"
    assert main(["bounds", *UNIT, "--output", str(out)]) == EXIT_OK
    params, window, bound = read_bounds(out)
    assert params.omega == 1.0
    assert window.Qc < window.Q0
    assert bound.refined_bound < bound.theorem_bound


def test_unresolved_window_is_a_solver_failure(capsys):
    assert main(["bounds", "--g", "1e-12", "--omega", "1", "--m", "1"]) == EXIT_SOLVER
    assert "❌" in capsys.readouterr().out


def test_certify_unresolved_window(wave_file, tmp_path):
    data = json.loads(wave_file.read_text())
    data["metadata"]["params"]["g"] = 1e-12
    path = tmp_path / "weak_gravity.json"
    path.write_text(json.dumps(data))
    assert main(["certify", str(path)]) == EXIT_SOLVER


def test_certify_several_files(wave_file, tmp_path, capsys):
    data = json.loads(wave_file.read_text())
    data["grid"]["h"] = [[2.0 * v for v in row] for row in data["grid"]["h"]]
    data["eta"] = [2.0 * v for v in data["eta"]]
    inflated = tmp_path / "inflated.json"
    inflated.write_text(json.dumps(data))
    assert main(["certify", str(wave_file), str(wave_file), "--workers", "2"]) == EXIT_OK
    assert main(["certify", str(wave_file), str(inflated)]) == EXIT_CERTIFICATION
    assert f"Certification failed: {inflated}" in capsys.readouterr().out


def test_certify_output_needs_one_file(wave_file, tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["certify", str(wave_file), str(wave_file), "--output", str(tmp_path / "c.json")])
    assert info.value.code == EXIT_USAGE
