import json

import numpy as np
import pytest

from cdlmg.cli import main


def run_cli(args):
    return main([str(a) for a in args])


def test_evolve_two_particle_exact(tmp_path, capsys):
    out = tmp_path / "run"
    code = run_cli(["evolve", "--n", 2, "--protocol", "exact_cd",
                    "--ramp", "linear:0.75,0.5", "--steps", 800, "--out", out])
    assert code == 0
    printed = capsys.readouterr().out
    assert "exact_cd" in printed
    data = np.loadtxt(out / "trajectory_exact_cd.csv", delimiter=",", skiprows=1)
    assert data[:, 2].min() >= 0.9999
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["n"] == 2
    assert manifest["config"]["ramp"] == "linear:0.75,0.5"
    assert "version" in manifest and "wall_time_s" in manifest
    assert manifest["final_fidelity"]["exact_cd"] >= 0.9999


def test_evolve_figure_preset(tmp_path):
    out = tmp_path / "preset"
    code = run_cli(["evolve", "--figure", "fig1a", "--steps", 600, "--out", out])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    finals = manifest["final_fidelity"]
    assert set(finals) == {"exact_cd", "truncated(1)", "hp", "bare"}
    assert min(finals.values()) == finals["bare"]
    assert len(manifest["files"]) == 4


def test_evolve_multiple_protocols(tmp_path):
    out = tmp_path / "multi"
    code = run_cli(["evolve", "--n", 12, "--protocol", "bare",
                    "--protocol", "truncated:1", "--ramp", "linear:0.75,0.5",
                    "--steps", 300, "--out", out])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    finals = manifest["final_fidelity"]
    assert finals["truncated(1)"] > finals["bare"]
    assert sorted(manifest["files"]) == ["trajectory_bare.csv",
                                         "trajectory_truncated_1.csv"]


def test_evolve_validation_failures(tmp_path, capsys):
    assert run_cli(["evolve", "--n", 0, "--protocol", "bare",
                    "--ramp", "linear:0.75,0.5", "--out", tmp_path]) == 1
    assert "error" in capsys.readouterr().err
    assert run_cli(["evolve", "--n", 4, "--ramp", "linear:0.75,0.5",
                    "--out", tmp_path]) == 1  # no protocol
    assert run_cli(["evolve", "--n", 4, "--protocol", "bare",
                    "--out", tmp_path]) == 1  # no ramp
    assert run_cli(["evolve", "--n", 4, "--protocol", "warp",
                    "--ramp", "linear:0.75,0.5", "--out", tmp_path]) == 1


def test_spectrum_gap_table(tmp_path):
    out = tmp_path / "spec"
    code = run_cli(["spectrum", "--n", 30, "--h-min", 0.5, "--h-max", 1.5,
                    "--h-points", 51, "--out", out])
    assert code == 0
    lines = (out / "gaps.csv").read_text().splitlines()
    assert lines[0] == "h,gap01,gap23,gap45"
    assert len(lines) == 52


def test_spectrum_validation(tmp_path):
    assert run_cli(["spectrum", "--n", 30, "--out", tmp_path]) == 1
    assert run_cli(["spectrum", "--n", 30, "--h-min", 1.5, "--h-max", 0.5,
                    "--out", tmp_path]) == 1
    assert run_cli(["spectrum", "--n", 30, "--h-min", 0.5, "--h-max", 1.5,
                    "--h-points", 1, "--out", tmp_path]) == 1


def test_optimize_and_determinism(tmp_path):
    args = ["optimize", "--n", 10, "--bands", 1, "--ramp", "linear:0.75,0.5",
            "--segments", 10, "--steps", 400, "--seed", 3]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run_cli(args + ["--out", out1]) == 0
    assert run_cli(args + ["--out", out2]) == 0
    first = (out1 / "schedule_ansatz_k1.csv").read_bytes()
    second = (out2 / "schedule_ansatz_k1.csv").read_bytes()
    assert first == second
    traj1 = (out1 / "trajectory_ansatz_k1.csv").read_bytes()
    traj2 = (out2 / "trajectory_ansatz_k1.csv").read_bytes()
    assert traj1 == traj2
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["results"]["ansatz(k=1)"]["min_fidelity"] > 0.99
    schedule_json = json.loads((out1 / "schedule_ansatz_k1.json").read_text())
    assert set(schedule_json) == {"boundaries", "values"}


def test_optimize_validation(tmp_path):
    assert run_cli(["optimize", "--n", 10, "--bands", 0,
                    "--ramp", "linear:0.75,0.5", "--out", tmp_path]) == 1


def test_fit_command(tmp_path):
    out = tmp_path / "fit"
    code = run_cli(["fit", "--n", 10, "--harmonics", 3,
                    "--ramp", "linear:0.75,0.5", "--segments", 12,
                    "--steps", 600, "--out", out])
    assert code == 0
    report = json.loads((out / "fit_report.json").read_text())
    assert report["max_fidelity_discrepancy"] <= 0.01
    fit = json.loads((out / "harmonic_fit.json").read_text())
    assert len(fit["a"]) == 3
    assert run_cli(["fit", "--n", 10, "--harmonics", 5,
                    "--ramp", "linear:0.75,0.5", "--out", tmp_path]) == 1


def test_decompose_command(tmp_path):
    out = tmp_path / "dec"
    code = run_cli(["decompose", "--n", 6, "--ramp", "linear:0.75,0.5",
                    "--t", 0.3, "--bands", 2, "--out", out])
    assert code == 0
    payload = json.loads((out / "decomposition.json").read_text())
    assert payload["h"] == pytest.approx(0.9)
    assert set(payload["bands"]) == {"1", "2"}
    for band in payload["bands"].values():
        assert band["residual"] < 1e-10
        assert all({"label", "coefficient"} == set(t) for t in band["terms"])
    beta = np.array(payload["first_band_beta"])
    assert beta.shape == (5, 5)
