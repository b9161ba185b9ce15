"""End-to-end checks of the command line, driven through subprocesses."""

import json
import subprocess
import sys

import pytest

CMD = [sys.executable, "-m", "sparse_actions"]


def run_cli(*argv, cwd=None):
    return subprocess.run(
        CMD + [str(a) for a in argv],
        capture_output=True, text=True, cwd=cwd,
    )


def test_gen_fit_diagnose_pipeline(tmp_path):
    data = tmp_path / "d.json"
    model = tmp_path / "w.json"

    gen = run_cli("gen", "--m", 6, "--d", 2, "--k", 2, "--t", 48,
                  "--policy", "round-robin", "--seed", 11, "--out", data)
    assert gen.returncode == 0, gen.stderr
    assert gen.stdout.startswith("seed=11\n")
    assert "dataset: t=48 m=6" in gen.stdout
    doc = json.loads(data.read_text())
    assert "instance" in doc and len(doc["samples"]) == 48

    fit = run_cli("fit", "--data", data, "--k", 2, "--out", model)
    assert fit.returncode == 0, fit.stderr
    assert fit.stdout.startswith("support=[")
    fitted = json.loads(model.read_text())
    assert set(fitted) == {"support", "w_hat", "residual_norms", "iterations"}
    assert len(fitted["support"]) == 2

    diag = run_cli("diagnose", "--data", data)
    assert diag.returncode == 0, diag.stderr
    assert "mu=0 " in diag.stdout  # canonical logs have disjoint blocks
    assert "event_noise=True" in diag.stdout  # noiseless


def test_gen_is_byte_identical_for_equal_seeds(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run_cli("gen", "--m", 5, "--d", 2, "--k", 1, "--t", 30, "--seed", 4, "--out", a)
    run_cli("gen", "--m", 5, "--d", 2, "--k", 1, "--t", 30, "--seed", 4, "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_gen_draws_and_reports_seed_when_omitted(tmp_path):
    res = run_cli("gen", "--m", 4, "--d", 1, "--k", 1, "--t", 8,
                  "--out", tmp_path / "d.json")
    assert res.returncode == 0
    first = res.stdout.splitlines()[0]
    assert first.startswith("seed=")
    int(first.removeprefix("seed="))


def test_fit_on_handwritten_dataset(tmp_path):
    doc = {
        "m": 3,
        "d": 1,
        "samples": [
            {"z": [1.0], "a": 0, "r": 2.0},
            {"z": [1.0], "a": 0, "r": 2.0},
            {"z": [1.0], "a": 1, "r": 0.0},
            {"z": [1.0], "a": 2, "r": 0.0},
        ],
    }
    data = tmp_path / "d.json"
    data.write_text(json.dumps(doc))
    res = run_cli("fit", "--data", data, "--k", 1, "--out", tmp_path / "w.json")
    assert res.returncode == 0, res.stderr
    assert res.stdout.startswith("support=[0] residual_norm=")
    assert float(res.stdout.split("residual_norm=")[1]) <= 1e-12


def test_diagnose_requires_embedded_truth(tmp_path):
    data = tmp_path / "d.json"
    data.write_text(json.dumps({"m": 2, "d": 1, "samples": [{"z": [1.0], "a": 0, "r": 1.0}]}))
    res = run_cli("diagnose", "--data", data)
    assert res.returncode == 1
    assert res.stderr.startswith("error:")
    assert "embedded instance" in res.stderr


def test_bad_arguments_exit_one(tmp_path):
    res = run_cli("gen", "--m", 3, "--d", 1, "--k", 5, "--t", 10,
                  "--out", tmp_path / "d.json")
    assert res.returncode == 1
    assert res.stderr.startswith("error:")


def test_missing_file_exits_two(tmp_path):
    res = run_cli("fit", "--data", tmp_path / "nope.json", "--k", 1,
                  "--out", tmp_path / "w.json")
    assert res.returncode == 2
    assert res.stderr.startswith("i/o error:")


def test_unknown_flag_exits_two():
    res = run_cli("fit", "--frobnicate")
    assert res.returncode == 2


def test_sweep_from_config(tmp_path):
    cfg = {"m": [5], "d": [2], "k": [1], "t": [25],
           "noise_sigma": [0.0], "b": [1.0], "trials": 2, "seed": 7}
    cfg_path = tmp_path / "grid.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "rows.csv"
    res = run_cli("sweep", "--config", cfg_path, "--out", out)
    assert res.returncode == 0, res.stderr
    assert res.stdout.startswith("seed=7\n")
    lines = out.read_text().splitlines()
    assert lines[0] == ("m,d,k,t,noise_sigma,b,trials,recovery_rate,"
                       "mean_hamming,mean_param_err,mean_gap,ci_halfwidth,seed")
    assert len(lines) == 2


def test_sweep_seed_override(tmp_path):
    cfg = {"m": [5], "d": [2], "k": [1], "t": [25],
           "noise_sigma": [0.0], "b": [1.0], "trials": 2, "seed": 7}
    cfg_path = tmp_path / "grid.json"
    cfg_path.write_text(json.dumps(cfg))
    res = run_cli("sweep", "--config", cfg_path, "--seed", 123,
                  "--out", tmp_path / "rows.json")
    assert res.returncode == 0
    assert res.stdout.startswith("seed=123\n")
    doc = json.loads((tmp_path / "rows.json").read_text())
    assert len(doc) == 1 and doc[0]["seed"] != 7


def test_oracle_check_passes_on_clean_instances():
    res = run_cli("oracle-check", "--trials", 40, "--seed", 5)
    assert res.returncode == 0, res.stderr
    assert res.stdout.splitlines()[-1].startswith("agree=40/40")


def test_oracle_check_validates_budget():
    res = run_cli("oracle-check", "--m", 8, "--d", 2, "--t", 10, "--seed", 5)
    assert res.returncode == 1
    assert "round-robin" in res.stderr


def test_lowerbound_best_arm(tmp_path):
    out = tmp_path / "ba.csv"
    res = run_cli("lowerbound", "best-arm", "--m", 4, "--delta", 0.5,
                  "--t", 40, "--trials", 400, "--seed", 2, "--out", out)
    assert res.returncode == 0, res.stderr
    assert "error_prob=" in res.stdout
    header = out.read_text().splitlines()[0]
    assert header.split(",")[:3] == ["m", "delta", "j_star"]


def test_lowerbound_coverage():
    res = run_cli("lowerbound", "coverage", "--n", 20, "--b", 0.3,
                  "--trials", 400, "--seed", 2)
    assert res.returncode == 0, res.stderr
    assert "error_sum=" in res.stdout and "floor=" in res.stdout


def test_lowerbound_fano(tmp_path):
    out = tmp_path / "fano.csv"
    res = run_cli("lowerbound", "fano", "--m", 60, "--k", 4, "--b", 0.05,
                  "--t", 100, "--seed", 3, "--out", out)
    assert res.returncode == 0, res.stderr
    assert "packing_size=" in res.stdout
    assert "error_floor=" in res.stdout
    assert out.read_text().count("\n") == 2  # header + one row
