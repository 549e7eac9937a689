import csv
import json
import os
import subprocess

import pytest

BIN = os.environ.get("BSQSPEC_BIN", "bsqspec")


def run(*args, cwd=None):
    return subprocess.run([BIN, *map(str, args)], capture_output=True, text=True, cwd=cwd)


def write(path, doc):
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture
def small(tmp_path):
    return write(tmp_path / "u.json", {"p": {"cos": [0.003], "sin": [0.0, 0.001]},
                                       "q": {"cos": [0.01], "sin": [-0.008]}})


@pytest.fixture
def zero(tmp_path):
    return write(tmp_path / "zero.json", {})


def test_spectrum_of_zero(tmp_path, zero):
    r = run("spectrum", zero, "--n-max", 2, "--out", tmp_path / "s")
    assert r.returncode == 0, r.stderr
    doc = json.loads((tmp_path / "s.json").read_text())
    assert [d["n"] for d in doc["data"]] == [1, -1, 2, -2]
    for d in doc["data"]:
        assert abs(d["g_c"]) < 1e-8 and abs(d["g_s"]) < 1e-8
    centre = (2 * 3.141592653589793 / 3 ** 0.5) ** 3
    row = next(s for s in doc["spectrum"] if s["n"] == -1)
    assert row["r_minus"] == pytest.approx(-centre, rel=1e-10)
    assert row["mu"] == pytest.approx(-centre, rel=1e-10)
    with open(tmp_path / "s_rho.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["lambda", "rho", "rho_over_scale"]
    assert len(rows) == 1002
    assert "e" in rows[1][0] and len(rows[1][0].split("e")[0].replace("-", "").replace(".", "")) == 17


def test_spectrum_then_invert_round_trip(tmp_path, small):
    r = run("spectrum", small, "--n-max", 2, "--out", tmp_path / "s")
    assert r.returncode == 0, r.stderr
    r = run("invert", tmp_path / "s.json", "--out", tmp_path / "inv")
    assert r.returncode == 0, r.stderr
    got = json.loads((tmp_path / "inv.json").read_text())
    assert got["converged"]
    want = json.loads(small.read_text())
    c = got["coefficients"]
    assert c["p"]["cos"][0] == pytest.approx(want["p"]["cos"][0], abs=1e-6)
    assert c["p"]["sin"][1] == pytest.approx(want["p"]["sin"][1], abs=1e-6)
    assert c["q"]["sin"][0] == pytest.approx(want["q"]["sin"][0], abs=1e-6)
    assert got["residual_history"][-1] <= 1e-8


def test_malformed_json_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"p": {"cos": [0.1,]}}')
    r = run("spectrum", bad)
    assert r.returncode == 2
    first = r.stderr.splitlines()[0]
    assert first.startswith("ERROR InputError cli: ")
    assert "bad.json:1:" in first


def test_constant_term_rejected(tmp_path):
    r = run("verify", write(tmp_path / "c.json", {"const": 1.0}))
    assert r.returncode == 2
    assert r.stderr.startswith("ERROR InputError periodic_fn:")


def test_bad_flag_and_bad_config(tmp_path, zero):
    assert run("spectrum", zero, "--n-max", "x").returncode == 2
    assert run("spectrum", zero, "--n-max", 0).returncode == 2
    cfg = write(tmp_path / "cfg.json", {"n_max": 1, "bogus": 3})
    r = run("spectrum", zero, "--config", cfg)
    assert r.returncode == 2 and "bogus" in r.stderr


def test_verify_zero_passes(tmp_path, zero):
    cfg = write(tmp_path / "cfg.json", {"n_max": 1, "hill_n_max": 1})
    r = run("verify", zero, "--config", cfg, "--out", tmp_path / "v")
    assert r.returncode == 0, r.stderr
    assert all(line.startswith("PASS") for line in r.stdout.splitlines())
    assert json.loads((tmp_path / "v.json").read_text())["all_passed"]


def test_verify_far_outside_ball_fails_with_4(tmp_path):
    big = write(tmp_path / "big.json", {"p": {"cos": [0.0, 0.0, 0.4]}, "q": {"sin": [3.0, 0.0, 2.0]}})
    r = run("verify", big, "--n-max", 1)
    assert r.returncode != 0
    lines = r.stderr.splitlines()
    assert lines[0].startswith("ERROR ")
    assert any("ball_norm" in line for line in lines[1:])


def test_invert_no_convergence_exits_5(tmp_path, small):
    run("spectrum", small, "--n-max", 1, "--out", tmp_path / "s")
    r = run("invert", tmp_path / "s.json", "--max-iter", 1, "--tol", 1e-15, "--out", tmp_path / "inv")
    assert r.returncode == 5
    assert r.stderr.startswith("ERROR NoConvergence spectral_map:")
    doc = json.loads((tmp_path / "inv.json").read_text())
    assert not doc["converged"] and len(doc["residual_history"]) >= 1


def test_flow_outputs(tmp_path):
    u = write(tmp_path / "u.json", {"p": {"cos": [0.05]}, "q": {"sin": [0.05]}})
    cfg = write(tmp_path / "flow.json", {"dt": 1e-4, "t_end": 0.02, "modes": 32, "snapshots": [0.01], "n_list": [1, -1]})
    r = run("flow", u, "--config", cfg, "--out", tmp_path / "f")
    assert r.returncode == 0, r.stderr
    drift = json.loads((tmp_path / "f_drift.json").read_text())
    assert drift["times"] == [0.0, 0.01, 0.02]
    assert drift["max_relative_drift"] <= 1e-5
    with open(tmp_path / "f_trajectory.csv") as f:
        rows = list(csv.reader(f))
    assert len(rows) == 4 and len(rows[0]) == 1 + 4 * 32


def test_flow_blowup_exits_6(tmp_path):
    u = write(tmp_path / "u.json", {"p": {"cos": [0.05]}})
    cfg = write(tmp_path / "flow.json", {"dt": 1e-4, "t_end": 0.01, "modes": 16, "n_list": [1],
                                         "blowup_threshold": 0.01})
    r = run("flow", u, "--config", cfg, "--out", tmp_path / "f")
    assert r.returncode == 6, r.stderr
    assert r.stderr.startswith("ERROR BlowUp boussinesq_flow:") and "t = " in r.stderr


def test_determinism(tmp_path, small):
    outs = []
    for k in range(2):
        assert run("spectrum", small, "--n-max", 1, "--threads", 2, "--out", tmp_path / f"d{k}").returncode == 0
        outs.append((tmp_path / f"d{k}.json").read_bytes() + (tmp_path / f"d{k}_rho.csv").read_bytes())
    assert outs[0] == outs[1]
