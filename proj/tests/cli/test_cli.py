import csv
import json
import os
import pathlib
import subprocess

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
CLI = os.environ.get("FRACFLOOD_CLI", str(ROOT / "build" / "tools" / "fracflood"))
MINIMAL = ROOT / "decks" / "minimal.deck"
TRUTH = ROOT / "configs" / "twin_truth.json"


def run(*args, check_code=0):
    p = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
    assert p.returncode == check_code, p.stderr
    return p


def test_help_exits_zero():
    out = run("--help").stdout
    for sub in ("simulate", "welltest", "gen-obs", "match", "sweep"):
        assert sub in out


def test_simulate_outputs(tmp_path):
    run("simulate", "--deck", MINIMAL, "--out", tmp_path / "a")
    rows = list(csv.reader((tmp_path / "a" / "results.csv").open()))
    assert rows[0][0] == "time_days"
    assert [float(r[0]) for r in rows[1:]] == [0, 5, 10, 15, 20, 25, 30]
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["completed"] is True
    assert "wall_seconds" in json.loads((tmp_path / "a" / "timing.json").read_text())

    run("simulate", "--deck", MINIMAL, "--out", tmp_path / "b")
    for name in ("results.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_input_errors_exit_2(tmp_path):
    p = run("simulate", "--deck", tmp_path / "missing.deck", "--out", tmp_path, check_code=2)
    assert "missing.deck" in p.stderr
    bad = tmp_path / "bad.deck"
    bad.write_text(MINIMAL.read_text().replace("nx = 3", "nx = 3\nbogus = 1"))
    p = run("simulate", "--deck", bad, "--out", tmp_path / "o", check_code=2)
    assert "bogus" in p.stderr
    run("simulate", "--deck", MINIMAL, check_code=2)
    run("welltest", "--omega-f", "1.5", "--out", tmp_path / "w.csv", check_code=2)
    run("welltest", "--terms", "7", "--out", tmp_path / "w.csv", check_code=2)


def test_solver_failure_exit_3(tmp_path):
    deck = tmp_path / "stiff.deck"
    deck.write_text(MINIMAL.read_text() + "max_newton = 1\ndt_min = 0.001\n")
    p = run("simulate", "--deck", deck, "--out", tmp_path / "o", check_code=3)
    assert "stage" in p.stderr
    assert json.loads((tmp_path / "o" / "summary.json").read_text())["completed"] is False


def test_welltest_csv(tmp_path):
    out = tmp_path / "tc.csv"
    run("welltest", "--omega-f", "0.1", "--lambda", "1e-5", "--tmin", "10", "--tmax", "1e9", "--points", "81", "--out", out)
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t_D", "p_wD", "dp_wD_dlntD"]
    data = [[float(x) for x in r] for r in rows[1:]]
    assert len(data) == 81
    assert data[0][0] == pytest.approx(10)
    assert data[-1][0] == pytest.approx(1e9)
    assert min(r[2] for r in data) < 0.5
    assert all(b[1] > a[1] for a, b in zip(data, data[1:]))


def test_gen_obs_match_and_determinism(tmp_path):
    run("gen-obs", "--deck", MINIMAL, "--truth", TRUTH, "--cadence", "2", "--out", tmp_path / "obs")
    for name in ("bhp.csv", "wir.csv", "wct.csv", "extents.csv", "provenance.json"):
        assert (tmp_path / "obs" / name).exists()
    prov = json.loads((tmp_path / "obs" / "provenance.json").read_text())
    assert prov["truth"]["p_b"] == 25.0
    run("gen-obs", "--deck", MINIMAL, "--truth", TRUTH, "--cadence", "2", "--out", tmp_path / "obs2")
    for name in ("bhp.csv", "wir.csv", "wct.csv", "extents.csv"):
        assert (tmp_path / "obs" / name).read_bytes() == (tmp_path / "obs2" / name).read_bytes()

    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"population": 6, "max_evaluations": 18, "seed": 4}))
    run("match", "--deck", MINIMAL, "--obs", tmp_path / "obs", "--config", cfg, "--out", tmp_path / "m1", "--jobs", "1")
    run("match", "--deck", MINIMAL, "--obs", tmp_path / "obs", "--config", cfg, "--out", tmp_path / "m3", "--jobs", "3")
    for name in ("report.json", "trace.csv", "results.csv"):
        assert (tmp_path / "m1" / name).read_bytes() == (tmp_path / "m3" / name).read_bytes()
    report = json.loads((tmp_path / "m1" / "report.json").read_text())
    assert report["evaluations"] == 18
    assert set(report["best"]) >= {"p_b", "k_xy", "psi_xfmax"}

    bad_cfg = tmp_path / "bad.json"
    bad_cfg.write_text(json.dumps({"popsize": 6}))
    run("match", "--deck", MINIMAL, "--obs", tmp_path / "obs", "--config", bad_cfg, "--out", tmp_path / "m", check_code=2)


def test_gen_obs_rejects_out_of_bounds_truth(tmp_path):
    truth = json.loads(TRUTH.read_text())
    truth["k_xy"] = 0.9
    path = tmp_path / "truth.json"
    path.write_text(json.dumps(truth))
    p = run("gen-obs", "--deck", MINIMAL, "--truth", path, "--out", tmp_path / "o", check_code=2)
    assert "k_xy" in p.stderr


def test_sweep(tmp_path):
    out = tmp_path / "sweep.csv"
    run("sweep", "--deck", MINIMAL, "--stage", "soak", "--durations", "1,5,10", "--metric", "cumulative_oil", "--out", out)
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["duration_days", "cumulative_oil", "stage_end_p_coeff"]
    assert [float(r[0]) for r in rows[1:]] == [1, 5, 10]
    run("sweep", "--deck", MINIMAL, "--stage", "nope", "--durations", "1", "--metric", "avg_pressure", "--out", out,
        check_code=2)
    run("sweep", "--deck", MINIMAL, "--stage", "soak", "--durations", "1", "--metric", "nope", "--out", out,
        check_code=2)
