"""End-to-end checks of the papm command-line tool.

The binary path arrives in the PAPM_CLI environment variable (set by ctest).
"""

import json
import os
import re
import subprocess

import pytest

CLI = os.environ.get("PAPM_CLI")

pytestmark = pytest.mark.skipif(not CLI, reason="PAPM_CLI not set")


def run(*args, expect=0):
    proc = subprocess.run([CLI, *args], capture_output=True, text=True)
    assert proc.returncode == expect, proc.stdout + proc.stderr
    return proc


def result_line(stdout):
    lines = [l for l in stdout.strip().splitlines() if l.startswith("RESULT ")]
    assert len(lines) == 1, stdout
    return dict(kv.split("=", 1) for kv in lines[0][len("RESULT "):].split())


def write_points(path, points, width=32, height=32):
    path.write_text(
        json.dumps({"image_width": width, "image_height": height, "points": points})
    )
    return str(path)


def test_gen_papm_defaults_and_mass(tmp_path):
    pts = write_points(tmp_path / "p.json", [[8.5, 8.5], [20.5, 24.5]])
    out = str(tmp_path / "m.papm")
    res = result_line(run("gen-papm", "--points", pts, "--out", out).stdout)
    assert res["rows"] == "32" and res["cols"] == "32"
    assert abs(float(res["total_mass"]) - 2.0) < 1e-9
    header = open(out).readline()
    assert header == "PAPM 1 32 32\n"


def test_ot_loss_on_generated_map(tmp_path):
    pts = write_points(tmp_path / "p.json", [[8.5, 8.5], [20.5, 24.5]])
    mp = str(tmp_path / "m.papm")
    run("gen-papm", "--points", pts, "--out", mp)
    res = result_line(
        run("ot-loss", "--points", pts, "--pred", mp, "--lambda", "0.1").stdout
    )
    assert float(res["total"]) >= 0.0
    assert res["converged"] == "1"
    assert abs(
        float(res["total"])
        - (0.1 * float(res["ot"]) + float(res["sim"]))
    ) < 1e-9


def test_ot_loss_zero_mass_degenerate(tmp_path):
    pts = write_points(tmp_path / "p.json", [[2.5, 2.5]], width=4, height=4)
    mp = tmp_path / "z.papm"
    mp.write_text("PAPM 1 4 4\n" + "\n".join(["0 0 0 0"] * 4) + "\n")
    proc = run("ot-loss", "--points", pts, "--pred", str(mp))
    res = result_line(proc.stdout)
    assert res["ot"] == "0" and res["degenerate"] == "1"
    assert "degenerate" in proc.stdout


def test_unknown_flag_is_usage_error(tmp_path):
    pts = write_points(tmp_path / "p.json", [[2.5, 2.5]], width=8, height=8)
    proc = subprocess.run(
        [CLI, "gen-papm", "--points", pts, "--out", str(tmp_path / "m.papm"), "--bogus-flag"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    assert "--bogus-flag" in proc.stderr


def test_bad_data_is_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    proc = subprocess.run(
        [CLI, "gen-papm", "--points", str(bad), "--out", str(tmp_path / "m.papm")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2


def test_perturb_requires_seed_and_is_deterministic(tmp_path):
    pts = write_points(tmp_path / "p.json", [[16.0, 16.0]])
    missing = subprocess.run(
        [CLI, "perturb", "--points", pts, "--radius", "4", "--out", str(tmp_path / "o.json")],
        capture_output=True,
        text=True,
    )
    assert missing.returncode == 1
    assert "--seed" in missing.stderr

    out1, out2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    run("perturb", "--points", pts, "--radius", "4", "--seed", "7", "--out", out1)
    run("perturb", "--points", pts, "--radius", "4", "--seed", "7", "--out", out2)
    assert open(out1).read() == open(out2).read()
    moved = json.load(open(out1))["points"][0]
    assert abs(((moved[0] - 16.0) ** 2 + (moved[1] - 16.0) ** 2) ** 0.5 - 4.0) < 1e-9


def test_oracle_ot_small_instance(tmp_path):
    pts = write_points(tmp_path / "p.json", [[1.5, 0.5]], width=3, height=1)
    mp = tmp_path / "m.papm"
    mp.write_text("PAPM 1 1 3\n0.25 0.5 0.25\n")
    res = result_line(run("oracle-ot", "--points", pts, "--pred", str(mp)).stdout)
    # forced coupling: sum target_j * c(d_j) with distances (1, 0, 1) under
    # the default ggd-l2 cost at sigma=16, s=2
    import math

    want = 0.5 * math.exp(1.0 / 512.0)
    assert abs(float(res["value"]) - want) < 1e-9


def test_eval_and_localize(tmp_path):
    gt_dir = tmp_path / "gt"
    pred_dir = tmp_path / "pred"
    gt_dir.mkdir()
    pred_dir.mkdir()
    pts = write_points(gt_dir / "img0.json", [[8.2, 9.7], [24.5, 16.5]])
    run("gen-papm", "--points", pts, "--out", str(pred_dir / "img0.papm"))
    res = result_line(
        run(
            "eval", "--pred-dir", str(pred_dir), "--gt-dir", str(gt_dir),
            "--game", "1", "--localize", "--radius", "4",
        ).stdout
    )
    assert res["images"] == "1"
    assert float(res["mae"]) < 1e-6
    assert float(res["precision"]) == 1.0
    assert float(res["recall"]) == 1.0


def test_fit_and_sweep_small(tmp_path):
    pts = write_points(tmp_path / "p.json", [[8.0, 8.0]], width=16, height=16)
    trace = str(tmp_path / "trace.csv")
    res = result_line(
        run(
            "fit", "--points", pts, "--grid", "16x16", "--loss", "al-papm",
            "--steps", "60", "--max-iters", "100", "--out", str(tmp_path / "f.papm"),
            "--trace", trace,
        ).stdout
    )
    assert res["diverged"] == "0"
    assert open(trace).readline() == "step,loss\n"

    out = str(tmp_path / "sweep.csv")
    res = result_line(
        run(
            "sweep", "--points", pts, "--radii", "0,4", "--seeds", "1..2",
            "--steps", "40", "--max-iters", "80", "--game", "2", "--out", out,
        ).stdout
    )
    assert res["rows"] == "2"
    assert res["failures"] == "0"
    header = open(out).readline()
    assert header == "magnitude,mae,mse,failures\n"


def test_config_file_merges_beneath_flags(tmp_path):
    pts = write_points(tmp_path / "p.json", [[8.5, 8.5]], width=16, height=16)
    cfg = tmp_path / "papm.ini"
    cfg.write_text("[gen-papm]\nsigma=2\nshape=8\n")
    out = str(tmp_path / "m.papm")
    res = result_line(
        run("--config", str(cfg), "gen-papm", "--points", pts, "--out", out).stdout
    )
    assert abs(float(res["total_mass"]) - 1.0) < 1e-9


def test_result_line_ends_output(tmp_path):
    pts = write_points(tmp_path / "p.json", [[8.5, 8.5]], width=16, height=16)
    proc = run("gen-papm", "--points", pts, "--out", str(tmp_path / "m.papm"))
    assert proc.stdout.strip().splitlines()[-1].startswith("RESULT ")
    assert re.match(r"^RESULT( \S+=\S+)+$", proc.stdout.strip().splitlines()[-1])
