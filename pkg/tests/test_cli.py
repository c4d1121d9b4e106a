import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from minimaxdl import __version__
from minimaxdl.cli import MSE_COLUMNS, run

R10 = 2 * math.sqrt(10)


def call(argv, env_threads=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_bounds_eval_thm1(tmp_path):
    cfg = write(tmp_path, "thm1.json", {"bound": "thm1", "m": 6, "p": 10, "N": 100, "sigma2": 1, "sigma_x_norm": 1, "r": R10})
    code, out, _ = call(["bounds", "eval", "--config", cfg])
    assert code == 0
    rep = json.loads(out)
    assert rep["value"] == pytest.approx(1.25e-4, rel=1e-12) and rep["active_branch"] == "second"


def test_bounds_eval_csv_and_ccrb(tmp_path):
    cfg = write(tmp_path, "c.json", {"bound": "ccrb", "m": 2, "snr": 1, "N": 1})
    code, out, _ = call(["bounds", "eval", "--config", cfg])
    assert code == 0
    assert json.loads(out)["matrix"] == [[0.0, 0.0], [0.0, 0.25]]
    cfg = write(tmp_path, "t.json", {"bound": "thm3_upper", "p": 20, "N": 100, "r": 0.05, "s": 2, "sigma": 0.1, "snr": 10})
    code, out, _ = call(["bounds", "eval", "--config", cfg, "--csv"])
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["value"]) == pytest.approx(17.444, rel=1e-12)


def test_missing_field_names_it(tmp_path):
    cfg = write(tmp_path, "bad.json", {"bound": "cor1", "m": 6, "p": 10, "N": 100, "r": 1.0, "rip_ok": True})
    code, _, err = call(["bounds", "eval", "--config", cfg])
    assert code == 2 and "'snr'" in err


def test_violated_precondition_is_config_error(tmp_path):
    cfg = write(tmp_path, "bad.json", {"bound": "thm2", "m": 6, "p": 10, "s": 2, "N": 100, "snr": 0.02, "r": 1, "rip_ok": True})
    code, _, err = call(["bounds", "eval", "--config", cfg])
    assert code == 2 and "SNR" in err


def test_usage_errors():
    assert call(["frobnicate"])[0] == 2
    assert call(["bounds", "integrate"])[0] == 2
    assert call(["bounds", "eval"])[0] == 2  # no --config
    assert call(["bounds", "eval", "--config", "/nonexistent.json"])[0] == 2


def test_sample_size(tmp_path):
    cfg = write(tmp_path, "s.json", {"bound": "cor1", "m": 6, "p": 10, "snr": 1, "r": R10, "rip_ok": True, "target_eps": 4.1667e-4})
    code, out, _ = call(["bounds", "sample-size", "--config", cfg])
    assert code == 0 and json.loads(out)["N"] == 100


def test_packing_build(tmp_path):
    cfg = write(tmp_path, "p.json", {"d": 50, "P": 200})
    code, out, _ = call(["packing", "build", "--config", cfg, "--out", str(tmp_path / "pk"), "--seed", "4"])
    assert code == 0
    meta = json.loads(out)
    B = np.loadtxt(tmp_path / "pk" / "code.csv", delimiter=",")
    assert B.shape == (200, 50) and meta["min_hamming"] >= 5
    cfg = write(tmp_path, "q.json", {"d": 50, "P": 10**9})
    assert call(["packing", "build", "--config", cfg])[0] == 2


def test_ensemble_build_and_verify(tmp_path):
    cfg = write(tmp_path, "e.json", {"m": 6, "p": 10, "epsilon": 1 / 320, "L": 16, "D0": "random"})
    d = str(tmp_path / "ens")
    code, out, _ = call(["ensemble", "build", "--config", cfg, "--out", d, "--seed", "5"])
    assert code == 0 and json.loads(out)["pass"] is True
    code, out, _ = call(["ensemble", "verify", "--dir", d])
    assert code == 0
    cert = json.loads(out)
    assert cert["pass"] is True and cert["min_pairwise_sq"] >= 8 / 320 * (1 - 1e-9)
    # corrupt one member on disk
    member = tmp_path / "ens" / "member_0003.csv"
    M = np.loadtxt(member, delimiter=",")
    M[:, 0] *= 1.01
    np.savetxt(member, M, delimiter=",", fmt="%.17g")
    code, out, _ = call(["ensemble", "verify", "--dir", d])
    assert code == 1 and json.loads(out)["pass"] is False


def test_rip_estimate(tmp_path):
    dpath = tmp_path / "d.csv"
    dpath.write_text("1,0,0.70710678118654752\n0,1,0.70710678118654752\n")
    cfg = write(tmp_path, "r.json", {"m": 2, "p": 3, "s": 2, "dictionary": str(dpath)})
    code, out, _ = call(["rip", "estimate", "--config", cfg])
    assert code == 0 and abs(json.loads(out)["delta"] - 1 / math.sqrt(2)) <= 1e-12
    cfg = write(tmp_path, "r2.json", {"m": 5, "p": 12, "s": 3, "method": "monte_carlo", "trials": 50})
    code, out, _ = call(["rip", "estimate", "--config", cfg])
    assert code == 0 and json.loads(out)["method"] == "monte_carlo"


MSE_CFG = {"m": 20, "p": 20, "s": 2, "sigma": 0.1, "r": 0.05, "N": [100, 400], "learners": ["algorithm1"], "trials": 20}


def test_simulate_mse_rows_schema_and_sandwich(tmp_path):
    cfg = write(tmp_path, "m.json", MSE_CFG)
    out = tmp_path / "sweep.csv"
    code, _, _ = call(["simulate", "mse", "--config", cfg, "--out", str(out), "--seed", "3", "--gnuplot"])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 2
    assert list(rows[0]) == MSE_COLUMNS
    assert (tmp_path / "sweep.gp").exists()
    for row in rows:
        assert row["master_seed"] == "3" and row["version"] == __version__ and row["error"] == ""
        assert float(row["cor1_lower"]) <= float(row["mse_mean"]) <= float(row["thm3_upper"])
        assert row["thm2_lower"] == ""


def test_simulate_mse_deterministic_across_threads(tmp_path, monkeypatch):
    cfg = write(tmp_path, "m.json", dict(MSE_CFG, learners=["algorithm1", "oracle_ls"]))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert call(["simulate", "mse", "--config", cfg, "--out", str(a)])[0] == 0
    monkeypatch.setenv("MINIMAXDL_THREADS", "3")
    assert call(["simulate", "mse", "--config", cfg, "--out", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 5


def test_simulate_mse_validation(tmp_path):
    bad = dict(MSE_CFG, m=10, dictionary="random")
    assert call(["simulate", "mse", "--config", write(tmp_path, "a.json", bad)])[0] == 2
    bad = dict(MSE_CFG, learners=["oracle_ls"], N=[10])
    code, _, err = call(["simulate", "mse", "--config", write(tmp_path, "b.json", bad)])
    assert code == 2 and "N >= p" in err
    bad = dict(MSE_CFG, sigma2=0.01)
    assert call(["simulate", "mse", "--config", write(tmp_path, "c.json", bad)])[0] == 2
    bad = {k: v for k, v in MSE_CFG.items() if k != "trials"}
    code, _, err = call(["simulate", "mse", "--config", write(tmp_path, "d.json", bad)])
    assert code == 2 and "'trials'" in err


def test_simulate_mse_help_documents_schema():
    proc = subprocess.run([sys.executable, "-m", "minimaxdl", "simulate", "mse", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert ", ".join(MSE_COLUMNS) in " ".join(proc.stdout.split())


def test_simulate_fano(tmp_path):
    cfg = write(tmp_path, "f.json", {"m": 6, "p": 10, "s": 2, "epsilon": 1 / 320, "L": 16, "N": 10, "sigma2": 1.0, "trials": 100})
    code, out, _ = call(["simulate", "fano", "--config", cfg, "--seed", "1"])
    assert code == 0
    res = json.loads(out)
    assert set(res) >= {"L", "eta", "mi_upper", "fano_floor", "p_e_hat", "stderr", "params"}
    assert res["p_e_hat"] + 3 * res["stderr"] >= res["fano_floor"]
