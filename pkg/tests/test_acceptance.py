"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v`` (the lines are
collected in the terminal summary) or ``python3 tests/test_acceptance.py``.
"""

import filecmp
import io
import itertools
import json
import math
import os
import time

import numpy as np
import pytest

from minimaxdl.bounds import ccrb_matrix, cor1_lower, low_snr_threshold, thm1_lower, thm2_lower, thm3_upper
from minimaxdl.cli import run
from minimaxdl.geometry import rip_constant_exact, rip_constant_monte_carlo
from minimaxdl.infotheory import (
    empirical_error_probability,
    fano_error_lower_bound,
    mi_upper_given_support,
    mi_upper_given_X,
)
from minimaxdl.learners import constant_estimator, make_learner, monte_carlo_mse, threshold_decode
from minimaxdl.model import (
    NoiseModel,
    SparseUniform,
    coefficient_covariance,
    generate_batch,
    random_dictionary,
    snr,
    snr_sandwich,
)
from minimaxdl.packing import build_ensemble, build_packing, verify_ensemble, verify_packing
from minimaxdl.seeding import derived_rng

RESULTS = {}
SEED = 20240501


def report(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def ens3():
    D0 = random_dictionary(6, 10, derived_rng(SEED, 0))
    t0 = time.perf_counter()
    ens = build_ensemble(D0, 1 / 320, 64, derived_rng(SEED, 1))
    return ens, time.perf_counter() - t0


def rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_01_bound_formulas():
    r10 = 2 * math.sqrt(10)
    checks = {
        "thm1": rel(thm1_lower(6, 10, 100, 1.0, 1.0, r10).value, 40 / 320 * 1e-3),
        "cor1": rel(cor1_lower(6, 10, 100, 1.0, r10).value, (2 * 10 / 600) * 4 / 320),
        "thm2": rel(thm2_lower(6, 10, 2, 100, 0.01, 1.0).value, 0.5 / 12960),
        "thm3": rel(thm3_upper(20, 100, 0.05, 2, 0.1, 10.0).value, 16 * 1.09025 + 40 * math.exp(-16000)),
        "ccrb": float(np.max(np.abs(ccrb_matrix(1.0, 2, 1) - 0.25 * np.diag([0.0, 1.0])))) / 0.25,
    }
    # printed roundings of the same values
    printed = [
        rel(thm1_lower(6, 10, 100, 1.0, 1.0, r10).value, 1.25e-4) <= 1e-12,
        rel(cor1_lower(6, 10, 100, 1.0, r10).value, 4.1667e-4) <= 1e-4,
        rel(thm2_lower(6, 10, 2, 100, 0.01, 1.0).value, 3.858e-5) <= 1e-3,
        rel(thm3_upper(20, 100, 0.05, 2, 0.1, 10.0).value, 17.444) <= 1e-12,
    ]
    worst = max(checks.values())
    report(1, worst <= 1e-12 and all(printed), f"max relative error {worst:.2e}")


def test_criterion_02_packing():
    t0 = time.perf_counter()
    code = build_packing(50, 1000, derived_rng(SEED, 1))
    h = verify_packing(code)
    dt = time.perf_counter() - t0
    report(2, code.attempts <= 100 and h >= 5 and dt < 10, f"min Hamming {h} (>= 5) after {code.attempts} attempt(s), {dt:.2f}s")


def test_criterion_03_ensemble(ens3):
    ens, dt = ens3
    M, D0, eps = ens.members, ens.D0, ens.epsilon
    col = float(np.abs(np.linalg.norm(M, axis=1) - 1).max())
    rad = float(np.sum((M - D0) ** 2, axis=(1, 2)).max())
    pair = np.sum((M[:, None] - M[None]) ** 2, axis=(2, 3))[~np.eye(ens.L, dtype=bool)]
    orth = float(np.abs(np.einsum("ij,lij->lj", D0, ens.perturbations)).max())
    ok = (
        ens.L == 64
        and np.abs(np.linalg.norm(D0, axis=0) - 1).max() <= 1e-10
        and col <= 1e-10
        and rad <= ens.epsilon_prime / 2
        and pair.min() >= 8 * eps * (1 - 1e-9)
        and pair.max() <= 320 * eps * (1 + 1e-9)
        and orth <= 1e-10
        and verify_ensemble(ens).passed
        and dt < 30
    )
    report(3, ok, f"col err {col:.1e}, max radius^2 {rad:.4f} <= {ens.epsilon_prime / 2}, "
                  f"pairwise^2 in [{pair.min():.4f}, {pair.max():.4f}] vs [{8 * eps:.4f}, {320 * eps:.4f}], {dt:.2f}s")


def test_criterion_04_mi_given_x(ens3):
    ens, _ = ens3
    Sx = coefficient_covariance(SparseUniform(10, 2))
    b = mi_upper_given_X(ens, Sx, 100, 1.0)
    norm = np.linalg.norm(Sx, 2)
    eta = 320 * 100 * norm * ens.epsilon / 1.0
    tight = 160 * 100 * norm * ens.epsilon / 1.0
    # independent double sum
    tot = sum(np.trace((a - c) @ Sx @ (a - c).T) for a in ens.members for c in ens.members)
    oracle = 100 / 2 * tot / ens.L**2
    ok = b.computed_mi_upper <= tight + 1e-10 and tight <= eta and abs(b.computed_mi_upper - oracle) <= 1e-10 * max(1, oracle)
    report(4, ok, f"I = {b.computed_mi_upper:.6f} <= {tight:.1f} (tight) <= {eta:.1f} nats")


def test_criterion_05_mi_given_support():
    m, p, s, sigma2, eps = 6, 10, 1, 1.0, 1 / 320
    snr_val = 0.9 * low_snr_threshold(m, s)
    sigma_a2 = snr_val * m * sigma2 / s
    D0 = random_dictionary(m, p, derived_rng(SEED, 2))
    ens = build_ensemble(D0, eps, 4, derived_rng(SEED, 3))
    deltas = [rip_constant_exact(D, s).delta for D in (D0, *ens.members)]
    N = 100
    b = mi_upper_given_support(ens, s, sigma_a2, sigma2, N, support_avg="exact", snr=snr_val)
    eta = 12960 * N * snr_val**2 * m**2 * eps / p
    vals = []
    for S in itertools.combinations(range(p), s):
        S = list(S)
        covs = [sigma_a2 * D[:, S] @ D[:, S].T + sigma2 * np.eye(m) for D in ens.members]
        invs = [np.linalg.inv(C) for C in covs]
        vals.append(sum(np.trace((invs[i] - invs[j]) @ (covs[j] - covs[i])) for i in range(4) for j in range(4)) / 16)
    oracle = N * np.mean(vals)
    snr_exact = max(abs(snr(D, SparseUniform(p, s, "gaussian", sigma_a2), NoiseModel(sigma2)) - snr_val) for D in ens.members)
    ok = max(deltas) <= 0.5 and b.computed_mi_upper <= eta and abs(b.computed_mi_upper - oracle) <= 1e-10 and snr_exact <= 1e-12
    report(5, ok, f"delta_1 = {max(deltas):.1e}, I = {b.computed_mi_upper:.3e} <= eta = {eta:.3e}, "
                  f"|I - oracle| = {abs(b.computed_mi_upper - oracle):.1e}")


def test_criterion_06_fano(ens3):
    ens, _ = ens3
    cm, nm = SparseUniform(10, 2), NoiseModel(1.0)
    Sx = coefficient_covariance(cm)
    trials = 2000
    cases = [
        ("constant D0", constant_estimator(ens.D0), 10),
        ("constant D0", constant_estimator(ens.D0), 60),
        ("oracle_ls+detector", make_learner("oracle_ls"), 60),
        ("oracle_ls+detector", make_learner("oracle_ls"), 100),
    ]
    parts, ok = [], True
    for i, (name, est, N) in enumerate(cases):
        floor = fano_error_lower_bound(mi_upper_given_X(ens, Sx, N, 1.0).computed_mi_upper, ens.L)
        pe, se = empirical_error_probability(ens, est, cm, nm, N, trials, derived_rng(SEED, 10 + i).integers(2**63))
        ok &= pe + 3 * se >= floor
        parts.append(f"{name} N={N}: {pe:.3f}+3*{se:.3f} >= {floor:.3f}")
    report(6, bool(ok), "; ".join(parts))


def test_criterion_07_thm3_sandwich():
    p, s, r, sigma = 20, 2, 0.05, 0.1
    D = np.eye(p)
    cm, nm = SparseUniform(p, s), NoiseModel(sigma**2)
    snr_val = snr(D, cm, nm)
    learner = make_learner("algorithm1", s)
    m100, se100 = monte_carlo_mse(learner, D, cm, nm, 100, 200, SEED)
    m400, _ = monte_carlo_mse(learner, D, cm, nm, 400, 200, SEED + 1)
    upper = thm3_upper(p, 100, r, s, sigma, snr_val).value
    lower = cor1_lower(p, p, 100, snr_val, r, rip_ok=rip_constant_exact(D, s).delta <= 0.5).value
    ratio = m400 / m100
    ok = lower <= m100 <= 17.444 and abs(upper - 17.444) <= 1e-9 and 0.125 <= ratio <= 0.5
    report(7, ok, f"{lower:.3e} <= MSE(100) = {m100:.4f} +- {se100:.4f} <= 17.444; MSE(400)/MSE(100) = {ratio:.3f}")


def test_criterion_08_recovery_event():
    p, s, r = 20, 2, 0.1 / math.sqrt(2)
    rng = derived_rng(SEED, 4)
    Delta = rng.standard_normal((p, p))
    D = np.eye(p) + Delta * (r / np.linalg.norm(Delta))
    D /= np.linalg.norm(D, axis=0)
    r_eff = np.linalg.norm(D - np.eye(p))
    b = generate_batch(D, SparseUniform(p, s), NoiseModel(0.0), 10**4, rng)
    noise = 0.2 * rng.standard_normal(b.Y.shape)
    bad = np.abs(noise) >= 0.4
    while bad.any():  # resample until every entry is strictly inside (-0.4, 0.4)
        noise[bad] = 0.2 * rng.standard_normal(int(bad.sum()))
        bad = np.abs(noise) >= 0.4
    mismatches = int(np.count_nonzero(threshold_decode(b.Y + noise) != b.X))
    report(8, r_eff * math.sqrt(s) <= 0.1 and mismatches == 0,
           f"r*sqrt(s) = {r_eff * math.sqrt(s):.4f}, max|n| = {np.abs(noise).max():.6f}, mismatches = {mismatches} / 10^4 samples")


def test_criterion_09_rip():
    W = np.array([[1.0, 0.0, 1 / math.sqrt(2)], [0.0, 1.0, 1 / math.sqrt(2)]])
    err_worked = abs(rip_constant_exact(W, 2).delta - 1 / math.sqrt(2))
    D = random_dictionary(4, 6, derived_rng(SEED, 5))
    exact = rip_constant_exact(D, 2).delta
    mc = rip_constant_monte_carlo(D, 2, 3000, derived_rng(SEED, 6))
    err_mc = abs(mc.delta - exact)
    rng = derived_rng(SEED, 7)
    inside = 0
    for _ in range(100):
        m, p, s = 8, 12, 2
        Dk = random_dictionary(m, p, rng)
        sa2, s2 = float(rng.uniform(0.5, 2)), float(rng.uniform(0.1, 1))
        delta = rip_constant_exact(Dk, s).delta
        lo, hi = snr_sandwich(delta, s, sa2, s2, m)
        v = snr(Dk, SparseUniform(p, s, "gaussian", sa2), NoiseModel(s2))
        inside += lo <= v <= hi
    report(9, err_worked <= 1e-12 and err_mc <= 1e-12 and inside == 100,
           f"|delta - 1/sqrt(2)| = {err_worked:.1e}, |MC - exact| = {err_mc:.1e}, sandwich holds {inside}/100")


def _cli_outputs(root, tag):
    d = os.path.join(root, tag)
    os.makedirs(d)
    cfg = {
        "packing.json": {"d": 50, "P": 1000},
        "ensemble.json": {"m": 6, "p": 10, "epsilon": 1 / 320, "L": 64, "D0": "random"},
        "fano.json": {"m": 6, "p": 10, "s": 2, "epsilon": 1 / 320, "L": 64, "N": 60, "sigma2": 1.0, "trials": 2000,
                      "estimator": "oracle_ls"},
        "mse.json": {"m": 20, "p": 20, "s": 2, "sigma": 0.1, "r": 0.05, "N": [100, 400], "learners": ["algorithm1"],
                     "trials": 200},
    }
    for name, obj in cfg.items():
        with open(os.path.join(root, name), "w") as fh:
            json.dump(obj, fh)
    seed = ["--seed", str(SEED)]
    sink = io.StringIO()
    codes = [
        run(["packing", "build", "--config", os.path.join(root, "packing.json"), "--out", os.path.join(d, "packing")] + seed, stdout=sink),
        run(["ensemble", "build", "--config", os.path.join(root, "ensemble.json"), "--out", os.path.join(d, "ensemble")] + seed, stdout=sink),
        run(["simulate", "fano", "--config", os.path.join(root, "fano.json"), "--out", os.path.join(d, "fano.json")] + seed, stdout=sink),
        run(["simulate", "mse", "--config", os.path.join(root, "mse.json"), "--out", os.path.join(d, "mse.csv"), "--threads", "4"] + seed, stdout=sink),
    ]
    return d, codes


def _tree_equal(a, b):
    cmp = filecmp.dircmp(a, b)
    if cmp.left_only or cmp.right_only or cmp.funny_files:
        return False, 0
    files = 0
    for name in cmp.common_files:
        files += 1
        if not filecmp.cmp(os.path.join(a, name), os.path.join(b, name), shallow=False):
            return False, files
    for sub in cmp.common_dirs:
        ok, n = _tree_equal(os.path.join(a, sub), os.path.join(b, sub))
        files += n
        if not ok:
            return False, files
    return True, files


def test_criterion_10_determinism(tmp_path):
    a, ca = _cli_outputs(str(tmp_path), "run_a")
    b, cb = _cli_outputs(str(tmp_path), "run_b")
    same, nfiles = _tree_equal(a, b)
    report(10, ca == cb == [0, 0, 0, 0] and same, f"{nfiles} result files byte-identical across two runs (exit codes {ca})")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
