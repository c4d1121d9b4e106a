import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minimaxdl import kernels
from minimaxdl._kernels_py import colex_combinations

BACKENDS = sorted(kernels.available_backends())


def brute_hamming(B):
    best = math.inf
    for i, j in itertools.combinations(range(len(B)), 2):
        best = min(best, int(np.sum(B[i] != B[j])))
    return best


def brute_rip(G, s):
    best = -np.inf
    for S in itertools.combinations(range(G.shape[0]), s):
        lam = np.linalg.eigvalsh(G[np.ix_(S, S)])
        best = max(best, lam[-1] - 1, 1 - lam[0])
    return best


def test_compiled_backend_present():
    assert "cython" in BACKENDS, "extension failed to build"


def test_colex_order_small():
    assert list(colex_combinations(4, 2)) == [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]
    assert list(colex_combinations(3, 3)) == [(0, 1, 2)]
    assert list(colex_combinations(3, 0)) == [()]


@given(st.integers(1, 9), st.data())
def test_colex_covers_all_subsets(p, data):
    s = data.draw(st.integers(1, p))
    subs = list(colex_combinations(p, s))
    assert len(subs) == math.comb(p, s)
    assert set(subs) == set(itertools.combinations(range(p), s))
    # colex: sorted by reversed tuple
    assert subs == sorted(subs, key=lambda c: c[::-1])


@pytest.mark.parametrize("backend", BACKENDS)
def test_hamming_edge_cases(backend):
    k = kernels.get_backend(backend)
    assert k.min_pairwise_hamming(np.ones((1, 8), dtype=np.int8)) == -1
    assert k.min_pairwise_hamming(np.ones((2, 8), dtype=np.int8)) == 0
    B = np.ones((2, 70), dtype=np.int8)
    B[1] = -1
    assert k.min_pairwise_hamming(B) == 70


@pytest.mark.parametrize("backend", BACKENDS)
@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), P=st.integers(2, 30), d=st.integers(1, 130))
def test_hamming_matches_brute_force(backend, seed, P, d):
    B = (np.random.default_rng(seed).integers(0, 2, size=(P, d)) * 2 - 1).astype(np.int8)
    assert kernels.get_backend(backend).min_pairwise_hamming(B) == brute_hamming(B)


@pytest.mark.parametrize("backend", BACKENDS)
@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), L=st.integers(2, 12), n=st.integers(1, 20))
def test_pairwise_extremes_match_brute_force(backend, seed, L, n):
    M = np.random.default_rng(seed).standard_normal((L, n))
    d = [np.sum((M[i] - M[j]) ** 2) for i, j in itertools.combinations(range(L), 2)]
    lo, hi = kernels.get_backend(backend).pairwise_sq_dist_extremes(M)
    assert lo == pytest.approx(min(d), rel=1e-12)
    assert hi == pytest.approx(max(d), rel=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_pairwise_extremes_single_row(backend):
    lo, hi = kernels.get_backend(backend).pairwise_sq_dist_extremes(np.zeros((1, 3)))
    assert lo == math.inf and hi == -math.inf


@pytest.mark.parametrize("backend", BACKENDS)
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(2, 6), p=st.integers(2, 9), data=st.data())
def test_rip_matches_brute_force(backend, seed, m, p, data):
    s = data.draw(st.integers(1, p))
    D = np.random.default_rng(seed).standard_normal((m, p))
    D /= np.linalg.norm(D, axis=0)
    G = D.T @ D
    delta, worst, count = kernels.get_backend(backend).rip_extremes(G, s)
    assert count == math.comb(p, s)
    assert delta == pytest.approx(brute_rip(G, s), abs=1e-12)
    lam = np.linalg.eigvalsh(G[np.ix_(worst, worst)])
    assert max(lam[-1] - 1, 1 - lam[0]) == pytest.approx(delta, abs=1e-12)


def test_backends_agree_exactly_on_hamming():
    if len(BACKENDS) < 2:
        pytest.skip("only one backend")
    B = (np.random.default_rng(5).integers(0, 2, size=(300, 50)) * 2 - 1).astype(np.int8)
    vals = {b: kernels.get_backend(b).min_pairwise_hamming(B) for b in BACKENDS}
    assert len(set(vals.values())) == 1


def test_unknown_backend():
    with pytest.raises(ImportError):
        kernels.get_backend("fortran")


def test_env_var_selects_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, MINIMAXDL_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import minimaxdl.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
