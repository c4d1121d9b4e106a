"""Mutual-information budgets, the Fano floor and the minimum-distance detector.

Mutual information is computed in nats. ``fano_error_lower_bound`` converts to
bits before comparing against ``log2(L)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import DimensionError, EnumerationCapError, ParameterError
from .model import (
    CoefficientModel,
    NoiseModel,
    ObservationBatch,
    SparseUniform,
    coefficient_covariance,
    generate_batch,
    sample_supports,
)
from .packing import SEPARATION_FACTOR, DictionaryEnsemble
from .seeding import as_generator, derived_rng

EXACT_SUPPORT_CAP = 10**4
TIE_RTOL = 1e-12


@dataclass
class MiBudget:
    side_info: str  # "coefficients" or "supports"
    eta: float
    computed_mi_upper: float
    stderr: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "side_info": self.side_info,
            "eta": self.eta,
            "computed_mi_upper": self.computed_mi_upper,
            "stderr": self.stderr,
            **self.extra,
        }


def _members(ens) -> np.ndarray:
    if isinstance(ens, DictionaryEnsemble):
        return np.asarray(ens.members, dtype=np.float64)
    return np.asarray(ens, dtype=np.float64)


def mi_upper_given_X(ens: DictionaryEnsemble, sigma_x, N: int, sigma2: float) -> MiBudget:
    """Average pairwise KL divergence with the coefficients as side information.

    ``(N / 2 sigma^2) (1/L^2) sum_{l,l'} Tr{(D_l - D_l')^T (D_l - D_l') Sigma_x}``,
    the expectation over X taken in closed form. Also reports the budget
    ``eta = 320 N ||Sigma_x||_2 eps / sigma^2`` and the tighter
    ``eta_tight = 160 N ||Sigma_x||_2 eps / sigma^2``.
    """
    if not isinstance(sigma_x, np.ndarray):
        sigma_x = coefficient_covariance(sigma_x) if not np.isscalar(sigma_x) else np.asarray(sigma_x)
    if not sigma2 > 0:
        raise ParameterError("sigma2 must be positive", condition="sigma2 > 0")
    M = _members(ens)
    L, m, p = M.shape
    if sigma_x.shape != (p, p):
        raise DimensionError(f"Sigma_x has shape {sigma_x.shape}, expected {(p, p)}")
    # sum_{l,l'} ||(D_l - D_l') F||_F^2 = 2 L sum_l ||(D_l - Dbar) F||_F^2, F F^T = Sigma_x
    C = M - M.mean(axis=0)
    pair_sum = 2 * L * float(np.einsum("lij,jk,lik->", C, sigma_x, C))
    mi = N / (2 * sigma2) * pair_sum / L**2
    norm = float(np.linalg.norm(sigma_x, 2))
    eps = ens.epsilon if isinstance(ens, DictionaryEnsemble) else float("nan")
    eta = SEPARATION_FACTOR * N * norm * eps / sigma2
    return MiBudget("coefficients", eta, max(mi, 0.0), 0.0, {"eta_tight": eta / 2, "sigma_x_norm": norm})


def conditional_cov(D, S, sigma_a2: float, sigma2: float) -> np.ndarray:
    """Covariance ``sigma_a^2 D_S D_S^T + sigma^2 I`` of y given the support S."""
    D = np.asarray(D, dtype=np.float64)
    S = np.asarray(S, dtype=np.intp)
    p = D.shape[1]
    if S.ndim != 1 or len(set(S.tolist())) != len(S) or (len(S) and (S.min() < 0 or S.max() >= p)):
        raise ParameterError(f"invalid support {S.tolist()} for p={p}")
    DS = D[:, S]
    return sigma_a2 * DS @ DS.T + sigma2 * np.eye(D.shape[0])


def _spd_inverse(A: np.ndarray) -> np.ndarray:
    """Inverse of a stack of SPD matrices through their Cholesky factors."""
    Lc = np.linalg.cholesky(A)
    eye = np.broadcast_to(np.eye(A.shape[-1]), A.shape)
    Li = np.linalg.solve(Lc, eye)
    return np.swapaxes(Li, -1, -2) @ Li


def support_pair_trace(members: np.ndarray, S, sigma_a2: float, sigma2: float) -> float:
    """``(1/L^2) sum_{l,l'} Tr{(Sigma_l^-1 - Sigma_l'^-1)(Sigma_l' - Sigma_l)}`` for one support."""
    L, m, _ = members.shape
    DS = members[:, :, S]
    Sig = sigma_a2 * DS @ np.swapaxes(DS, 1, 2) + sigma2 * np.eye(m)
    Inv = _spd_inverse(Sig)
    # sum_{l,l'} Tr{(A_l - A_l')(B_l - B_l')} = 2 L sum_l Tr{(A_l - Abar)(B_l - Bbar)}
    A = Inv - Inv.mean(axis=0)
    B = Sig - Sig.mean(axis=0)
    return -2 * L * float(np.einsum("lij,lji->", A, B)) / L**2


def _pair_chain_terms(members, S, sigma_a2, sigma2):
    """Spectral-norm products ``||A_l - A_l'||_2 ||B_l' - B_l||_2`` averaged over pairs."""
    L, m, _ = members.shape
    DS = members[:, :, S]
    Sig = sigma_a2 * DS @ np.swapaxes(DS, 1, 2) + sigma2 * np.eye(m)
    Inv = _spd_inverse(Sig)
    dA = Inv[:, None] - Inv[None, :]
    dB = Sig[:, None] - Sig[None, :]
    nA = np.linalg.norm(dA.reshape(-1, m, m), 2, axis=(1, 2))
    nB = np.linalg.norm(dB.reshape(-1, m, m), 2, axis=(1, 2))
    return float(np.sum(nA * nB)) / L**2


def mi_upper_given_support(
    ens: DictionaryEnsemble,
    s: int,
    sigma_a2: float,
    sigma2: float,
    N: int,
    support_avg: str = "auto",
    trials: int = 2000,
    rng=None,
    snr: Optional[float] = None,
    cap: int = EXACT_SUPPORT_CAP,
    diagnostics: bool = False,
) -> MiBudget:
    """KL-based bound on ``I(Y; l | supp X)`` for Gaussian nonzeros.

    ``N * E_S[support_pair_trace(S)]`` with the expectation over uniform
    s-subsets taken exactly (``support_avg="exact"``, colex enumeration) or
    by Monte Carlo. ``"auto"`` enumerates when ``C(p, s) <= cap``.

    The budget is ``eta = 12960 N SNR^2 m^2 eps / p``; ``snr`` defaults to
    ``s sigma_a^2 / (m sigma^2)``, exact for unit-column dictionaries.

    With ``diagnostics=True`` the intermediate spectral-norm bounds of the
    rank / perturbation argument are also reported (``chain_rank_bound`` and
    ``chain_final_bound``).
    """
    if not sigma2 > 0:
        raise ParameterError("sigma2 must be positive; the support covariances would be singular", condition="sigma2 > 0")
    M = _members(ens)
    L, m, p = M.shape
    if not 1 <= s <= p:
        raise ParameterError(f"need 1 <= s <= p, got s={s}")
    total = math.comb(p, s)
    mode = support_avg
    if mode == "auto":
        mode = "exact" if total <= cap else "monte_carlo"
    if mode == "exact":
        if total > cap:
            raise EnumerationCapError(f"C({p},{s}) = {total} exceeds cap {cap}", condition="C(p,s) <= cap")
        supports = kernels.colex_combinations(p, s)
        count = total
    elif mode == "monte_carlo":
        if trials < 2:
            raise ParameterError("Monte Carlo support averaging needs trials >= 2")
        supports = sample_supports(SparseUniform(p, s), as_generator(rng), trials)
        count = trials
    else:
        raise ParameterError(f"unknown support averaging {support_avg!r}")

    vals = np.empty(count)
    chain = np.empty(count) if diagnostics else None
    for i, S in enumerate(supports):
        S = np.asarray(S, dtype=np.intp)
        vals[i] = support_pair_trace(M, S, sigma_a2, sigma2)
        if diagnostics:
            chain[i] = _pair_chain_terms(M, S, sigma_a2, sigma2)
    mi = N * float(vals.mean())
    stderr = N * float(vals.std(ddof=1)) / math.sqrt(count) if mode == "monte_carlo" else 0.0

    if snr is None:
        snr = s * sigma_a2 / (m * sigma2)
    eps = ens.epsilon if isinstance(ens, DictionaryEnsemble) else float("nan")
    eta = 12960 * N * snr**2 * m**2 * eps / p
    extra = {"support_avg": mode, "supports": count, "snr": snr}
    if diagnostics:
        extra["chain_rank_bound"] = 2 * s * N * float(chain.mean())
        extra["chain_final_bound"] = 6480 * N * s**2 * (sigma_a2 / sigma2) ** 2 * eps / p
    return MiBudget("supports", eta, max(mi, 0.0), stderr, extra)


def fano_error_lower_bound(mi_upper: float, L: int, units: str = "nats") -> float:
    """``max(0, 1 - (I + 1) / log2(L))`` with ``I`` in bits.

    Valid lower bound on the error probability of any detector of a uniform
    index in ``[L]`` whenever ``mi_upper`` bounds the mutual information.
    """
    if L < 2:
        raise ParameterError("need L >= 2", condition="L >= 2")
    if mi_upper < 0:
        raise ParameterError("mutual information bound must be nonnegative")
    if units == "nats":
        bits = mi_upper / math.log(2)
    elif units == "bits":
        bits = mi_upper
    else:
        raise ParameterError(f"units must be 'nats' or 'bits', got {units!r}")
    return max(0.0, 1.0 - (bits + 1.0) / math.log2(L))


def min_distance_detect(D_hat, ens, rng=None) -> int:
    """Index of the member nearest to ``D_hat`` in Frobenius norm.

    Distances within a relative ``1e-12`` of the minimum count as ties and are
    broken uniformly at random.
    """
    M = _members(ens)
    if M.shape[0] == 0:
        raise ParameterError("empty ensemble")
    D_hat = np.asarray(D_hat, dtype=np.float64)
    if D_hat.shape != M.shape[1:]:
        raise DimensionError(f"estimate shape {D_hat.shape} does not match members {M.shape[1:]}")
    d = np.sum((M - D_hat[None]) ** 2, axis=(1, 2))
    best = d.min()
    ties = np.flatnonzero(d <= best + TIE_RTOL * max(best, 1e-300))
    if len(ties) == 1:
        return int(ties[0])
    return int(as_generator(rng).choice(ties))


def empirical_error_probability(
    ens: DictionaryEnsemble,
    estimator: Callable[[ObservationBatch], np.ndarray],
    cm: CoefficientModel,
    nm: NoiseModel,
    N: int,
    trials: int,
    seed: int,
    threads: int = 1,
):
    """Monte Carlo error rate of ``estimator`` followed by the minimum-distance detector.

    Trial ``t`` uses the stream ``derived_rng(seed, t)``: draw ``l`` uniformly,
    generate a batch from member ``l`` (``batch.dict_index = l``), estimate,
    detect. Returns ``(p_e_hat, stderr)`` with the binomial standard error.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    M = _members(ens)
    L = M.shape[0]

    def one(t):
        rng = derived_rng(seed, t)
        l = int(rng.integers(L))
        batch = generate_batch(M[l], cm, nm, N, rng, dict_index=l)
        D_hat = estimator(batch)
        D_hat = getattr(D_hat, "D_hat", D_hat)
        return int(min_distance_detect(D_hat, M, rng) != l)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            errors = list(pool.map(one, range(trials)))
    else:
        errors = [one(t) for t in range(trials)]
    p_hat = sum(errors) / trials
    return p_hat, math.sqrt(p_hat * (1 - p_hat) / trials)
