"""Binary packing codes and separated dictionary ensembles.

The ensemble around a reference dictionary ``D0`` is built in four steps:

1. a random +-1 packing code of length ``d = (m-1) p`` with pairwise Hamming
   distance at least ``d/10``, entries scaled by ``1/sqrt(4 d)`` and each
   codeword reshaped (row-major) into an ``(m-1, p)`` matrix ``D1``;
2. per column ``j`` a Householder reflection ``U_j`` with ``U_j e_1 = d0_j``;
3. ``D2[:, j] = U_j (0, D1[:, j])``, orthogonal to ``d0_j`` with norm ``1/sqrt(4p)``;
4. members ``sqrt(1 - eps'/(4p)) D0 + sqrt(eps') D2`` with ``eps' = 320 eps``.

Every member has unit columns, lies within ``sqrt(eps'/2)`` of ``D0``, and
pairwise squared distances fall in ``[8 eps, 320 eps]``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import ConstructionError, DimensionError, ParameterError
from .geometry import NeighborhoodSpec
from .model import check_dictionary, load_csv, save_csv
from .seeding import as_generator

# (1 - 2/10)^2 / 4
PACKING_RATE_LIMIT = 0.16
MIN_DIMENSION_PRODUCT = 50
SEPARATION_FACTOR = 320


def packing_rate(d: int, P: int) -> float:
    return math.log(P) / d


def packing_failure_bound(d: int, P: int) -> float:
    """Union bound ``exp(-d (0.8)^2 / 2 + 2 log P)`` on one draw failing, clipped to 1."""
    return min(1.0, math.exp(-d * 0.8**2 / 2 + 2 * math.log(P)))


@dataclass
class PackingCode:
    d: int
    P: int
    vectors: np.ndarray  # (P, d) int8 in {-1, +1}
    min_hamming: float
    attempts: int = 1
    failure_prob_bound: float = 0.0

    @property
    def target_distance(self) -> float:
        return self.d / 10

    def is_valid(self) -> bool:
        return self.min_hamming >= self.d / 10


def verify_packing(code: PackingCode, backend: Optional[str] = None) -> float:
    """Brute-force minimum Hamming distance over all pairs (``inf`` if P < 2)."""
    h = kernels.get_backend(backend).min_pairwise_hamming(np.asarray(code.vectors, dtype=np.int8))
    return math.inf if h < 0 else h


def build_packing(d: int, P: int, rng, max_attempts: int = 100) -> PackingCode:
    """Draw ``P`` i.i.d. Rademacher vectors until all pairs are ``d/10`` apart.

    Each attempt redraws the whole set.
    """
    if d < 1 or P < 1:
        raise ParameterError("need d >= 1 and P >= 1")
    if max_attempts < 1:
        raise ParameterError("max_attempts must be >= 1")
    rate = packing_rate(d, P)
    if rate >= PACKING_RATE_LIMIT:
        raise ParameterError(
            f"log(P)/d = {rate:.4g} is not below {PACKING_RATE_LIMIT}",
            condition="log(P)/d < (1-2/10)^2/4",
        )
    rng = as_generator(rng)
    bound = packing_failure_bound(d, P)
    for attempt in range(1, max_attempts + 1):
        B = (rng.integers(0, 2, size=(P, d), dtype=np.int8) * 2 - 1).astype(np.int8)
        code = PackingCode(d, P, B, math.inf, attempt, bound)
        code.min_hamming = verify_packing(code)
        if code.is_valid():
            return code
    raise ConstructionError(
        f"no packing with min distance >= {d / 10} after {max_attempts} attempts "
        f"(per-attempt failure probability <= {bound:.3g})",
        failure_prob_bound=bound,
    )


def householder_unitary(d0) -> np.ndarray:
    """Orthogonal ``U`` with ``U e_1 = d0`` for a unit vector ``d0``.

    The reflection ``I - 2 v v^T / v^T v`` with ``v = e_1 - d0``; identity when
    ``d0`` equals ``e_1``. For ``d0 = -e_1`` this is the sign flip of the first
    coordinate.
    """
    d0 = np.asarray(d0, dtype=np.float64)
    d0 = d0 / np.linalg.norm(d0)
    m = d0.shape[0]
    v = -d0.copy()
    v[0] += 1.0
    vv = float(v @ v)
    if vv <= 1e-28:
        return np.eye(m)
    return np.eye(m) - (2.0 / vv) * np.outer(v, v)


def hoeffding_tail(k: int, a: float, t: float) -> float:
    """``exp(-t^2 / (2 k a^2))``: tail bound for a sum of k zero-mean variables in [-a, a]."""
    if k < 1 or not a > 0 or t < 0:
        raise ParameterError("need k >= 1, a > 0, t >= 0")
    return math.exp(-t * t / (2 * k * a * a))


@dataclass
class EnsembleCertificate:
    """Brute-force measurements of an ensemble; ``passed`` decided by ``verify_ensemble``."""

    min_pairwise_sq: float
    max_pairwise_sq: float
    max_col_norm_err: float
    max_radius: float
    orthogonality_err: float
    perturbation_norm_err: float
    max_radius_sq: float
    epsilon: float
    r: float
    checks: dict = field(default_factory=dict)
    passed: bool = False

    def to_dict(self) -> dict:
        out = asdict(self)
        for k, v in out.items():
            if isinstance(v, float) and not math.isfinite(v):
                out[k] = None
        out["pass"] = self.passed
        return out


@dataclass
class DictionaryEnsemble:
    D0: np.ndarray
    epsilon: float
    members: np.ndarray  # (L, m, p)
    perturbations: np.ndarray  # (L, m, p), the D2 matrices
    r: float
    code: Optional[PackingCode] = None
    seed: Optional[int] = None
    certificate: Optional[EnsembleCertificate] = None

    @property
    def epsilon_prime(self) -> float:
        return SEPARATION_FACTOR * self.epsilon

    @property
    def L(self) -> int:
        return self.members.shape[0]

    @property
    def m(self) -> int:
        return self.D0.shape[0]

    @property
    def p(self) -> int:
        return self.D0.shape[1]

    def neighborhood(self) -> NeighborhoodSpec:
        return NeighborhoodSpec(self.D0, self.r)

    def save(self, directory) -> None:
        """``D0.csv``, ``member_####.csv``, ``certificate.json``, ``meta.json``."""
        os.makedirs(directory, exist_ok=True)
        save_csv(os.path.join(directory, "D0.csv"), self.D0)
        for l, D in enumerate(self.members):
            save_csv(os.path.join(directory, f"member_{l:04d}.csv"), D)
        cert = self.certificate or verify_ensemble(self, self.neighborhood())
        with open(os.path.join(directory, "certificate.json"), "w") as fh:
            json.dump(cert.to_dict(), fh, indent=2, sort_keys=True)
        meta = {
            "m": self.m,
            "p": self.p,
            "epsilon": self.epsilon,
            "epsilon_prime": self.epsilon_prime,
            "L": self.L,
            "r": self.r,
            "seed": self.seed,
        }
        with open(os.path.join(directory, "meta.json"), "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, directory) -> "DictionaryEnsemble":
        with open(os.path.join(directory, "meta.json")) as fh:
            meta = json.load(fh)
        m, p, L = meta["m"], meta["p"], meta["L"]
        D0 = load_csv(os.path.join(directory, "D0.csv"), (m, p))
        members = np.stack([load_csv(os.path.join(directory, f"member_{l:04d}.csv"), (m, p)) for l in range(L)])
        eps_p = SEPARATION_FACTOR * meta["epsilon"]
        # recover D2 from the member formula
        D2 = (members - math.sqrt(1 - eps_p / (4 * p)) * D0) / math.sqrt(eps_p)
        return cls(D0, meta["epsilon"], members, D2, meta["r"], None, meta.get("seed"))


def max_ensemble_size(m: int, p: int) -> float:
    return 2.0 ** ((m - 1) * p / 5)


def build_ensemble(D0, epsilon: float, L_requested: int, rng, r: Optional[float] = None, max_attempts: int = 100, seed=None) -> DictionaryEnsemble:
    """Separated ensemble of ``L_requested`` dictionaries around ``D0``.

    ``r`` defaults to ``sqrt(320 epsilon)``, the smallest radius for which the
    ensemble is guaranteed to sit inside the neighborhood.
    """
    D0 = check_dictionary(D0)
    m, p = D0.shape
    if p * (m - 1) < MIN_DIMENSION_PRODUCT:
        raise ParameterError(f"p*(m-1) = {p * (m - 1)} < {MIN_DIMENSION_PRODUCT}", condition="p*(m-1) >= 50")
    if not epsilon > 0:
        raise ParameterError("epsilon must be positive", condition="epsilon > 0")
    eps_p = SEPARATION_FACTOR * epsilon
    if r is None:
        r = min(math.sqrt(eps_p), 2 * math.sqrt(p))
    if r > 2 * math.sqrt(p) * (1 + 1e-12):
        raise ParameterError(f"r = {r} exceeds 2*sqrt(p)", condition="r <= 2*sqrt(p)")
    if epsilon > r * r / SEPARATION_FACTOR * (1 + 1e-12):
        raise ParameterError(f"epsilon = {epsilon} exceeds r^2/320 = {r * r / 320}", condition="epsilon <= r^2/320")
    if eps_p > 4 * p:
        raise ParameterError("320*epsilon must not exceed 4p", condition="epsilon' <= 4p")
    if L_requested < 1 or L_requested > max_ensemble_size(m, p):
        raise ParameterError(
            f"L = {L_requested} outside [1, 2^((m-1)p/5)]", condition="L <= 2^((m-1)p/5)"
        )
    d = (m - 1) * p
    code = build_packing(d, L_requested, rng, max_attempts)
    D1 = code.vectors.astype(np.float64).reshape(L_requested, m - 1, p) / math.sqrt(4 * d)
    D2 = np.empty((L_requested, m, p))
    for j in range(p):
        U = householder_unitary(D0[:, j])
        # U (0, x) only involves the trailing m-1 columns of U
        D2[:, :, j] = D1[:, :, j] @ U[:, 1:].T
    members = math.sqrt(1 - eps_p / (4 * p)) * D0[None] + math.sqrt(eps_p) * D2
    ens = DictionaryEnsemble(D0, float(epsilon), members, D2, float(r), code, seed)
    ens.certificate = verify_ensemble(ens, ens.neighborhood())
    return ens


def verify_ensemble(ens: DictionaryEnsemble, spec: Optional[NeighborhoodSpec] = None, backend: Optional[str] = None) -> EnsembleCertificate:
    """Measure every ensemble claim by brute force and decide pass/fail.

    Failures are reported in the certificate, never raised.
    """
    spec = spec or ens.neighborhood()
    members = np.asarray(ens.members, dtype=np.float64)
    L, m, p = members.shape
    if spec.D0.shape != (m, p):
        raise DimensionError("neighborhood reference does not match ensemble shape")
    eps = ens.epsilon
    col_norm_err = float(np.abs(np.linalg.norm(members, axis=1) - 1.0).max())
    radius_sq = np.sum((members - spec.D0[None]) ** 2, axis=(1, 2))
    max_radius = float(math.sqrt(radius_sq.max()))
    D2 = np.asarray(ens.perturbations, dtype=np.float64)
    orth = float(np.abs(np.einsum("ij,lij->lj", ens.D0, D2)).max())
    pert_err = float(np.abs(np.linalg.norm(D2, axis=1) - 1 / math.sqrt(4 * p)).max())
    lo, hi = kernels.get_backend(backend).pairwise_sq_dist_extremes(members.reshape(L, -1))
    checks = {
        "min_pairwise_sq >= 8 eps": L < 2 or lo >= 8 * eps * (1 - 1e-9),
        "max_pairwise_sq <= 320 eps": L < 2 or hi <= 320 * eps * (1 + 1e-9),
        "unit columns": col_norm_err <= 1e-10,
        "inside neighborhood": max_radius < spec.r,
        "diag(D0^T D2) = 0": orth <= 1e-10,
    }
    return EnsembleCertificate(
        min_pairwise_sq=float(lo),
        max_pairwise_sq=float(hi),
        max_col_norm_err=col_norm_err,
        max_radius=max_radius,
        orthogonality_err=orth,
        perturbation_norm_err=pert_err,
        max_radius_sq=float(radius_sq.max()),
        epsilon=eps,
        r=float(spec.r),
        checks={k: bool(v) for k, v in checks.items()},
        passed=bool(all(checks.values())),
    )
