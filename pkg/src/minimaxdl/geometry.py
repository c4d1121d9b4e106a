"""Oblique manifold, Frobenius neighborhoods and restricted isometry constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import kernels
from .errors import DimensionError, EnumerationCapError, ParameterError
from .model import MANIFOLD_TOL, SparseUniform, check_dictionary, sample_supports
from .seeding import as_generator

DEFAULT_ENUMERATION_CAP = 10**6


def is_on_oblique_manifold(D, tol: float = MANIFOLD_TOL) -> bool:
    if tol <= 0:
        raise ParameterError("tol must be positive")
    D = np.asarray(D, dtype=np.float64)
    return bool(np.all(np.abs(np.linalg.norm(D, axis=0) - 1.0) <= tol))


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Open Frobenius ball of radius ``r`` around the reference dictionary ``D0``."""

    D0: np.ndarray
    r: float

    def __post_init__(self):
        D0 = check_dictionary(self.D0).copy()
        D0.setflags(write=False)
        object.__setattr__(self, "D0", D0)
        p = D0.shape[1]
        if not self.r > 0:
            raise ParameterError("radius must be positive", condition="r > 0")
        if self.r > 2 * math.sqrt(p) * (1 + 1e-12):
            raise ParameterError(f"radius {self.r} exceeds 2*sqrt(p) = {2 * math.sqrt(p)}", condition="r <= 2*sqrt(p)")


def in_neighborhood(D, spec: NeighborhoodSpec) -> bool:
    """Strict membership ``||D - D0||_F < r``."""
    D = np.asarray(D, dtype=np.float64)
    if D.shape != spec.D0.shape:
        raise DimensionError(f"shape {D.shape} does not match reference {spec.D0.shape}")
    return bool(np.linalg.norm(D - spec.D0) < spec.r)


@dataclass(frozen=True)
class RipEstimate:
    s: int
    delta: float
    method: str
    supports_checked: int
    worst_support: Optional[Tuple[int, ...]] = None

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "delta": self.delta,
            "method": self.method,
            "supports_checked": self.supports_checked,
            "worst_support": None if self.worst_support is None else list(self.worst_support),
        }


def _support_deviation(G: np.ndarray, idx: np.ndarray) -> np.ndarray:
    sub = G[idx[:, :, None], idx[:, None, :]]
    lam = np.linalg.eigvalsh(sub)
    return np.maximum(lam[:, -1] - 1.0, 1.0 - lam[:, 0])


def rip_constant_exact(D, s: int, cap: int = DEFAULT_ENUMERATION_CAP, backend: Optional[str] = None) -> RipEstimate:
    """Smallest ``delta`` with ``(1-delta)|z|^2 <= |Dz|^2 <= (1+delta)|z|^2`` for all s-sparse z.

    Enumerates all ``C(p, s)`` supports in colex order and takes the extreme
    eigenvalues of each ``s x s`` Gram block.
    """
    D = np.asarray(D, dtype=np.float64)
    p = D.shape[1]
    if not 1 <= s <= p:
        raise ParameterError(f"need 1 <= s <= p, got s={s}")
    total = math.comb(p, s)
    if total > cap:
        raise EnumerationCapError(
            f"C({p},{s}) = {total} supports exceeds the enumeration cap {cap}; "
            "use rip_constant_monte_carlo for a lower estimate",
            condition="C(p,s) <= cap",
        )
    G = D.T @ D
    delta, worst, count = kernels.get_backend(backend).rip_extremes(G, s)
    return RipEstimate(s, max(float(delta), 0.0), "exact", int(count), tuple(int(i) for i in worst))


def rip_constant_monte_carlo(D, s: int, trials: int, rng) -> RipEstimate:
    """Lower estimate of the RIP constant from ``trials`` uniformly drawn supports.

    Supports are drawn row by row from one block, so a run with fewer trials
    on the same seed checks a prefix of the supports of a longer run.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    D = np.asarray(D, dtype=np.float64)
    p = D.shape[1]
    if not 1 <= s <= p:
        raise ParameterError(f"need 1 <= s <= p, got s={s}")
    G = D.T @ D
    supports = sample_supports(SparseUniform(p, s), as_generator(rng), trials)
    best, worst = -np.inf, None
    for start in range(0, trials, 1 << 15):
        block = supports[start:start + (1 << 15)]
        dev = _support_deviation(G, block)
        k = int(np.argmax(dev))
        if dev[k] > best:
            best, worst = float(dev[k]), tuple(int(i) for i in block[k])
    return RipEstimate(s, max(best, 0.0), "monte_carlo", trials, worst)


def project_unit_ball(v) -> np.ndarray:
    """Euclidean projection onto the closed unit ball centred at the origin."""
    v = np.asarray(v, dtype=np.float64)
    nrm = np.linalg.norm(v)
    return v / nrm if nrm > 1.0 else v.copy()


def project_columns(A) -> Tuple[np.ndarray, int]:
    """Project every column onto the unit ball; also return how many were clipped."""
    A = np.asarray(A, dtype=np.float64)
    nrm = np.linalg.norm(A, axis=0)
    over = nrm > 1.0
    out = A.copy()
    out[:, over] /= nrm[over]
    return out, int(over.sum())
