"""Closed-form minimax lower bounds, the thresholding upper bound, and their inversion in N.

All bound values are in squared-Frobenius MSE units. The lower bounds share
the form ``c * min{first, second(N)}`` where the first term depends only on
the neighborhood radius and ``second(N)`` decays like ``1/N``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.special import erfc

from .errors import ParameterError

LOWER_CONST = 320.0
THM2_CONST = 12960.0
NOISE_CLIP = 0.4


@dataclass
class BoundReport:
    bound_id: str
    value: float
    active_branch: Optional[str]
    branches: Dict[str, float]
    preconditions: List[Tuple[str, bool]]
    params: dict
    flags: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "bound_id": self.bound_id,
            "value": self.value,
            "active_branch": self.active_branch,
            "branches": dict(self.branches),
            "preconditions": [{"name": n, "satisfied": ok} for n, ok in self.preconditions],
            "params": dict(self.params),
            "flags": list(self.flags),
        }


def _require(preconditions: List[Tuple[str, bool]]) -> None:
    for name, ok in preconditions:
        if not ok:
            raise ParameterError(f"precondition violated: {name}", condition=name)


def _positive(**kw) -> None:
    for k, v in kw.items():
        if not v > 0:
            raise ParameterError(f"{k} must be positive, got {v}", condition=f"{k} > 0")


def _dimension_factor(m: int, p: int, flags: List[str]) -> float:
    """``p(m-1)/10 - 1``, clamped at zero."""
    k = p * (m - 1) / 10 - 1
    if k <= 0:
        warnings.warn("p(m-1)/10 - 1 <= 0; clamped to 0", RuntimeWarning)
        flags.append("dimension_factor_clamped")
        return 0.0
    return k


def _common_preconditions(m, p, N, r) -> List[Tuple[str, bool]]:
    return [
        ("p*(m-1) >= 50", p * (m - 1) >= 50),
        ("r <= 2*sqrt(p)", r <= 2 * math.sqrt(p) * (1 + 1e-12)),
        ("N >= 1", N >= 1),
    ]


def _min_report(bound_id, const, first, second, pre, params, flags) -> BoundReport:
    branch = "first" if first <= second else "second"
    value = min(first, second) / const
    return BoundReport(bound_id, value, branch, {"first": first / const, "second": second / const}, pre, params, flags)


def thm1_lower(m: int, p: int, N: float, sigma2: float, sigma_x_norm: float, r: float) -> BoundReport:
    """Lower bound for any coefficient law with covariance spectral norm ``sigma_x_norm``."""
    _positive(sigma2=sigma2, sigma_x_norm=sigma_x_norm, r=r)
    pre = _common_preconditions(m, p, N, r)
    _require(pre)
    flags: List[str] = []
    k = _dimension_factor(m, p, flags)
    params = dict(m=m, p=p, N=N, sigma2=sigma2, sigma_x_norm=sigma_x_norm, r=r)
    return _min_report("thm1", LOWER_CONST, r * r, sigma2 / (N * sigma_x_norm) * k, pre, params, flags)


def cor1_lower(m: int, p: int, N: float, snr: float, r: float, rip_ok: bool = True) -> BoundReport:
    """Lower bound for s-sparse coefficients; ``rip_ok`` asserts ``delta_s <= 1/2``."""
    _positive(snr=snr, r=r)
    pre = _common_preconditions(m, p, N, r) + [("delta_s <= 1/2", bool(rip_ok))]
    _require(pre)
    flags: List[str] = []
    k = _dimension_factor(m, p, flags)
    params = dict(m=m, p=p, N=N, snr=snr, r=r, rip_ok=bool(rip_ok))
    return _min_report("cor1", LOWER_CONST, r * r, 2 * p / (snr * N * m) * k, pre, params, flags)


def low_snr_threshold(m: int, s: int) -> float:
    """Largest SNR admitted by the Gaussian-sparse bound: ``m / (18 sqrt(80) s)``."""
    return m / (18 * math.sqrt(80) * s)


def thm2_lower(m: int, p: int, s: int, N: float, snr: float, r: float, rip_ok: bool = True) -> BoundReport:
    """Low-SNR lower bound for Gaussian nonzeros on uniform supports."""
    _positive(snr=snr, r=r, s=s)
    pre = _common_preconditions(m, p, N, r) + [
        ("SNR <= m/(18*sqrt(80)*s)", snr <= low_snr_threshold(m, s)),
        ("delta_s <= 1/2", bool(rip_ok)),
    ]
    _require(pre)
    flags: List[str] = []
    k = _dimension_factor(m, p, flags)
    params = dict(m=m, p=p, s=s, N=N, snr=snr, r=r, rip_ok=bool(rip_ok))
    return _min_report("thm2", THM2_CONST, r * r / s, p / (snr**2 * N * m**2) * k, pre, params, flags)


def thm3_upper(p: int, N: float, r: float, s: int, sigma: float, snr: float) -> BoundReport:
    """MSE guarantee of the thresholding learner (square case, ``D0 = I``)."""
    _positive(sigma=sigma, snr=snr, N=N)
    pre = [
        ("r*sqrt(s) <= 1/10", r * math.sqrt(s) <= 0.1 * (1 + 1e-12)),
        ("sigma <= 0.4", sigma <= NOISE_CLIP),
        ("r <= 2*sqrt(p)", r <= 2 * math.sqrt(p)),
        ("N >= 1", N >= 1),
    ]
    _require(pre)
    main = 4 * (p * p / N) * ((1 - r) ** 2 / snr + 1)
    tail = 2 * p * math.exp(-p * N * NOISE_CLIP**2 / (2 * sigma * sigma))
    params = dict(p=p, N=N, r=r, s=s, sigma=sigma, snr=snr)
    return BoundReport("thm3_upper", main + tail, None, {"main": main, "tail": tail}, pre, params, [])


def ccrb_matrix(snr: float, m: int, N: float) -> np.ndarray:
    """Constrained CRB for a single unit-norm atom ``d = e_1`` (p = s = 1)."""
    _positive(snr=snr, m=m, N=N)
    P = np.eye(m)
    P[0, 0] = 0.0
    return P / (snr**2 * m**2 * N)


def ccrb_report(snr: float, m: int, N: float) -> BoundReport:
    C = ccrb_matrix(snr, m, N)
    return BoundReport("ccrb", float(np.trace(C)), None, {}, [("N >= 1", N >= 1)], dict(snr=snr, m=m, N=N), [])


def gaussian_tail(x):
    """Standard normal upper tail ``Q(x)``."""
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))


def noise_mass(sigma: float) -> float:
    """``Q(-0.4/sigma) - Q(0.4/sigma)``: probability that one noise entry lies in (-0.4, 0.4)."""
    _positive(sigma=sigma)
    return float(gaussian_tail(-NOISE_CLIP / sigma) - gaussian_tail(NOISE_CLIP / sigma))


# -- inversion in N -------------------------------------------------------------

_LOWER_BOUNDS: Dict[str, Callable[..., BoundReport]] = {
    "thm1": thm1_lower,
    "cor1": cor1_lower,
    "thm2": thm2_lower,
}

BOUND_FUNCTIONS: Dict[str, Callable[..., BoundReport]] = dict(_LOWER_BOUNDS, thm3_upper=thm3_upper)


@dataclass
class SampleSizeResult:
    bound_id: str
    N: int
    target_eps: float
    degenerate: bool
    value_at_N: float
    value_at_N_minus_1: Optional[float]
    params: dict

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def required_sample_size(bound_id: str, target_eps: float, **params) -> SampleSizeResult:
    """Smallest integer N with ``bound(N) <= target_eps``.

    If the radius branch alone is already below the target every N works;
    the answer is then N = 1 with ``degenerate = True``.
    """
    if bound_id not in _LOWER_BOUNDS:
        raise ParameterError(f"sample-size inversion supports {sorted(_LOWER_BOUNDS)}, got {bound_id!r}")
    if not target_eps > 0:
        raise ParameterError("target must be positive", condition="target_eps > 0")
    params = {k: v for k, v in params.items() if k != "N"}
    f = _LOWER_BOUNDS[bound_id]

    def value(N):
        return f(N=N, **params).value

    at_one = f(N=1, **params)
    if at_one.branches["first"] <= target_eps:
        return SampleSizeResult(bound_id, 1, target_eps, True, at_one.value, None, params)
    C = at_one.branches["second"]  # second branch at N = 1, i.e. second(N) = C / N
    if C <= 0:
        return SampleSizeResult(bound_id, 1, target_eps, True, at_one.value, None, params)
    N = max(1, math.ceil(C / target_eps))
    while N > 1 and value(N - 1) <= target_eps:
        N -= 1
    while value(N) > target_eps:
        N += 1
    prev = value(N - 1) if N > 1 else None
    return SampleSizeResult(bound_id, N, target_eps, False, value(N), prev, params)
