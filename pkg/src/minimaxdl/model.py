"""Generative model ``y = D x + n`` with sparse or general-covariance coefficients.

Dictionaries are plain ``(m, p)`` float arrays; ``check_dictionary`` enforces
unit-norm columns where a function requires them. Coefficient models are small
frozen dataclasses. Supports are 0-based index arrays throughout.

Draw order inside ``generate_batch`` (fixed, for reproducibility): supports,
then nonzero values, then noise.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import DimensionError, ParameterError, UnsupportedModelError
from .seeding import as_generator

MANIFOLD_TOL = 1e-10

RADEMACHER = "rademacher"
GAUSSIAN = "gaussian"


def check_dictionary(D, tol: float = MANIFOLD_TOL) -> np.ndarray:
    """Return ``D`` as a float array, raising unless every column has unit norm."""
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2:
        raise DimensionError(f"dictionary must be 2-D, got shape {D.shape}")
    err = np.abs(np.linalg.norm(D, axis=0) - 1.0)
    if err.size and err.max() > tol:
        raise ParameterError(
            f"dictionary columns must have unit norm (max deviation {err.max():.3g})",
            condition="unit-norm columns",
        )
    return D


def normalize_columns(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    return A / np.linalg.norm(A, axis=0)


def random_dictionary(m: int, p: int, rng) -> np.ndarray:
    """Gaussian matrix with columns rescaled to unit norm."""
    rng = as_generator(rng)
    return normalize_columns(rng.standard_normal((m, p)))


@dataclass(frozen=True)
class GeneralCovariance:
    """Zero-mean Gaussian coefficients with covariance ``sigma_x``."""

    sigma_x: np.ndarray

    def __post_init__(self):
        S = np.array(self.sigma_x, dtype=np.float64)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise DimensionError("sigma_x must be square")
        if not np.allclose(S, S.T, rtol=0, atol=1e-12):
            raise ParameterError("sigma_x must be symmetric", condition="sigma_x symmetric")
        if np.linalg.eigvalsh(S).min() < -1e-10:
            raise ParameterError("sigma_x must be positive semidefinite", condition="sigma_x psd")
        S.setflags(write=False)
        object.__setattr__(self, "sigma_x", S)

    @property
    def p(self) -> int:
        return self.sigma_x.shape[0]

    def describe(self) -> dict:
        return {"variant": "general_covariance", "p": self.p, "sigma_x": self.sigma_x.tolist()}


@dataclass(frozen=True)
class SparseUniform:
    """Exactly ``s`` nonzeros on a uniformly random support.

    Nonzeros are i.i.d. Rademacher (magnitude one, variance one) or
    zero-mean Gaussian with variance ``sigma_a2``.
    """

    p: int
    s: int
    nonzero_law: str = RADEMACHER
    sigma_a2: float = 1.0

    def __post_init__(self):
        if self.p < 1 or not 1 <= self.s <= self.p:
            raise ParameterError(f"need 1 <= s <= p, got s={self.s}, p={self.p}", condition="1 <= s <= p")
        law = self.nonzero_law.lower()
        if law not in (RADEMACHER, GAUSSIAN):
            raise ParameterError(f"unknown nonzero law {self.nonzero_law!r}")
        object.__setattr__(self, "nonzero_law", law)
        if law == RADEMACHER:
            if not math.isclose(self.sigma_a2, 1.0):
                raise ParameterError("Rademacher nonzeros have variance 1", condition="sigma_a2 == 1")
            object.__setattr__(self, "sigma_a2", 1.0)
        elif not self.sigma_a2 > 0:
            raise ParameterError("sigma_a2 must be positive", condition="sigma_a2 > 0")

    def describe(self) -> dict:
        return {
            "variant": "sparse_uniform",
            "p": self.p,
            "s": self.s,
            "nonzero_law": self.nonzero_law,
            "sigma_a2": self.sigma_a2,
        }


CoefficientModel = Union[GeneralCovariance, SparseUniform]


@dataclass(frozen=True)
class NoiseModel:
    """i.i.d. N(0, sigma2) noise per entry. ``sigma2 = 0`` is the noiseless limit."""

    sigma2: float

    def __post_init__(self):
        if not self.sigma2 >= 0:
            raise ParameterError("noise variance must be nonnegative", condition="sigma2 >= 0")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def model_from_dict(d: dict) -> CoefficientModel:
    variant = d.get("variant", "sparse_uniform")
    if variant == "sparse_uniform":
        return SparseUniform(int(d["p"]), int(d["s"]), d.get("nonzero_law", RADEMACHER), float(d.get("sigma_a2", 1.0)))
    if variant == "general_covariance":
        return GeneralCovariance(np.asarray(d["sigma_x"], dtype=np.float64))
    raise ParameterError(f"unknown coefficient model variant {variant!r}")


# -- sampling ---------------------------------------------------------------


def sample_supports(model: CoefficientModel, rng, n: int) -> np.ndarray:
    """``n`` independent uniform s-subsets as a sorted ``(n, s)`` index array.

    Partial Fisher-Yates on ``range(p)``, vectorized over rows. The swap
    targets are drawn as one row-major ``(n, s)`` block, so the first ``k``
    rows do not depend on ``n``.
    """
    if not isinstance(model, SparseUniform):
        raise UnsupportedModelError("supports are only defined for the sparse-uniform model")
    rng = as_generator(rng)
    p, s = model.p, model.s
    targets = rng.integers(np.arange(s), p, size=(n, s))
    perm = np.tile(np.arange(p), (n, 1))
    rows = np.arange(n)
    for i in range(s):
        j = targets[:, i]
        a = perm[rows, i].copy()
        perm[rows, i] = perm[rows, j]
        perm[rows, j] = a
    return np.sort(perm[:, :s], axis=1)


def sample_support(model: CoefficientModel, rng) -> np.ndarray:
    """One uniform s-subset of ``range(p)`` (sorted)."""
    return sample_supports(model, rng, 1)[0]


def _symmetric_sqrt(S: np.ndarray) -> np.ndarray:
    lam, V = np.linalg.eigh(S)
    return (V * np.sqrt(np.clip(lam, 0.0, None))) @ V.T


def sample_coefficient_matrix(model: CoefficientModel, rng, n: int):
    """Draw ``n`` coefficient vectors.

    Returns ``(X, supports)`` with ``X`` of shape ``(p, n)``; ``supports`` is
    ``None`` for the general-covariance model.
    """
    rng = as_generator(rng)
    if isinstance(model, GeneralCovariance):
        F = _symmetric_sqrt(model.sigma_x)
        return F @ rng.standard_normal((model.p, n)), None
    supports = sample_supports(model, rng, n)
    if model.nonzero_law == RADEMACHER:
        vals = rng.integers(0, 2, size=(n, model.s)) * 2.0 - 1.0
    else:
        vals = math.sqrt(model.sigma_a2) * rng.standard_normal((n, model.s))
    X = np.zeros((model.p, n))
    X[supports.T, np.arange(n)[None, :]] = vals.T
    return X, supports


def sample_coefficients(model: CoefficientModel, rng) -> np.ndarray:
    """One length-p coefficient vector."""
    X, _ = sample_coefficient_matrix(model, rng, 1)
    return X[:, 0]


# -- batches ----------------------------------------------------------------


@dataclass
class ObservationBatch:
    """Columns of ``Y`` are the observations; ``X``/``supports`` are ground truth."""

    Y: np.ndarray
    X: Optional[np.ndarray] = None
    supports: Optional[np.ndarray] = None
    dict_index: Optional[int] = None
    seed: Optional[int] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        N = self.Y.shape[1]
        if self.X is not None and self.X.shape[1] != N:
            raise DimensionError("Y and X disagree on N")
        if self.supports is not None and len(self.supports) != N:
            raise DimensionError("Y and supports disagree on N")

    @property
    def N(self) -> int:
        return self.Y.shape[1]

    def save(self, directory) -> None:
        """Write ``Y.csv``, ``X.csv`` (if known), ``supports.json`` and ``meta.json``."""
        os.makedirs(directory, exist_ok=True)
        save_csv(os.path.join(directory, "Y.csv"), self.Y)
        if self.X is not None:
            save_csv(os.path.join(directory, "X.csv"), self.X)
        sup = None if self.supports is None else [list(map(int, s)) for s in self.supports]
        with open(os.path.join(directory, "supports.json"), "w") as fh:
            json.dump({"index_base": 0, "supports": sup}, fh)
        meta = dict(self.meta)
        meta.update(m=int(self.Y.shape[0]), N=self.N, seed=self.seed, dict_index=self.dict_index)
        with open(os.path.join(directory, "meta.json"), "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, directory) -> "ObservationBatch":
        with open(os.path.join(directory, "meta.json")) as fh:
            meta = json.load(fh)
        m, N = meta["m"], meta["N"]
        Y = load_csv(os.path.join(directory, "Y.csv"), (m, N))
        xpath = os.path.join(directory, "X.csv")
        X = load_csv(xpath, (meta.get("p", 0), N)) if os.path.exists(xpath) else None
        with open(os.path.join(directory, "supports.json")) as fh:
            sup = json.load(fh)["supports"]
        supports = None if sup is None else np.asarray(sup, dtype=np.intp).reshape(N, -1)
        return cls(Y, X, supports, meta.get("dict_index"), meta.get("seed"), meta)


def save_csv(path, A) -> None:
    """Headerless, row-major, ``%.17g`` (round-trips doubles exactly)."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A[None, :]
    with open(path, "w") as fh:
        for row in A:
            fh.write(",".join("%.17g" % v for v in row))
            fh.write("\n")


def load_csv(path, shape=None) -> np.ndarray:
    with open(path) as fh:
        rows = [line.strip() for line in fh if line.strip()]
    A = np.array([[float(v) for v in r.split(",")] for r in rows], dtype=np.float64)
    if shape is not None:
        A = A.reshape(shape)
    return A


def generate_batch(D, cm: CoefficientModel, nm: NoiseModel, N: int, rng, *, seed=None, dict_index=None) -> ObservationBatch:
    """Draw ``N`` observations ``y_k = D x_k + n_k``."""
    D = np.asarray(D, dtype=np.float64)
    if D.shape[1] != cm.p:
        raise DimensionError(f"dictionary has {D.shape[1]} columns, model has p={cm.p}")
    if N < 0:
        raise ParameterError("N must be nonnegative")
    rng = as_generator(rng)
    X, supports = sample_coefficient_matrix(cm, rng, N)
    Y = D @ X
    if nm.sigma2 > 0:
        Y = Y + nm.sigma * rng.standard_normal(Y.shape)
    meta = {"p": cm.p, "sigma2": nm.sigma2, "model": cm.describe()}
    if isinstance(cm, SparseUniform):
        meta["s"] = cm.s
    return ObservationBatch(Y, X, supports, dict_index, seed, meta)


# -- second-order statistics --------------------------------------------------


def coefficient_covariance(model: CoefficientModel) -> np.ndarray:
    if isinstance(model, GeneralCovariance):
        return np.array(model.sigma_x)
    return (model.s / model.p) * model.sigma_a2 * np.eye(model.p)


def snr(D, cm: CoefficientModel, nm: NoiseModel) -> float:
    """``E||D x||^2 / E||n||^2 = Tr(D Sigma_x D^T) / (m sigma^2)``."""
    D = np.asarray(D, dtype=np.float64)
    if D.shape[1] != cm.p:
        raise DimensionError("dictionary and coefficient model disagree on p")
    if nm.sigma2 <= 0:
        raise ParameterError("SNR is undefined for noiseless observations", condition="sigma2 > 0")
    m = D.shape[0]
    if isinstance(cm, SparseUniform):
        signal = (cm.s / cm.p) * cm.sigma_a2 * float(np.sum(D * D))
    else:
        signal = float(np.trace(D @ cm.sigma_x @ D.T))
    return signal / (m * nm.sigma2)


def snr_sandwich(delta_s: float, s: int, sigma_a2: float, sigma2: float, m: int):
    """Range of SNR values compatible with a RIP constant ``delta_s``."""
    if not 0 <= delta_s < 1:
        raise ParameterError(f"need 0 <= delta_s < 1, got {delta_s}", condition="0 <= delta_s < 1")
    if sigma2 <= 0:
        raise ParameterError("sigma2 must be positive", condition="sigma2 > 0")
    base = s * sigma_a2 / (m * sigma2)
    return (1 - delta_s) * base, (1 + delta_s) * base
