"""Dictionary learners and the Monte Carlo MSE harness.

``algorithm1`` is the thresholding scheme for the square case ``D0 = I``:
decode coefficients entrywise, correlate them with the observations, and
project every column onto the unit ball. ``oracle_ls`` is a least-squares
baseline that is handed the true coefficients.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from .errors import DimensionError, ParameterError
from .geometry import project_columns
from .model import CoefficientModel, NoiseModel, ObservationBatch, SparseUniform, generate_batch
from .seeding import derived_rng

THRESHOLD = 0.5


@dataclass
class LearnedDictionary:
    D_hat: np.ndarray
    clipped_columns: int = 0
    coeff_mismatch_count: Optional[int] = None


def threshold_decode(Y, threshold: float = THRESHOLD) -> np.ndarray:
    """Entrywise ``1 if y > t``, ``-1 if y < -t``, else ``0`` (as int8)."""
    Y = np.asarray(Y, dtype=np.float64)
    out = np.zeros(Y.shape, dtype=np.int8)
    out[Y > threshold] = 1
    out[Y < -threshold] = -1
    return out


def algorithm1(Y, s: int, X_true=None, *, threshold: float = THRESHOLD) -> LearnedDictionary:
    """Thresholding learner for ``m = p``.

    ``X_true`` is only used to count decoding mismatches for diagnostics; it
    never enters the estimate.
    """
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2:
        raise DimensionError("Y must be a 2-D (m, N) array")
    p, N = Y.shape
    if N < 1 or s < 1:
        raise ParameterError("need N >= 1 and s >= 1")
    X_hat = threshold_decode(Y, threshold)
    D_tilde = (p / (N * s)) * (Y @ X_hat.T.astype(np.float64))
    D_hat, clipped = project_columns(D_tilde)
    mismatches = None
    if X_true is not None:
        X_true = np.asarray(X_true)
        if X_true.shape != X_hat.shape:
            raise DimensionError("X_true must have the shape of Y (square case)")
        mismatches = int(np.count_nonzero(X_hat != X_true))
    return LearnedDictionary(D_hat, clipped, mismatches)


def oracle_ls(Y, X) -> LearnedDictionary:
    """``Y X^T (X X^T)^-1`` with columns then clipped to the unit ball."""
    Y = np.asarray(Y, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if Y.shape[1] != X.shape[1]:
        raise DimensionError("Y and X disagree on N")
    p, N = X.shape
    gram = X @ X.T
    if N < p or np.linalg.matrix_rank(gram) < p:
        raise ParameterError("X X^T is singular; need N >= p and full-rank coefficients", condition="rank(X X^T) = p")
    D = np.linalg.solve(gram, X @ Y.T).T
    D_hat, clipped = project_columns(D)
    return LearnedDictionary(D_hat, clipped)


def constant_estimator(D) -> Callable[[ObservationBatch], np.ndarray]:
    """Estimator that ignores the data and always returns ``D``."""
    D = np.array(D, dtype=np.float64)
    return lambda batch: D


def make_learner(name: str, s: Optional[int] = None) -> Callable[[ObservationBatch], LearnedDictionary]:
    """Batch -> LearnedDictionary callables for the named learners."""
    if name == "algorithm1":
        if s is None:
            raise ParameterError("algorithm1 needs the sparsity s")
        return lambda batch: algorithm1(batch.Y, s)
    if name == "oracle_ls":
        return lambda batch: oracle_ls(batch.Y, batch.X)
    raise ParameterError(f"unknown learner {name!r}")


LEARNERS = ("algorithm1", "oracle_ls")


def monte_carlo_mse(
    learner: Callable[[ObservationBatch], object],
    D_true,
    cm: CoefficientModel,
    nm: NoiseModel,
    N: int,
    trials: int,
    master_seed: int,
    threads: int = 1,
):
    """Mean and standard error of ``||D_hat - D_true||_F^2`` over independent batches.

    Trial ``t`` draws its batch from ``derived_rng(master_seed, t)``; the
    result does not depend on ``threads``.
    """
    if trials < 2:
        raise ParameterError("need trials >= 2 for a standard error")
    D_true = np.asarray(D_true, dtype=np.float64)

    def one(t):
        batch = generate_batch(D_true, cm, nm, N, derived_rng(master_seed, t))
        est = learner(batch)
        D_hat = getattr(est, "D_hat", est)
        return float(np.sum((D_hat - D_true) ** 2))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            errs = list(pool.map(one, range(trials)))
    else:
        errs = [one(t) for t in range(trials)]
    mean = math.fsum(errs) / trials
    var = math.fsum((e - mean) ** 2 for e in errs) / (trials - 1)
    return mean, math.sqrt(var / trials)
