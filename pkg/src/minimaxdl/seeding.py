"""Deterministic seed derivation.

Per-trial and per-sweep-point random streams are derived from a master seed
with the SplitMix64 finalizer, so any trial can be reproduced in isolation
and trials can run in any order. The derivation is part of the external
contract::

    z = (master + (index + 1) * 0x9E3779B97F4A7C15) mod 2**64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    seed = z ^ (z >> 31)

The derived 64-bit seed initializes ``numpy.random.PCG64``.
"""

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def derive_seed(master: int, index: int) -> int:
    if master < 0 or index < 0:
        raise ValueError("seeds and indices are unsigned")
    z = (int(master) + (int(index) + 1) * _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK))


def derived_rng(master: int, index: int) -> np.random.Generator:
    """Generator for stream ``index`` of ``master``."""
    return make_rng(derive_seed(master, index))


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an integer seed, or None (fresh entropy)."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return np.random.default_rng()
    return make_rng(int(rng))
