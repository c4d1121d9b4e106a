"""Kernel backend selection.

The compiled extension ``minimaxdl._kernels`` is used when importable;
otherwise, or when the environment variable ``MINIMAXDL_PURE_PYTHON`` is set
to a non-empty value other than ``0``, the numpy implementations in
``minimaxdl._kernels_py`` are used. Both expose:

``min_pairwise_hamming(B)``
    minimum Hamming distance between rows of a +-1 matrix (-1 if < 2 rows)
``pairwise_sq_dist_extremes(M)``
    (min, max) squared distances between rows of a float matrix
``rip_extremes(G, s)``
    (delta, worst_support, count) over all s-subsets in colex order
"""

import os

from . import _kernels_py

_FORCE_PY = os.environ.get("MINIMAXDL_PURE_PYTHON", "") not in ("", "0")

try:
    if _FORCE_PY:
        raise ImportError("pure python backend requested")
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

min_pairwise_hamming = _impl.min_pairwise_hamming
pairwise_sq_dist_extremes = _impl.pairwise_sq_dist_extremes
rip_extremes = _impl.rip_extremes
colex_combinations = _kernels_py.colex_combinations


def available_backends():
    """Map backend name -> module for every backend importable here."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out


def get_backend(name=None):
    if name is None:
        return _impl
    backends = available_backends()
    if name not in backends:
        raise ImportError(f"kernel backend {name!r} is not available")
    return backends[name]
