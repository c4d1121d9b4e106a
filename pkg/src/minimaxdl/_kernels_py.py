"""Pure numpy implementations of the hot kernels.

Same signatures and return conventions as the compiled ``_kernels`` module;
used when the extension is unavailable or ``MINIMAXDL_PURE_PYTHON`` is set.
"""

from itertools import islice

import numpy as np

_CHUNK = 1 << 15


def colex_combinations(p, s):
    """Yield the s-subsets of ``range(p)`` as sorted tuples in colex order."""
    if s < 0 or s > p:
        return
    c = list(range(s))
    while True:
        yield tuple(c)
        i = 0
        while i < s and c[i] + 1 == (c[i + 1] if i + 1 < s else p):
            i += 1
        if i == s:
            return
        c[i] += 1
        c[:i] = range(i)


def min_pairwise_hamming(B):
    """Minimum Hamming distance between distinct rows of a +-1 matrix.

    Returns -1 when there are fewer than two rows.
    """
    B = np.asarray(B)
    P, d = B.shape
    if P < 2:
        return -1
    Bf = B.astype(np.int64)
    best = d
    for start in range(0, P - 1, 512):
        stop = min(start + 512, P)
        # inner products against every later row; hamming = (d - <b, b'>) / 2
        G = Bf[start:stop] @ Bf[start + 1:].T
        rows = np.arange(start, stop)[:, None]
        cols = np.arange(start + 1, P)[None, :]
        G = np.where(cols > rows, G, -d - 1)
        best = min(best, int((d - G.max()) // 2))
    return best


def pairwise_sq_dist_extremes(M):
    """(min, max) of squared Euclidean distances between distinct rows of M.

    Returns (inf, -inf) when there are fewer than two rows.
    """
    M = np.ascontiguousarray(M, dtype=np.float64)
    L = M.shape[0]
    lo, hi = np.inf, -np.inf
    for l in range(L - 1):
        diff = M[l + 1:] - M[l]
        d = np.einsum("ij,ij->i", diff, diff)
        lo = min(lo, float(d.min()))
        hi = max(hi, float(d.max()))
    return lo, hi


def rip_extremes(G, s):
    """Worst restricted-isometry deviation over all s-subsets.

    ``G`` is the p x p Gram matrix. Returns ``(delta, worst_support, count)``
    where ``worst_support`` is the first subset in colex order attaining
    ``delta = max_S max(lam_max(G_SS) - 1, 1 - lam_min(G_SS))``.
    """
    G = np.asarray(G, dtype=np.float64)
    p = G.shape[0]
    best = -np.inf
    worst = None
    count = 0
    it = colex_combinations(p, s)
    while True:
        block = list(islice(it, _CHUNK))
        if not block:
            break
        idx = np.array(block, dtype=np.intp).reshape(len(block), s)
        sub = G[idx[:, :, None], idx[:, None, :]]
        lam = np.linalg.eigvalsh(sub)
        dev = np.maximum(lam[:, -1] - 1.0, 1.0 - lam[:, 0])
        k = int(np.argmax(dev))
        if dev[k] > best:
            best = float(dev[k])
            worst = block[k]
        count += len(block)
    return best, worst, count
