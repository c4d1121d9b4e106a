# cython: language_level=3
"""Compiled hot kernels. See ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, fabs
from libc.stdlib cimport malloc, free
from libc.stdint cimport uint64_t
from scipy.linalg.cython_lapack cimport dsyev

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def _pack_rows(B):
    """Pack a +-1 (P, d) matrix into (P, ceil(d/64)) uint64 words, bit = (b < 0)."""
    B = np.asarray(B)
    P, d = B.shape
    nw = (d + 63) // 64
    bits = np.zeros((P, nw * 64), dtype=np.uint8)
    bits[:, :d] = B < 0
    packed = np.packbits(bits.reshape(P, nw, 8, 8)[:, :, ::-1, :], axis=-1, bitorder="little")
    return np.ascontiguousarray(packed.reshape(P, nw * 8)).view(np.uint64)


def min_pairwise_hamming(B):
    cdef Py_ssize_t P = B.shape[0]
    cdef Py_ssize_t d = B.shape[1]
    if P < 2:
        return -1
    cdef uint64_t[:, ::1] W = _pack_rows(B)
    cdef Py_ssize_t nw = W.shape[1]
    cdef Py_ssize_t i, j, k
    cdef long best = d
    cdef long h
    with nogil:
        for i in range(P - 1):
            for j in range(i + 1, P):
                h = 0
                for k in range(nw):
                    h += __builtin_popcountll(W[i, k] ^ W[j, k])
                if h < best:
                    best = h
    return int(best)


def pairwise_sq_dist_extremes(M):
    cdef double[:, ::1] A = np.ascontiguousarray(M, dtype=np.float64)
    cdef Py_ssize_t L = A.shape[0]
    cdef Py_ssize_t n = A.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double lo = INFINITY
    cdef double hi = -INFINITY
    cdef double acc, t
    with nogil:
        for i in range(L - 1):
            for j in range(i + 1, L):
                acc = 0.0
                for k in range(n):
                    t = A[i, k] - A[j, k]
                    acc = acc + t * t
                if acc < lo:
                    lo = acc
                if acc > hi:
                    hi = acc
    return lo, hi


def rip_extremes(G, int s):
    cdef double[:, ::1] Gm = np.ascontiguousarray(G, dtype=np.float64)
    cdef int p = Gm.shape[0]
    if s < 1 or s > p:
        raise ValueError("need 1 <= s <= p")
    cdef int lwork = 3 * s + 64
    cdef int info = 0
    cdef char jobz = b'N'
    cdef char uplo = b'L'
    cdef int n = s
    cdef int i, j, a
    cdef int *c = <int *> malloc((s + 1) * sizeof(int))
    cdef int *worst = <int *> malloc(s * sizeof(int))
    cdef double *sub = <double *> malloc(s * s * sizeof(double))
    cdef double *w = <double *> malloc(s * sizeof(double))
    cdef double *work = <double *> malloc(lwork * sizeof(double))
    cdef double best = -INFINITY
    cdef double dev, rad, bound
    cdef long long count = 0
    if not c or not worst or not sub or not w or not work:
        free(c); free(worst); free(sub); free(w); free(work)
        raise MemoryError()
    try:
        with nogil:
            for i in range(s):
                c[i] = i
            c[s] = p
            while True:
                # Gershgorin: every eigenvalue lies within rad of some G_ii, so
                # max |lambda - 1| <= bound; skip the eigensolve if it cannot win
                bound = 0.0
                for i in range(s):
                    rad = fabs(Gm[c[i], c[i]] - 1.0)
                    for j in range(s):
                        if j != i:
                            rad += fabs(Gm[c[i], c[j]])
                    if rad > bound:
                        bound = rad
                if bound * (1.0 + 1e-12) + 1e-15 > best:
                    # G[S, S] in column-major order (symmetric, so layout is moot)
                    for i in range(s):
                        for j in range(s):
                            sub[i * s + j] = Gm[c[i], c[j]]
                    dsyev(&jobz, &uplo, &n, sub, &n, w, work, &lwork, &info)
                    if info != 0:
                        break
                    dev = w[s - 1] - 1.0
                    if 1.0 - w[0] > dev:
                        dev = 1.0 - w[0]
                else:
                    dev = best
                if dev > best:
                    best = dev
                    for i in range(s):
                        worst[i] = c[i]
                count += 1
                # colex successor
                a = 0
                while a < s and c[a] + 1 == c[a + 1]:
                    a += 1
                if a == s:
                    break
                c[a] += 1
                for i in range(a):
                    c[i] = i
        if info != 0:
            raise ArithmeticError(f"dsyev failed with info={info}")
        return best, tuple(worst[i] for i in range(s)), count
    finally:
        free(c); free(worst); free(sub); free(w); free(work)
