# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: n-gram hashing, fused AdamW step, row scatter-add.

Must stay behaviourally identical to caseline._kernels_py; the build
uses -ffp-contract=off so the float kernels round exactly like the
numpy fallbacks.
"""

from libc.math cimport sqrt
from libc.stdint cimport uint64_t, int64_t

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef uint64_t _FNV_OFFSET = 0xCBF29CE484222325ULL
cdef uint64_t _FNV_PRIME = 0x100000001B3ULL


cdef inline uint64_t _fnv_bytes(uint64_t h, const unsigned char* data,
                                Py_ssize_t n) nogil:
    cdef Py_ssize_t i
    for i in range(n):
        h = (h ^ data[i]) * _FNV_PRIME
    return h


def hash_ngrams(list tokens, hash_dim):
    """Bucket ids for all unigrams then all bigrams of a token sequence."""
    cdef Py_ssize_t n = len(tokens)
    cdef uint64_t dim = <uint64_t> hash_dim
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(
        n + (n - 1 if n > 1 else 0), dtype=np.int64)
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] heads = np.empty(
        max(n, 1), dtype=np.uint64)
    cdef list enc = [t.encode("utf-8") for t in tokens]
    cdef bytes tb
    cdef uint64_t h
    cdef Py_ssize_t i
    for i in range(n):
        tb = enc[i]
        h = _fnv_bytes(_FNV_OFFSET, <const unsigned char*> tb, len(tb))
        heads[i] = h
        out[i] = <int64_t> (h % dim)
    for i in range(n - 1):
        h = (heads[i] ^ 0x1FULL) * _FNV_PRIME
        tb = enc[i + 1]
        h = _fnv_bytes(h, <const unsigned char*> tb, len(tb))
        out[n + i] = <int64_t> (h % dim)
    return out


def adamw_step(cnp.ndarray[cnp.float64_t, ndim=1] param,
               cnp.ndarray[cnp.float64_t, ndim=1] grad,
               cnp.ndarray[cnp.float64_t, ndim=1] m,
               cnp.ndarray[cnp.float64_t, ndim=1] v,
               double lr, double beta1, double beta2, double eps,
               double weight_decay, double bias_c1, double bias_c2):
    """One decoupled-weight-decay Adam update, in place on 1-D float64 views."""
    cdef double omb1 = 1.0 - beta1
    cdef double omb2 = 1.0 - beta2
    cdef Py_ssize_t i, n = param.shape[0]
    cdef double g, mi, vi
    for i in range(n):
        g = grad[i]
        mi = beta1 * m[i] + omb1 * g
        vi = beta2 * v[i] + omb2 * (g * g)
        m[i] = mi
        v[i] = vi
        param[i] = param[i] - lr * ((mi / bias_c1) / (sqrt(vi / bias_c2) + eps)
                                    + weight_decay * param[i])


def add_outer(cnp.ndarray[cnp.float64_t, ndim=2] out,
              cnp.ndarray[cnp.int64_t, ndim=1] idx,
              cnp.ndarray[cnp.float64_t, ndim=1] vals,
              cnp.ndarray[cnp.float64_t, ndim=1] vec):
    """out[idx[i], :] += vals[i] * vec for each i, in place.  idx unique."""
    cdef Py_ssize_t i, j, nnz = idx.shape[0], w = vec.shape[0]
    cdef double s
    cdef int64_t r
    for i in range(nnz):
        r = idx[i]
        s = vals[i]
        for j in range(w):
            out[r, j] = out[r, j] + s * vec[j]
