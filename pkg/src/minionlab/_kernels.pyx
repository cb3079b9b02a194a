# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in ``_kernels_py``.

Same signatures and the same per-coordinate summation order, so results agree
with the numpy path to the last few ulps.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def butterfly_forward(values, int n, double p):
    cdef double[::1] out = np.array(values, dtype=np.float64, copy=True)
    cdef double s = sqrt(p * (1.0 - p))
    cdef double q = 1.0 - p
    cdef Py_ssize_t size = out.shape[0]
    cdef Py_ssize_t half, block, base, k
    cdef double lo, hi
    cdef int i
    for i in range(n):
        half = (<Py_ssize_t>1) << i
        block = half << 1
        for base in range(0, size, block):
            for k in range(base, base + half):
                lo = out[k]
                hi = out[k + half]
                out[k] = q * lo + p * hi
                out[k + half] = s * (hi - lo)
    return np.asarray(out)


def butterfly_inverse(coeffs, int n, double p):
    cdef double[::1] out = np.array(coeffs, dtype=np.float64, copy=True)
    cdef double s = sqrt(p * (1.0 - p))
    cdef double a_lo = p / s
    cdef double a_hi = (1.0 - p) / s
    cdef Py_ssize_t size = out.shape[0]
    cdef Py_ssize_t half, block, base, k
    cdef double mean, dev
    cdef int i
    for i in range(n):
        half = (<Py_ssize_t>1) << i
        block = half << 1
        for base in range(0, size, block):
            for k in range(base, base + half):
                mean = out[k]
                dev = out[k + half]
                out[k] = mean - a_lo * dev
                out[k + half] = mean + a_hi * dev
    return np.asarray(out)


cdef double _reduce_mean(double[::1] v, int n, double p) nogil:
    # in place: after pass i, v[0:size>>i] holds means over the first i coordinates
    cdef double q = 1.0 - p
    cdef Py_ssize_t size = (<Py_ssize_t>1) << n
    cdef Py_ssize_t k
    cdef int i
    for i in range(n):
        size >>= 1
        for k in range(size):
            v[k] = q * v[2 * k] + p * v[2 * k + 1]
    return v[0]


def biased_mean(values, int n, double p):
    cdef double[::1] v = np.array(values, dtype=np.float64, copy=True)
    return _reduce_mean(v, n, p)


def flip_mass(const cnp.uint8_t[::1] table, int n, int i, double p):
    cdef Py_ssize_t half = (<Py_ssize_t>1) << i
    cdef Py_ssize_t size = table.shape[0]
    cdef Py_ssize_t base, k, out = 0
    cdef double[::1] diff = np.empty(size >> 1, dtype=np.float64)
    for base in range(0, size, half << 1):
        for k in range(base, base + half):
            diff[out] = 1.0 if table[k] != table[k + half] else 0.0
            out += 1
    return _reduce_mean(diff, n - 1, p)


def minor_table(const cnp.uint8_t[::1] table, image, int m):
    cdef cnp.int64_t[::1] img = np.ascontiguousarray(image, dtype=np.int64)
    cdef Py_ssize_t nsrc = img.shape[0]
    cdef Py_ssize_t size = (<Py_ssize_t>1) << m
    cdef cnp.uint8_t[::1] out = np.empty(size, dtype=np.uint8)
    # contribution of target bit b to the source index
    cdef cnp.int64_t[::1] contrib = np.zeros(max(m, 1), dtype=np.int64)
    cdef Py_ssize_t j, a, idx
    cdef int b
    for j in range(nsrc):
        contrib[img[j]] |= (<cnp.int64_t>1) << j
    for a in range(size):
        idx = 0
        for b in range(m):
            if (a >> b) & 1:
                idx |= contrib[b]
        out[a] = table[idx]
    return np.asarray(out)


def pivot_counts(const cnp.uint8_t[::1] table, int n):
    cdef Py_ssize_t width = max(n, 1)
    cdef cnp.int64_t[:, ::1] counts = np.zeros((n, width), dtype=np.int64)
    cdef Py_ssize_t size = table.shape[0]
    cdef Py_ssize_t x, bit
    cdef int i, pc
    for x in range(size):
        if table[x]:
            continue
        pc = 0
        bit = x
        while bit:
            bit &= bit - 1
            pc += 1
        for i in range(n):
            if not (x >> i) & 1 and table[x | ((<Py_ssize_t>1) << i)]:
                counts[i, pc] += 1
    return np.asarray(counts)


def subset_zeta(values, int n):
    cdef double[::1] out = np.array(values, dtype=np.float64, copy=True)
    cdef Py_ssize_t size = out.shape[0]
    cdef Py_ssize_t half, base, k
    cdef int i
    for i in range(n):
        half = (<Py_ssize_t>1) << i
        for base in range(0, size, half << 1):
            for k in range(base, base + half):
                out[k + half] += out[k]
    return np.asarray(out)
