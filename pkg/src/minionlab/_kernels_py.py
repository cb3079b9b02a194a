"""Numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_kernels.pyx``.
Tables are little-endian: bit ``j`` of an index is the value of coordinate ``j``.
"""
import numpy as np


def _pairs(arr, i):
    # view with axis 1 selecting the value of coordinate i
    return arr.reshape(-1, 2, 1 << i)


def butterfly_forward(values, n, p):
    """p-biased Fourier transform of a length-2**n real table."""
    out = np.array(values, dtype=np.float64, copy=True)
    s = np.sqrt(p * (1.0 - p))
    q = 1.0 - p
    for i in range(n):
        v = _pairs(out, i)
        lo = v[:, 0, :].copy()
        hi = v[:, 1, :]
        v[:, 0, :] = q * lo + p * hi
        v[:, 1, :] = s * (hi - lo)
    return out


def butterfly_inverse(coeffs, n, p):
    out = np.array(coeffs, dtype=np.float64, copy=True)
    s = np.sqrt(p * (1.0 - p))
    a_lo = p / s
    a_hi = (1.0 - p) / s
    for i in range(n):
        v = _pairs(out, i)
        mean = v[:, 0, :].copy()
        dev = v[:, 1, :].copy()
        v[:, 0, :] = mean - a_lo * dev
        v[:, 1, :] = mean + a_hi * dev
    return out


def biased_mean(values, n, p):
    """Expectation of a real table under the product p-biased measure."""
    v = np.array(values, dtype=np.float64, copy=True)
    q = 1.0 - p
    for _ in range(n):
        v = q * v[0::2] + p * v[1::2]
    return float(v[0])


def flip_mass(table, n, i, p):
    """mu_p-measure of the inputs x with f(x) != f(x xor e_i)."""
    t = np.asarray(table)
    v = _pairs(t, i)
    diff = (v[:, 0, :] != v[:, 1, :]).astype(np.float64).reshape(-1)
    return biased_mean(diff, n - 1, p)


def minor_table(table, image, m):
    """Truth table of g(a) = f(a[image[0]], ..., a[image[n-1]])."""
    t = np.asarray(table)
    a = np.arange(1 << m, dtype=np.int64)
    idx = np.zeros(1 << m, dtype=np.int64)
    for j, target in enumerate(np.asarray(image, dtype=np.int64)):
        idx |= ((a >> int(target)) & 1) << j
    return t[idx]


_POPCOUNT8 = np.array([bin(b).count("1") for b in range(256)], dtype=np.int64)


def popcounts(n):
    idx = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.int64)
    while idx.any():
        out += _POPCOUNT8[idx & 0xFF]
        idx >>= 8
    return out


def pivot_counts(table, n):
    """counts[i, s] = #{S not containing i, |S| = s : f(S) = 0 and f(S + i) = 1}."""
    t = np.asarray(table)
    pc = popcounts(n)
    counts = np.zeros((n, max(n, 1)), dtype=np.int64)
    for i in range(n):
        v = _pairs(t, i)
        piv = ((v[:, 0, :] == 0) & (v[:, 1, :] == 1)).reshape(-1)
        sizes = _pairs(pc, i)[:, 0, :].reshape(-1)
        counts[i] = np.bincount(sizes[piv], minlength=max(n, 1))[: max(n, 1)]
    return counts


def subset_zeta(values, n):
    """out[x] = sum of values[S] over all S contained in x."""
    out = np.array(values, dtype=np.float64, copy=True)
    for i in range(n):
        v = _pairs(out, i)
        v[:, 1, :] += v[:, 0, :]
    return out
