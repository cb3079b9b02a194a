"""p-biased Fourier analysis on {0,1}^n.

Characters are chi_i(x) = (x_i - p) / sqrt(p(1-p)), orthonormal under the
product measure mu_p.  Coefficients are indexed by subset bitmask, with the
same little-endian convention as truth tables.

Influence follows the squared-deviation definition, which carries the
p(1-p) factor: Inf_i = p(1-p) * Pr_p[f(x) != f(x xor e_i)].
:func:`flip_probability` exposes the bare probability.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .boolfn import ArityError, BooleanFunction
from .rng import as_rng

SPECTRAL_CAP = 24


def check_bias(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"bias p must lie strictly inside (0, 1), got {p}")
    return p


def _check_coord(n, i):
    if not 0 <= i < n:
        raise IndexError(f"coordinate {i} out of range for arity {n}")


def _values(f):
    if isinstance(f, BooleanFunction):
        return f.arity, f.table.astype(np.float64)
    arr = np.asarray(f, dtype=np.float64)
    n = arr.shape[0].bit_length() - 1
    if arr.ndim != 1 or arr.shape[0] != 1 << n:
        raise ArityError("real tables must have length 2**n")
    return n, arr


def biased_weights(n: int, p: float) -> np.ndarray:
    """mu_p(x) for every x in {0,1}^n, indexed like a truth table."""
    p = check_bias(p)
    w = np.ones(1, dtype=np.float64)
    for _ in range(n):
        w = np.concatenate([w * (1.0 - p), w * p])
    return w


def expectation(f, p: float) -> float:
    n, v = _values(f)
    return _backend.biased_mean(v, n, check_bias(p))


@dataclass(frozen=True)
class FourierExpansion:
    arity: int
    p: float
    coeffs: np.ndarray

    def __getitem__(self, mask: int) -> float:
        return float(self.coeffs[mask])

    def norm_sq(self) -> float:
        return float(np.dot(self.coeffs, self.coeffs))

    def sizes(self) -> np.ndarray:
        return _backend.popcounts(self.arity)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mask", "size", "coefficient"])
        for mask, (size, c) in enumerate(zip(self.sizes(), self.coeffs)):
            w.writerow([mask, int(size), format(float(c), ".17g")])
        return buf.getvalue()


def expand(f, p: float) -> FourierExpansion:
    """Fourier coefficients of ``f`` (Boolean function or real table) under mu_p."""
    p = check_bias(p)
    n, v = _values(f)
    if n > SPECTRAL_CAP:
        raise ArityError(f"arity {n} above the spectral cap {SPECTRAL_CAP}")
    return FourierExpansion(n, p, _backend.butterfly_forward(v, n, p))


def synthesize(e: FourierExpansion) -> np.ndarray:
    """Real table of sum_S e[S] chi_S."""
    return _backend.butterfly_inverse(e.coeffs, e.arity, e.p)


def character_table(n: int, mask: int, p: float) -> np.ndarray:
    """chi_S evaluated at every point, computed pointwise (no butterfly)."""
    p = check_bias(p)
    s = math.sqrt(p * (1.0 - p))
    idx = np.arange(1 << n, dtype=np.int64)
    out = np.ones(1 << n, dtype=np.float64)
    for i in range(n):
        if mask >> i & 1:
            out *= (((idx >> i) & 1) - p) / s
    return out


def inner_product(f, g, p: float) -> float:
    n, a = _values(f)
    _, b = _values(g)
    return float(np.dot(biased_weights(n, p), a * b))


# ----------------------------------------------------------------- influence

def flip_probability(f: BooleanFunction, p: float, i: int) -> float:
    """Pr_p[f(x) != f(x xor e_i)]."""
    _check_coord(f.arity, i)
    return float(_backend.flip_mass(f.table, f.arity, i, check_bias(p)))


def _influence_definition(f, p, i):
    n = f.arity
    v = f.table.astype(np.float64).reshape(-1, 2, 1 << i)
    resampled = (1.0 - p) * v[:, 0, :] + p * v[:, 1, :]
    dev = v - resampled[:, None, :]
    return _backend.biased_mean((dev * dev).reshape(-1), n, p)


def _influence_spectral(e, i):
    c = e.coeffs.reshape(-1, 2, 1 << i)[:, 1, :]
    return float(np.sum(c * c))


def influence(f: BooleanFunction, p: float, i: int, method: str = "flip") -> float:
    """Inf_i^(p)[f] by one of three routes: ``definition``, ``spectral`` or ``flip``."""
    p = check_bias(p)
    _check_coord(f.arity, i)
    if method == "definition":
        return float(_influence_definition(f, p, i))
    if method == "spectral":
        return _influence_spectral(expand(f, p), i)
    if method == "flip":
        return p * (1.0 - p) * flip_probability(f, p, i)
    raise ValueError(f"unknown influence method {method!r}")


def influences(f: BooleanFunction, p: float, method: str = "flip") -> np.ndarray:
    p = check_bias(p)
    if method == "spectral":
        e = expand(f, p)
        return np.array([_influence_spectral(e, i) for i in range(f.arity)])
    return np.array([influence(f, p, i, method) for i in range(f.arity)])


def total_influence(f: BooleanFunction, p: float, method: str = "spectral") -> float:
    """I^(p)[f]; ``spectral`` uses sum_S |S| fhat(S)^2, ``sum`` adds coordinate influences."""
    p = check_bias(p)
    if method == "spectral":
        e = expand(f, p)
        return float(np.dot(e.sizes(), e.coeffs * e.coeffs))
    if method == "sum":
        return float(np.sum(influences(f, p, "flip")))
    raise ValueError(f"unknown total-influence method {method!r}")


def flip_probabilities_batch(tables: np.ndarray, n: int, p: float) -> np.ndarray:
    """Flip probabilities for many functions at once: (N, 2**n) -> (N, n)."""
    p = check_bias(p)
    tables = np.asarray(tables)
    out = np.empty((tables.shape[0], n), dtype=np.float64)
    w = biased_weights(n - 1, p) if n >= 1 else None
    for i in range(n):
        v = tables.reshape(tables.shape[0], -1, 2, 1 << i)
        diff = (v[:, :, 0, :] != v[:, :, 1, :]).reshape(tables.shape[0], -1)
        out[:, i] = diff @ w
    return out


# ------------------------------------------------------ truncation and noise

def truncate(e: FourierExpansion, d: int, side: str = "low") -> FourierExpansion:
    if not 0 <= d <= e.arity:
        raise ValueError(f"degree {d} outside [0, {e.arity}]")
    sizes = e.sizes()
    if side == "low":
        keep = sizes <= d
    elif side == "high":
        keep = sizes > d
    else:
        raise ValueError("side must be 'low' or 'high'")
    return FourierExpansion(e.arity, e.p, np.where(keep, e.coeffs, 0.0))


def _check_delta(delta):
    delta = float(delta)
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"noise parameter must lie in [0, 1], got {delta}")
    return delta


def noise_operator(e: FourierExpansion, delta: float) -> FourierExpansion:
    """T_{delta,p}: scales the coefficient on S by delta**|S|."""
    delta = _check_delta(delta)
    return FourierExpansion(e.arity, e.p, e.coeffs * delta ** e.sizes().astype(np.float64))


def noise_operator_direct(f: BooleanFunction, p: float, delta: float) -> np.ndarray:
    """T_{delta,p} f at every point, by summing over the noisy distribution.

    Each coordinate of y is kept with probability delta and resampled from
    mu_p otherwise, so y_i = x_i with probability delta + (1-delta)*mu_p(x_i).
    Exact; arity at most 10.
    """
    p = check_bias(p)
    delta = _check_delta(delta)
    n = f.arity
    if n > 10:
        raise ArityError("direct noise evaluation is capped at arity 10")
    out = np.empty(1 << n, dtype=np.float64)
    idx = np.arange(1 << n, dtype=np.int64)
    vals = f.table.astype(np.float64)
    for x in range(1 << n):
        same = ~((idx ^ x)[:, None] >> np.arange(n) & 1).astype(bool)
        xb = (x >> np.arange(n)) & 1
        keep_prob = delta + (1.0 - delta) * np.where(xb == 1, p, 1.0 - p)
        prob = np.where(same, keep_prob, 1.0 - keep_prob).prod(axis=1)
        out[x] = float(np.dot(prob, vals))
    return out


def noise_operator_mc(f: BooleanFunction, p: float, delta: float, samples: int, rng):
    """Monte-Carlo T_{delta,p} f at every point; returns (estimates, standard errors)."""
    p = check_bias(p)
    delta = _check_delta(delta)
    rng = as_rng(rng)
    n = f.arity
    if n > 6:
        raise ArityError("Monte-Carlo noise evaluation is capped at arity 6")
    est = np.empty(1 << n)
    se = np.empty(1 << n)
    for x in range(1 << n):
        y = _noisy_copies(np.full(samples, x, dtype=np.int64), n, p, delta, rng)
        v = f.table[y].astype(np.float64)
        est[x] = v.mean()
        se[x] = v.std(ddof=1) / math.sqrt(samples) if samples > 1 else 0.0
    return est, se


def _noisy_copies(x, n, p, delta, rng):
    y = x.copy()
    for i in range(n):
        resample = rng.random(x.shape[0]) >= delta
        fresh = (rng.random(x.shape[0]) < p).astype(np.int64)
        bit = np.where(resample, fresh, (x >> i) & 1)
        y = (y & ~np.int64(1 << i)) | (bit << i)
    return y


def noise_sensitivity(f: BooleanFunction, p: float, delta: float, method: str = "spectral",
                      samples: int = 100_000, rng=None) -> float:
    """NS_{delta,p}[f] = Pr[f(x) != f(y)] with y ~ N_{delta,p}(x).

    Spectral route: for Boolean f, Pr[f(x) != f(y)] = 2 E[f] - 2 E[f(x) f(y)] and
    E[f(x) f(y)] = <f, T f> = sum_S delta**|S| fhat(S)**2.
    """
    p = check_bias(p)
    delta = _check_delta(delta)
    if method == "spectral":
        e = expand(f, p)
        stab = float(np.dot(delta ** e.sizes().astype(np.float64), e.coeffs * e.coeffs))
        return max(0.0, 2.0 * e[0] - 2.0 * stab)
    if method == "mc":
        return noise_sensitivity_mc(f, p, delta, samples, rng)[0]
    raise ValueError(f"unknown noise-sensitivity method {method!r}")


def noise_sensitivity_mc(f: BooleanFunction, p: float, delta: float, samples: int, rng):
    """Monte-Carlo estimate and standard error of NS_{delta,p}[f]."""
    p = check_bias(p)
    delta = _check_delta(delta)
    rng = as_rng(rng)
    n = f.arity
    x = np.zeros(samples, dtype=np.int64)
    for i in range(n):
        x |= (rng.random(samples) < p).astype(np.int64) << i
    y = _noisy_copies(x, n, p, delta, rng)
    d = (f.table[x] != f.table[y]).astype(np.float64)
    se = d.std(ddof=1) / math.sqrt(samples) if samples > 1 else 0.0
    return float(d.mean()), float(se)
