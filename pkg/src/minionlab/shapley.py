"""Shapley values of monotone Boolean functions.

Phi_i[f] is the probability that coordinate i is the pivot when the bits of
the all-zeros input are switched on one at a time in a uniformly random order.
Grouping permutations by the set S switched on before i gives the subset form

    Phi_i = sum_{S not containing i} |S|! (n-1-|S|)! / n! * [f(1_S) = 0, f(1_{S+i}) = 1].
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _backend
from .boolfn import ArityError, BooleanFunction
from .fourier import flip_probability
from .rng import make_rng


class NotMonotoneError(ValueError):
    pass


@dataclass
class ShapleyVector:
    arity: int
    values: np.ndarray
    degenerate: bool = False
    stderr: np.ndarray | None = None
    exact: tuple | None = None  # Fractions, when computed exactly

    def __getitem__(self, i):
        return float(self.values[i])

    def total(self) -> float:
        return float(np.sum(self.values))


def is_monotone(f: BooleanFunction) -> bool:
    """True iff f(x) <= f(x with x_i set to 1) for every x and i."""
    n = f.arity
    for i in range(n):
        v = f.table.reshape(-1, 2, 1 << i)
        if np.any(v[:, 0, :] > v[:, 1, :]):
            return False
    return True


def _require_monotone(f):
    if f.arity > 20:
        raise ArityError("Shapley values are capped at arity 20")
    if not is_monotone(f):
        raise NotMonotoneError("Shapley values are defined for monotone functions only")


@lru_cache(maxsize=None)
def factorial_weights(n: int) -> tuple:
    """Exact s!(n-1-s)!/n! for s = 0..n-1."""
    return tuple(Fraction(math.factorial(s) * math.factorial(n - 1 - s), math.factorial(n)) for s in range(n))


def shapley_exact(f: BooleanFunction) -> ShapleyVector:
    """Exact Shapley values by summing factorial weights over pivotal subsets."""
    _require_monotone(f)
    n = f.arity
    if f.is_constant:
        return ShapleyVector(n, np.zeros(n), degenerate=True, exact=tuple(Fraction(0) for _ in range(n)))
    counts = _backend.pivot_counts(f.table, n)
    w = factorial_weights(n)
    exact = tuple(sum((int(counts[i, s]) * w[s] for s in range(n)), Fraction(0)) for i in range(n))
    return ShapleyVector(n, np.array([float(x) for x in exact]), exact=exact)


def _mc_chunk(table, n, trials, rng):
    hits = np.zeros(n, dtype=np.int64)
    perms = np.argsort(rng.random((trials, n)), axis=1)
    state = np.zeros(trials, dtype=np.int64)
    done = np.zeros(trials, dtype=bool)
    for step in range(n):
        coord = perms[:, step]
        nxt = state | (np.int64(1) << coord)
        pivot = (~done) & (table[state] == 0) & (table[nxt] == 1)
        np.add.at(hits, coord[pivot], 1)
        done |= pivot
        state = nxt
    return hits


def shapley_mc(f: BooleanFunction, trials: int, seed: int = 0, threads: int = 1,
               chunk: int = 10_000) -> ShapleyVector:
    """Monte-Carlo Shapley values from random switch-on orders.

    Chunk ``c`` uses ``make_rng(seed, c)``; chunks are summed in index order so
    the estimate does not depend on ``threads``.
    """
    _require_monotone(f)
    n = f.arity
    if f.is_constant:
        return ShapleyVector(n, np.zeros(n), degenerate=True, stderr=np.zeros(n))
    sizes = [min(chunk, trials - start) for start in range(0, trials, chunk)]

    def run(c):
        return _mc_chunk(f.table, n, sizes[c], make_rng(seed, c))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(c) for c in range(len(sizes))]
    hits = sum(parts, np.zeros(n, dtype=np.int64))
    phat = hits / trials
    se = np.sqrt(phat * (1.0 - phat) / max(trials - 1, 1))
    return ShapleyVector(n, phat, stderr=se)


def shapley_influence_integral(f: BooleanFunction, i: int, quadrature_points: int = 64) -> float:
    """Integral over p in (0,1) of Pr_p[f(x) != f(x xor e_i)].

    The integrand is a polynomial in p of degree at most n-1, so Gauss-Legendre
    with at least n/2 nodes is exact; 64 nodes covers every supported arity.
    """
    _require_monotone(f)
    if not 0 <= i < f.arity:
        raise IndexError(f"coordinate {i} out of range for arity {f.arity}")
    nodes, weights = np.polynomial.legendre.leggauss(max(quadrature_points, 1))
    ps = 0.5 * (nodes + 1.0)
    vals = np.array([flip_probability(f, p, i) for p in ps])
    return float(0.5 * np.dot(weights, vals))


def shapley_table(f: BooleanFunction, trials: int = 20_000, seed: int = 0, threads: int = 1):
    """Rows (coordinate, phi_exact, phi_mc, phi_integral)."""
    ex = shapley_exact(f)
    mc = shapley_mc(f, trials, seed=seed, threads=threads)
    rows = []
    for i in range(f.arity):
        integral = 0.0 if ex.degenerate else shapley_influence_integral(f, i)
        rows.append((i, ex[i], mc[i], integral))
    return rows


def regular_coefficients_shapley_audit(rep, tau: float | None = None):
    """(max same-size coefficient gap, max Shapley value of the sign function).

    When ``tau`` is given, a third entry says whether the gap is within ``tau``.
    """
    from .ptf import sign_function

    poly = rep.poly
    by_size: dict = {}
    for mask in range(1, 1 << poly.arity):
        by_size.setdefault(bin(mask).count("1"), []).append(poly.coeffs.get(mask, 0.0))
    gap = 0.0
    for size, vals in by_size.items():
        if size <= poly.degree and vals:
            gap = max(gap, max(vals) - min(vals))
    sv = shapley_exact(sign_function(rep))
    top = float(np.max(sv.values)) if sv.arity else 0.0
    if tau is None:
        return gap, top
    return gap, top, gap <= tau
