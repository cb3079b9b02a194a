"""Random 2-to-1 minors and the pull-back distribution D_{p,2m}.

D_{p,2m} is the law of z = pi^{-1}(x): draw a uniform 2-to-1 map
pi : [2m] -> [m] and x ~ mu_{p,m}, then set z_j = x_{pi(j)}.  A point with
2k ones is consistent with a fraction C(m,k)/C(2m,2k) of all 2-to-1 maps,
which gives the closed form p^k (1-p)^(m-k) C(m,k)/C(2m,2k).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _backend
from .boolfn import (
    ArityError,
    BooleanFunction,
    MinorMap,
    TwoToOneMap,
    apply_minor,
    enumerate_2to1_maps,
    identify_last_pair,
    random_2to1_map,
)
from .fourier import check_bias, flip_probabilities_batch, influence, total_influence
from .rng import as_rng, make_rng

EXACT_CAP = 6


def consistency_fraction(m: int, k: int) -> Fraction:
    """Pr_pi[a fixed z with 2k ones is consistent with pi] = C(m,k)/C(2m,2k), exactly."""
    return Fraction(math.comb(m, k), math.comb(2 * m, 2 * k))


def pullback_mass(z, p: float, m: int | None = None) -> float:
    """D_{p,2m}(z) by the closed form; zero for odd popcount."""
    p = check_bias(p)
    z = tuple(int(b) for b in z)
    if m is None:
        if len(z) % 2:
            raise ArityError("pull-back points have even length")
        m = len(z) // 2
    if len(z) != 2 * m:
        raise ArityError(f"point of length {len(z)} for dimension 2*{m}")
    ones = sum(z)
    if ones % 2:
        return 0.0
    k = ones // 2
    return p ** k * (1.0 - p) ** (m - k) * float(consistency_fraction(m, k))


def pullback_mass_table(m: int, p: float) -> np.ndarray:
    """Closed-form mass of every point of {0,1}^{2m}, indexed like a truth table."""
    p = check_bias(p)
    if m > 11:
        raise ArityError("mass tables are capped at 2m = 22")
    pc = _backend.popcounts(2 * m)
    by_k = np.array([p ** k * (1.0 - p) ** (m - k) * float(consistency_fraction(m, k)) for k in range(m + 1)])
    out = np.zeros(pc.shape[0])
    even = pc % 2 == 0
    out[even] = by_k[pc[even] // 2]
    return out


def pullback_mass_by_enumeration(m: int, p: float) -> np.ndarray:
    """Mass of every point computed from all 2-to-1 maps (m <= 4).

    For each map, the pulled-back image of x in {0,1}^m carries mu_p(x);
    averaging over maps gives D_{p,2m} without using the closed form.
    """
    p = check_bias(p)
    if m > 4:
        raise ArityError("exhaustive enumeration is capped at m = 4")
    maps = enumerate_2to1_maps(m)
    out = np.zeros(1 << (2 * m))
    xs = np.arange(1 << m, dtype=np.int64)
    ones = _backend.popcounts(m)
    mu = p ** ones * (1.0 - p) ** (m - ones)
    for pi in maps:
        z = np.zeros(1 << m, dtype=np.int64)
        for j, target in enumerate(pi.image):
            z |= ((xs >> target) & 1) << j
        np.add.at(out, z, mu)
    return out / len(maps)


def sample_pullback(m: int, p: float, rng, size: int | None = None):
    """Draw from D_{p,2m}; a single tuple, or an int array of ``size`` indices."""
    p = check_bias(p)
    rng = as_rng(rng)
    if size is None:
        pi = random_2to1_map(m, rng)
        x = (rng.random(m) < p).astype(int)
        return tuple(int(x[pi.image[j]]) for j in range(2 * m))
    labels = np.tile(np.repeat(np.arange(m), 2), (size, 1))
    labels = rng.permuted(labels, axis=1)
    x = (rng.random((size, m)) < p).astype(np.int64)
    z = np.take_along_axis(x, labels, axis=1)
    return z @ (np.int64(1) << np.arange(2 * m, dtype=np.int64))


@dataclass
class DensityAudit:
    m: int
    p: float
    min_ratio: float
    argmin: tuple
    max_ratio: float
    argmax: tuple


def density_ratio_audit(m: int, p: float) -> DensityAudit:
    """min and max of D_p(z) / mu_p(z) over even-popcount z in {0,1}^{2m}."""
    p = check_bias(p)
    if m > EXACT_CAP:
        raise ArityError(f"density audit is exhaustive and capped at m = {EXACT_CAP}")
    mass = pullback_mass_table(m, p)
    pc = _backend.popcounts(2 * m)
    mu = p ** pc * (1.0 - p) ** (2 * m - pc)
    even = np.flatnonzero(pc % 2 == 0)
    ratio = mass[even] / mu[even]
    lo, hi = int(np.argmin(ratio)), int(np.argmax(ratio))
    point = lambda idx: tuple((int(idx) >> j) & 1 for j in range(2 * m))  # noqa: E731
    return DensityAudit(m, p, float(ratio[lo]), point(even[lo]), float(ratio[hi]), point(even[hi]))


# ------------------------------------------------------------------ gluing

def gluing_bound_audit(f: BooleanFunction, p: float):
    """(lhs, rhs) for identifying the last two coordinates of f.

    lhs = Inf[f^pi, m-2] and rhs = min(p,1-p) Inf[f, m-2] - Inf[f, m-1] / min(p,1-p)
    (0-based); the gluing inequality asserts lhs >= rhs.
    """
    p = check_bias(p)
    m = f.arity
    if m < 2:
        raise ArityError("gluing needs arity >= 2")
    g = apply_minor(f, identify_last_pair(m))
    q = min(p, 1.0 - p)
    lhs = influence(g, p, m - 2)
    rhs = q * influence(f, p, m - 2) - influence(f, p, m - 1) / q
    return lhs, rhs


def gluing_bound_batch(tables: np.ndarray, m: int, p: float):
    """Vectorized :func:`gluing_bound_audit` over rows of a (N, 2**m) table matrix."""
    p = check_bias(p)
    tables = np.asarray(tables, dtype=np.uint8)
    pq = p * (1.0 - p)
    q = min(p, 1.0 - p)
    flips = flip_probabilities_batch(tables, m, p)
    # the identified minor reads f at inputs whose last two bits agree
    v = tables.reshape(tables.shape[0], 2, 2, 1 << (m - 2))
    glued = np.concatenate([v[:, 0, 0, :], v[:, 1, 1, :]], axis=1)
    minor_flip = flip_probabilities_batch(glued, m - 1, p)[:, m - 2]
    lhs = pq * minor_flip
    rhs = q * pq * flips[:, m - 2] - pq * flips[:, m - 1] / q
    return lhs, rhs


def all_functions(n: int) -> np.ndarray:
    """Truth tables of all 2**(2**n) functions of arity n (n <= 4), one per row."""
    if n > 4:
        raise ArityError("exhaustive function tables are capped at arity 4")
    codes = np.arange(1 << (1 << n), dtype=np.int64)
    return ((codes[:, None] >> np.arange(1 << n)) & 1).astype(np.uint8)


# -------------------------------------------------------------- expectation

def pullback_expectation(h: BooleanFunction, p: float, mode: str = "exact",
                         samples: int = 100_000, rng=None) -> float:
    """E_{z ~ D_p}[h(z)] for h of even arity."""
    return pullback_expectation_se(h, p, mode, samples, rng)[0]


def pullback_expectation_se(h: BooleanFunction, p: float, mode: str = "exact",
                            samples: int = 100_000, rng=None):
    """(estimate, standard error); the standard error is 0 in exact mode."""
    p = check_bias(p)
    if h.arity % 2:
        raise ArityError("pull-back expectation needs even arity")
    m = h.arity // 2
    if mode == "exact":
        if m > EXACT_CAP:
            raise ArityError(f"exact mode is capped at m = {EXACT_CAP}")
        return float(np.dot(pullback_mass_table(m, p), h.table)), 0.0
    if mode == "mc":
        idx = sample_pullback(m, p, as_rng(rng), size=samples)
        v = h.table[idx].astype(np.float64)
        return float(v.mean()), float(v.std(ddof=1) / math.sqrt(samples))
    raise ValueError(f"unknown mode {mode!r}")


# ------------------------------------------------------------ preservation

def split_2to1_map(m: int, i: int, rng) -> TwoToOneMap:
    """Draw a 2-to-1 map in two steps: partner of ``i`` first, then the rest.

    Step one picks the coordinate identified with ``i`` and the shared label;
    step two pairs the remaining 2m-2 coordinates onto the other labels
    uniformly.  The result is uniform over all 2-to-1 maps.
    """
    rng = as_rng(rng)
    n = 2 * m
    if not 0 <= i < n:
        raise IndexError(f"coordinate {i} out of range for arity {n}")
    others = [c for c in range(n) if c != i]
    j = others[int(rng.integers(len(others)))]
    label = int(rng.integers(m))
    rest = [c for c in range(n) if c not in (i, j)]
    rest_labels = [lab for lab in range(m) if lab != label]
    image = [0] * n
    image[i] = image[j] = label
    if rest:
        sigma = rng.permutation(len(rest))
        for pos, c in enumerate(rest):
            image[c] = rest_labels[int(sigma[pos]) // 2]
    return TwoToOneMap(n, m, tuple(image))


@dataclass
class PreservationResult:
    coordinate: int
    p: float
    trials: int
    seed: int
    influences: np.ndarray
    targets: np.ndarray
    source_influence: float
    total_influence: float
    tau_grid: tuple
    exceedance: list = field(default_factory=list)

    def exceedance_table(self):
        return list(zip(self.tau_grid, self.exceedance))

    @property
    def mean_influence(self) -> float:
        return float(np.mean(self.influences))


def _minor_influence(f, pi, i, p):
    g = apply_minor(f, pi)
    return pi.image[i], influence(g, p, pi.image[i])


def influence_preservation_experiment(f: BooleanFunction, i: int, p: float, trials: int,
                                      tau_grid=(0.01, 0.05, 0.1), seed: int = 0,
                                      threads: int = 1) -> PreservationResult:
    """Empirical law of Inf[f^pi, pi(i)] over uniform 2-to-1 maps pi.

    Trial ``t`` draws its map from ``make_rng(seed, t)``; results are stored by
    trial index, so the output does not depend on ``threads``.
    """
    p = check_bias(p)
    if f.arity % 2:
        raise ArityError("pad odd arities with a dummy coordinate (see pad_to_even)")
    if not 0 <= i < f.arity:
        raise IndexError(f"coordinate {i} out of range for arity {f.arity}")
    m = f.arity // 2
    if m > 16:
        raise ArityError("minor influences are capped at m = 16")

    def trial(t):
        return _minor_influence(f, random_2to1_map(m, make_rng(seed, t)), i, p)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(trial, range(trials)))
    else:
        results = [trial(t) for t in range(trials)]
    infl = np.array([r[1] for r in results], dtype=np.float64)
    targets = np.array([r[0] for r in results], dtype=np.int64)
    tau_grid = tuple(float(t) for t in tau_grid)
    exceed = [float(np.mean(infl >= tau)) if trials else 0.0 for tau in tau_grid]
    return PreservationResult(
        coordinate=i, p=p, trials=trials, seed=seed, influences=infl, targets=targets,
        source_influence=influence(f, p, i), total_influence=total_influence(f, p) / m if m else 0.0,
        tau_grid=tau_grid, exceedance=exceed,
    )


def influence_preservation_exact(f: BooleanFunction, i: int, p: float) -> dict:
    """Exact law of Inf[f^pi, pi(i)] over all 2-to-1 maps (arity <= 10): value -> probability."""
    p = check_bias(p)
    m = f.arity // 2
    maps = enumerate_2to1_maps(m)
    law: dict = {}
    for pi in maps:
        value = round(_minor_influence(f, pi, i, p)[1], 12)
        law[value] = law.get(value, 0) + 1
    return {v: c / len(maps) for v, c in sorted(law.items())}


def majority_of_xor_pairs(m: int) -> BooleanFunction:
    """Strict majority of the m pair parities x_{2j} xor x_{2j+1} (arity 2m)."""
    n = 2 * m
    if m < 1 or n > 24:
        raise ArityError("majority_of_xor_pairs needs 1 <= m <= 12")
    idx = np.arange(1 << n, dtype=np.int64)
    votes = np.zeros(1 << n, dtype=np.int64)
    for j in range(m):
        votes += ((idx >> (2 * j)) ^ (idx >> (2 * j + 1))) & 1
    return BooleanFunction(n, (votes >= m // 2 + 1).astype(np.uint8))


def pad_to_even(f: BooleanFunction) -> BooleanFunction:
    """Append a dummy coordinate when the arity is odd."""
    if f.arity % 2 == 0:
        return f
    return apply_minor(f, MinorMap(f.arity, f.arity + 1, tuple(range(f.arity))))
