"""Polynomial threshold representations, coordinate weights and heavy sets.

A representation of f is a multilinear polynomial Q with a threshold t such
that f(x) = 1 exactly when Q(x) >= t.  In ``positive`` mode Q has no constant
term, non-negative coefficients summing to one, and t >= 0.  Monomials are
keyed by subset bitmask.

Searches are linear programs over the coefficients.  Strict inequalities are
replaced by a ``margin``; a margin-feasible system is a genuine witness, but a
system that is feasible only with margin below the chosen value is reported as
infeasible.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import _backend
from .boolfn import ArityError, BooleanFunction, MinorMap, iter_minor_maps
from .lp import LPProblem, lp_feasible, solve, to_exact
from .rng import as_rng, make_rng
from .shapley import is_monotone

DEFAULT_MARGIN = 1e-6
LP_ARITY_CAP = 12
EXACT_ARITY_CAP = 8
EVAL_TOL = 1e-12


def _popcount(mask):
    return bin(mask).count("1")


@dataclass
class MultilinearPoly:
    arity: int
    degree: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mask, c in self.coeffs.items():
            mask = int(mask)
            if mask < 0 or mask >> self.arity:
                raise ValueError(f"monomial {mask:#x} outside arity {self.arity}")
            if _popcount(mask) > self.degree:
                raise ValueError(f"monomial {mask:#x} exceeds degree {self.degree}")
            if c != 0:
                clean[mask] = c
        self.coeffs = clean

    @classmethod
    def from_terms(cls, arity, terms, degree=None):
        """Build from ``{(i, j, ...): coefficient}`` with 0-based coordinates."""
        coeffs = {}
        for idx, c in terms.items():
            mask = 0
            for i in idx:
                mask |= 1 << i
            coeffs[mask] = coeffs.get(mask, 0) + c
        if degree is None:
            degree = max((_popcount(m) for m in coeffs), default=0)
        return cls(arity, degree, coeffs)

    @property
    def unbiased(self) -> bool:
        return self.coeffs.get(0, 0) == 0

    @property
    def positive(self) -> bool:
        return all(c >= 0 for m, c in self.coeffs.items() if m)

    @property
    def normalized(self) -> bool:
        return abs(sum(self.coeffs.values()) - 1) <= 1e-9

    def dense(self) -> np.ndarray:
        if self.arity > 16:
            raise ArityError("dense coefficient arrays are capped at arity 16")
        out = np.zeros(1 << self.arity)
        for m, c in self.coeffs.items():
            out[m] = float(c)
        return out

    def values(self) -> np.ndarray:
        """Q(x) at every point, indexed like a truth table."""
        if self.arity > 24:
            raise ArityError("evaluation is capped at arity 24")
        if self.arity <= 16:
            return _backend.subset_zeta(self.dense(), self.arity)
        idx = np.arange(1 << self.arity, dtype=np.int64)
        out = np.zeros(1 << self.arity)
        for m, c in self.coeffs.items():
            out += float(c) * ((idx & m) == m)
        return out


@dataclass
class Representation:
    poly: MultilinearPoly
    t: float
    mode: str = "general"

    def __post_init__(self):
        if self.mode not in ("general", "positive"):
            raise ValueError("mode must be 'general' or 'positive'")

    @property
    def valid_positive(self) -> bool:
        q = self.poly
        return q.unbiased and q.positive and q.normalized and self.t >= 0

    def weights(self) -> np.ndarray:
        return np.array([weight(self.poly, i) for i in range(self.poly.arity)])


def eval_poly(q: MultilinearPoly, x) -> float:
    if len(x) != q.arity:
        raise ArityError(f"input of length {len(x)} for a polynomial of arity {q.arity}")
    idx = sum(int(b) << j for j, b in enumerate(x))
    return float(sum(c for m, c in q.coeffs.items() if idx & m == m))


def sign_function(rep: Representation) -> BooleanFunction:
    """The Boolean function x -> [Q(x) >= t], with a 1e-12 comparison slack."""
    v = rep.poly.values()
    return BooleanFunction(rep.poly.arity, (v >= float(rep.t) - EVAL_TOL).astype(np.uint8))


def weight(q: MultilinearPoly, i: int) -> float:
    """Sum of the coefficients of monomials containing coordinate i."""
    if not 0 <= i < q.arity:
        raise IndexError(f"coordinate {i} out of range for arity {q.arity}")
    return float(sum(c for m, c in q.coeffs.items() if m >> i & 1))


# ------------------------------------------------------------- LP encodings

def monomials(n: int, k: int) -> list:
    """Non-empty masks of size at most k, by size then value."""
    out = []
    for size in range(1, k + 1):
        for combo in combinations(range(n), size):
            out.append(sum(1 << i for i in combo))
    return out


def _design(n, masks):
    idx = np.arange(1 << n, dtype=np.int64)[:, None]
    m = np.asarray(masks, dtype=np.int64)[None, :]
    return ((idx & m) == m).astype(np.float64)


def _check_caps(f, k):
    if f.arity > LP_ARITY_CAP:
        raise ArityError(f"representation search is capped at arity {LP_ARITY_CAP}")
    if not 0 <= k <= max(f.arity, 0):
        raise ValueError(f"degree {k} outside [0, {f.arity}]")


@dataclass
class _PositiveSystem:
    masks: list
    A_ub: np.ndarray
    b_ub: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    n_vars: int  # coefficients, then t, then extras


def _positive_system(f, k, margin, extra=0):
    """Constraints of a positive representation; variable order (coeffs..., t, extras...)."""
    n = f.arity
    masks = monomials(n, k)
    M = _design(n, masks)
    nv = len(masks) + 1 + extra
    ones = f.table.astype(bool)
    rows, rhs = [], []
    # f(x) = 1:  t - Q(x) <= 0 ;  f(x) = 0:  Q(x) - t <= -margin
    if ones.any():
        block = np.zeros((int(ones.sum()), nv))
        block[:, : len(masks)] = -M[ones]
        block[:, len(masks)] = 1.0
        rows.append(block)
        rhs.append(np.zeros(block.shape[0]))
    if (~ones).any():
        block = np.zeros((int((~ones).sum()), nv))
        block[:, : len(masks)] = M[~ones]
        block[:, len(masks)] = -1.0
        rows.append(block)
        rhs.append(np.full(block.shape[0], -margin))
    A_eq = np.zeros((1, nv))
    A_eq[0, : len(masks)] = 1.0
    return _PositiveSystem(masks, np.vstack(rows), np.concatenate(rhs), A_eq, np.ones(1), nv)


def _weight_rows(masks, n, nv, coords):
    out = np.zeros((len(coords), nv))
    for r, i in enumerate(coords):
        for j, m in enumerate(masks):
            if m >> i & 1:
                out[r, j] = 1.0
    return out


def _representation_from(f, k, masks, x, t, mode):
    coeffs = {m: float(c) for m, c in zip(masks, x) if abs(c) > 1e-15}
    return Representation(MultilinearPoly(f.arity, k, coeffs), float(t), mode)


def _run(prob, exact):
    if exact:
        return lp_feasible(to_exact(prob)) if prob.c is None else solve(to_exact(prob))
    return lp_feasible(prob) if prob.c is None else solve(prob)


def find_representation(f: BooleanFunction, k: int, mode: str = "general",
                        margin: float = DEFAULT_MARGIN, exact: bool = False):
    """A degree-k representation of ``f`` whose sign function is ``f``, or None.

    ``exact=True`` runs the simplex over rationals (arity at most 8).
    """
    _check_caps(f, k)
    if exact and f.arity > EXACT_ARITY_CAP:
        raise ArityError(f"exact search is capped at arity {EXACT_ARITY_CAP}")
    n = f.arity
    if mode == "positive":
        if not is_monotone(f):
            return None
        if f.is_constant and f.table[0] == 1:
            return _degenerate_constant_one(n, k)
        if k == 0:
            return None
        sys_ = _positive_system(f, k, margin)
        res = _run(LPProblem(sys_.n_vars, None, sys_.A_ub, sys_.b_ub, sys_.A_eq, sys_.b_eq), exact)
        if not res.feasible:
            return None
        x = res.x
        t = max(0.0, float(x[len(sys_.masks)]) - margin / 2)
        rep = _representation_from(f, k, sys_.masks, x[: len(sys_.masks)], t, "positive")
    elif mode == "general":
        masks = monomials(n, k)
        M = _design(n, masks)
        nv = len(masks) + 1
        sgn = np.where(f.table == 1, -1.0, 1.0)
        # f(x)=1: t - Q(x) <= 0 ;  f(x)=0: Q(x) - t <= -1
        A = np.hstack([M * sgn[:, None], -sgn[:, None]])
        b = np.where(f.table == 1, 0.0, -1.0)
        res = _run(LPProblem(nv, None, A, b, free=np.ones(nv, dtype=bool)), exact)
        if not res.feasible:
            return None
        x = res.x
        rep = _representation_from(f, k, masks, x[: len(masks)], float(x[len(masks)]) - 0.5, "general")
    else:
        raise ValueError("mode must be 'general' or 'positive'")
    if sign_function(rep) != f:
        raise RuntimeError("LP point does not reproduce the function; retry with exact=True")
    return rep


def _degenerate_constant_one(n, k):
    # Q(0) = 0 >= t forces t = 0, and then every positive Q works
    coeffs = {1: 1.0} if n and k else {}
    return Representation(MultilinearPoly(n, k, coeffs), 0.0, "positive")


def min_max_weight(f: BooleanFunction, k: int, margin: float = DEFAULT_MARGIN, exact: bool = False):
    """min over positive representations of max_i omega_i, or None if none exists.

    Representations are normalized, so even the constant-1 function pays
    weight: its representations are exactly the normalized Q with t = 0.
    """
    _check_caps(f, k)
    if not is_monotone(f):
        return None
    n = f.arity
    if k == 0 or n == 0:
        return None
    sys_ = _positive_system(f, k, margin, extra=1)
    u = sys_.n_vars - 1
    W = _weight_rows(sys_.masks, n, sys_.n_vars, range(n))
    W[:, u] = -1.0
    c = np.zeros(sys_.n_vars)
    c[u] = 1.0
    prob = LPProblem(sys_.n_vars, c, np.vstack([sys_.A_ub, W]), np.concatenate([sys_.b_ub, np.zeros(n)]),
                     sys_.A_eq, sys_.b_eq, sense="min")
    res = _run(prob, exact)
    if not res.feasible:
        return None
    return float(res.objective)


def _capped_weight_lp(f, k, cap, coords, margin, exact=False):
    sys_ = _positive_system(f, k, margin)
    coords = sorted(coords)
    A_ub, b_ub = sys_.A_ub, sys_.b_ub
    if coords:
        A_ub = np.vstack([A_ub, _weight_rows(sys_.masks, f.arity, sys_.n_vars, coords)])
        b_ub = np.concatenate([b_ub, np.full(len(coords), cap)])
    res = _run(LPProblem(sys_.n_vars, None, A_ub, b_ub, sys_.A_eq, sys_.b_eq), exact)
    if not res.feasible:
        return None
    t = max(0.0, float(res.x[len(sys_.masks)]) - margin / 2)
    return _representation_from(f, k, sys_.masks, res.x[: len(sys_.masks)], t, "positive")


def is_heavy_set(f: BooleanFunction, k: int, alpha: float, A, margin: float = DEFAULT_MARGIN,
                 exact: bool = False) -> bool:
    """True iff no positive representation has omega_i <= alpha - margin on all of A."""
    _check_caps(f, k)
    A = sorted(set(int(i) for i in A))
    if not A:
        return False
    if any(not 0 <= i < f.arity for i in A):
        raise IndexError("coordinate out of range")
    if not is_monotone(f) or k == 0:
        return True  # no representation at all: the condition holds vacuously
    return _capped_weight_lp(f, k, alpha - margin, A, margin, exact) is None


@dataclass
class HeavySetResult:
    coords: frozenset
    outcome: str  # "heavy" or "regular"
    iterations: int
    bound: float

    @property
    def within_bound(self) -> bool:
        return len(self.coords) <= self.bound + 1e-9


def find_heavy_set(f: BooleanFunction, k: int, eps: float, margin: float = DEFAULT_MARGIN) -> HeavySetResult:
    """Grow a (k, eps/2)-heavy set by repeated representation queries.

    Each round asks for a representation that keeps every accumulated
    coordinate below eps/2 and adds the coordinates where that representation
    reaches eps/2.  Infeasibility means the accumulated set is heavy.  A
    representation with no coordinate at eps/2 or above, or running past
    ceil(2/eps) rounds, means f itself has a representation of small maximum
    weight; that is reported as ``regular``.
    """
    _check_caps(f, k)
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    if find_representation(f, k, "positive", margin) is None:
        raise ValueError("function has no positive representation of this degree")
    half = eps / 2
    rounds = math.ceil(2 / eps)
    bound = 4 * k / eps ** 2
    acc: set = set()
    for it in range(1, rounds + 2):
        rep = _capped_weight_lp(f, k, half - margin, acc, margin)
        if rep is None:
            return HeavySetResult(frozenset(acc), "heavy", it, bound)
        new = {i for i, w in enumerate(rep.weights()) if w >= half - 1e-12}
        if not new - acc:
            return HeavySetResult(frozenset(acc), "regular", it, bound)
        acc |= new
        if it > rounds:
            break
    return HeavySetResult(frozenset(acc), "regular", rounds + 1, bound)


# -------------------------------------------------------------------- minors

def induce_minor_representation(rep: Representation, pi: MinorMap) -> Representation:
    """Representation of f^pi: the coefficient on S collects Q(T) over pi(T) = S."""
    q = rep.poly
    if pi.source_arity != q.arity:
        raise ArityError("map source arity differs from polynomial arity")
    coeffs: dict = {}
    for mask, c in q.coeffs.items():
        image = 0
        for i in range(q.arity):
            if mask >> i & 1:
                image |= 1 << pi.image[i]
        coeffs[image] = coeffs.get(image, 0) + c
    return Representation(MultilinearPoly(pi.target_arity, min(q.degree, pi.target_arity), coeffs), rep.t, rep.mode)


def minor_closure_check(f: BooleanFunction, k: int, max_target: int = 4):
    """First minor map into [m <= max_target] whose minor lacks a degree-k general representation."""
    if find_representation(f, k, "general") is None:
        return None
    from .boolfn import apply_minor

    for m in range(1, max_target + 1):
        for pi in iter_minor_maps(f.arity, m):
            if find_representation(apply_minor(f, pi), min(k, m), "general") is None:
                return pi
    return None


# ----------------------------------------------------------- concentration

def _stirling2(n, k):
    if n == k:
        return 1
    if n == 0 or k == 0:
        return 0
    row = [1] + [0] * k
    for i in range(1, n + 1):
        new = [0] * (k + 1)
        for j in range(1, min(i, k) + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[k]


def size_class_means(q: MultilinearPoly, m: int) -> np.ndarray:
    """mu[s] = E[R(S)] for any fixed S of size s when pi is iid uniform into [m].

    A monomial T lands exactly on S with probability s! S2(|T|, s) / m^|T|.
    """
    mu = [Fraction(0)] * (m + 1)
    sizes: dict = {}
    for mask, c in q.coeffs.items():
        sizes[_popcount(mask)] = sizes.get(_popcount(mask), 0) + Fraction(c)
    for j, total in sizes.items():
        for s in range(0, min(j, m) + 1):
            mu[s] += total * math.factorial(s) * _stirling2(j, s) / Fraction(m) ** j
    return np.array([float(v) for v in mu])


def _induced_tables(q: MultilinearPoly, images: np.ndarray, m: int) -> np.ndarray:
    """R(S) for every S in [m], one row per sampled map (rows of ``images``)."""
    trials = images.shape[0]
    out = np.zeros((trials, 1 << m))
    rows = np.arange(trials)
    for mask, c in q.coeffs.items():
        img = np.zeros(trials, dtype=np.int64)
        for i in range(q.arity):
            if mask >> i & 1:
                img |= np.int64(1) << images[:, i]
        np.add.at(out, (rows, img), float(c))
    return out


@dataclass
class ConcentrationReport:
    m: int
    trials: int
    sum_c_sq: float
    means: np.ndarray
    worst_deviation: dict
    rows: list  # (t, size, worst frequency, standard error, bound)

    def violations(self, n_se: float = 3.0):
        return [r for r in self.rows if r[2] > r[4] + n_se * r[3]]


def _report(q, R, m, trials, t_grid, exact=False):
    # deviations are compared with a 1e-12 slack: coefficient sums often sit on a
    # lattice that contains t itself
    csq = float(sum(weight(q, i) ** 2 for i in range(q.arity)))
    mu = size_class_means(q, m)
    pc = _backend.popcounts(m)
    worst_dev, rows = {}, []
    for s in range(1, min(q.degree, m) + 1):
        cols = np.flatnonzero(pc == s)
        dev = np.abs(R[:, cols] - mu[s])
        worst_dev[s] = float(dev.max()) if dev.size else 0.0
        for t in t_grid:
            freq = (dev >= t - 1e-12).mean(axis=0)
            fr = min(1.0, float(freq.max()))
            se = 0.0 if exact else math.sqrt(fr * (1 - fr) / max(trials - 1, 1))
            bound = 2 * math.exp(-2 * t * t / csq) if csq > 0 else 0.0
            rows.append((float(t), s, fr, se, bound))
    return ConcentrationReport(m, trials, csq, mu, worst_dev, rows)


def sample_map_images(n: int, m: int, trials: int, seed: int, threads: int = 1, chunk: int = 2000) -> np.ndarray:
    """(trials, n) array of iid uniform images in [m].

    Chunk ``c`` is drawn from ``make_rng(seed, c)`` and chunks are stacked in
    index order, so the result does not depend on ``threads``.
    """
    sizes = [min(chunk, trials - start) for start in range(0, trials, chunk)]

    def draw(c):
        return make_rng(seed, c).integers(0, m, size=(sizes[c], n))

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(draw, range(len(sizes))))
    else:
        parts = [draw(c) for c in range(len(sizes))]
    return np.concatenate(parts) if parts else np.zeros((0, n), dtype=np.int64)


def mcdiarmid_concentration_experiment(rep: Representation, m: int, trials: int, rng,
                                       t_grid=(0.01, 0.02, 0.05), threads: int = 1) -> ConcentrationReport:
    """Sample iid uniform maps [n] -> [m] and compare deviations of R(S) with McDiarmid.

    Each coordinate changes R(S) by at most omega_i when its image moves, so
    Pr[|R(S) - mu_|S|| >= t] <= 2 exp(-2 t^2 / sum_i omega_i^2).  ``rng`` is a
    Generator or an integer seed; with a seed the maps come from
    :func:`sample_map_images`.
    """
    if not 1 <= m <= 10:
        raise ArityError("target arity is capped at 10")
    q = rep.poly
    if q.arity > 4096:
        raise ArityError("sparse polynomial arity is capped at 4096")
    if rep.mode == "positive" and not rep.valid_positive:
        raise ValueError("representation is not a valid positive representation")
    if isinstance(rng, (int, np.integer)):
        images = sample_map_images(q.arity, m, trials, int(rng), threads)
    else:
        images = as_rng(rng).integers(0, m, size=(trials, q.arity))
    R = _induced_tables(q, images, m)
    return _report(q, R, m, trials, t_grid)


def mcdiarmid_exhaustive(rep: Representation, m: int, t_grid=(0.01, 0.02, 0.05)) -> ConcentrationReport:
    """Same report with exact frequencies over all m^n maps (m^n <= 10^6)."""
    q = rep.poly
    total = m ** q.arity
    if total > 10 ** 6:
        raise ArityError("exhaustive enumeration is capped at 10**6 maps")
    idx = np.arange(total, dtype=np.int64)
    images = np.stack([(idx // m ** i) % m for i in range(q.arity)], axis=1)
    R = _induced_tables(q, images, m)
    return _report(q, R, m, total, t_grid, exact=True)


# --------------------------------------------------------------- file format

def format_representation(rep: Representation) -> str:
    q = rep.poly
    lines = [f"arity={q.arity} degree={q.degree} t={float(rep.t)!r} mode={rep.mode}"]
    for mask in sorted(q.coeffs):
        lines.append(f"{mask:x} {float(q.coeffs[mask])!r}")
    return "\n".join(lines) + "\n"


def parse_representation(text: str) -> Representation:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise ValueError("empty representation file")
    head = dict(part.split("=", 1) for part in lines[0].split())
    try:
        n, k, t, mode = int(head["arity"]), int(head["degree"]), float(head["t"]), head["mode"]
    except KeyError as exc:
        raise ValueError(f"malformed representation header: {lines[0]!r}") from exc
    coeffs = {}
    for ln in lines[1:]:
        mask, c = ln.split()
        coeffs[int(mask, 16)] = float(c)
    return Representation(MultilinearPoly(n, k, coeffs), t, mode)
