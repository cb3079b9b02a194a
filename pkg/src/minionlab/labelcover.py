"""Label Cover instances: evaluation, exact optimum, generators and richness.

An instance has left vertices [L], right vertices [R], alphabets [sigma_L]
and [sigma_R], and one table pi_e : [sigma_L] -> [sigma_R] per edge e = (u, v).
A labeling satisfies e when pi_e(label(u)) = label(v).
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from .boolfn import ArityError, enumerate_2to1_maps
from .rng import as_rng

BRUTE_FORCE_CAP = 10 ** 7


@dataclass(eq=False)
class LabelCoverInstance:
    n_left: int
    n_right: int
    sigma_L: int
    sigma_R: int
    edges: np.ndarray   # (E, 2) int
    tables: np.ndarray  # (E, sigma_L) int

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.tables = np.asarray(self.tables, dtype=np.int64).reshape(-1, self.sigma_L)
        if self.edges.shape[0] != self.tables.shape[0]:
            raise ValueError("one table per edge is required")
        if self.sigma_L < 1 or self.sigma_R < 1:
            raise ValueError("alphabets must be non-empty")
        if self.edges.size and (self.edges[:, 0].min() < 0 or self.edges[:, 0].max() >= self.n_left
                                or self.edges[:, 1].min() < 0 or self.edges[:, 1].max() >= self.n_right):
            raise ValueError("edge endpoint out of range")
        if self.tables.size and (self.tables.min() < 0 or self.tables.max() >= self.sigma_R):
            raise ValueError("table value outside the right alphabet")

    def __eq__(self, other):
        if not isinstance(other, LabelCoverInstance):
            return NotImplemented
        return ((self.n_left, self.n_right, self.sigma_L, self.sigma_R)
                == (other.n_left, other.n_right, other.sigma_L, other.sigma_R)
                and np.array_equal(self.edges, other.edges) and np.array_equal(self.tables, other.tables))

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def two_to_one(self) -> bool:
        if self.sigma_L != 2 * self.sigma_R:
            return False
        return all(np.all(np.bincount(t, minlength=self.sigma_R) == 2) for t in self.tables)

    @property
    def unique(self) -> bool:
        if self.sigma_L != self.sigma_R:
            return False
        return all(np.all(np.bincount(t, minlength=self.sigma_R) == 1) for t in self.tables)


@dataclass(eq=False)
class Labeling:
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        self.left = np.asarray(self.left, dtype=np.int64)
        self.right = np.asarray(self.right, dtype=np.int64)


def _check_labeling(psi, sigma):
    if sigma.left.shape != (psi.n_left,) or sigma.right.shape != (psi.n_right,):
        raise ValueError("labeling shape does not match the instance")
    if (sigma.left.size and (sigma.left.min() < 0 or sigma.left.max() >= psi.sigma_L)) or \
            (sigma.right.size and (sigma.right.min() < 0 or sigma.right.max() >= psi.sigma_R)):
        raise ValueError("label outside its alphabet")


def satisfied_fraction(psi: LabelCoverInstance, sigma: Labeling) -> float:
    _check_labeling(psi, sigma)
    if psi.n_edges == 0:
        return 1.0
    u, v = psi.edges[:, 0], psi.edges[:, 1]
    img = psi.tables[np.arange(psi.n_edges), sigma.left[u]]
    return float(np.mean(img == sigma.right[v]))


def brute_force_optimum(psi: LabelCoverInstance, chunk: int = 1 << 16):
    """(best fraction, witness labeling), exhaustively.

    Left labelings are enumerated; for each, every right vertex takes the label
    agreeing with the most incident edges (smallest label on ties).
    """
    size = psi.sigma_L ** psi.n_left * psi.sigma_R ** psi.n_right
    if size > BRUTE_FORCE_CAP:
        raise ArityError(f"search space {size} exceeds {BRUTE_FORCE_CAP}")
    E = psi.n_edges
    if E == 0:
        return 1.0, Labeling(np.zeros(psi.n_left), np.zeros(psi.n_right))
    total = psi.sigma_L ** psi.n_left
    place = psi.sigma_L ** np.arange(psi.n_left, dtype=np.int64)
    u, v = psi.edges[:, 0], psi.edges[:, 1]
    best, best_code = -1, 0
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        left = (codes[:, None] // place[None, :]) % psi.sigma_L
        img = psi.tables[np.arange(E)[None, :], left[:, u]]  # (K, E)
        counts = np.zeros((codes.size, psi.n_right, psi.sigma_R), dtype=np.int64)
        for e in range(E):
            counts[np.arange(codes.size), v[e], img[:, e]] += 1
        score = counts.max(axis=2).sum(axis=1)
        k = int(np.argmax(score))
        if score[k] > best:
            best, best_code = int(score[k]), int(codes[k])
    left = (best_code // place) % psi.sigma_L
    counts = np.zeros((psi.n_right, psi.sigma_R), dtype=np.int64)
    for e in range(E):
        counts[v[e], psi.tables[e, left[u[e]]]] += 1
    right = counts.argmax(axis=1)
    return best / E, Labeling(left, right)


def local_search_lower_bound(psi: LabelCoverInstance, restarts: int, rng) -> float:
    """Best fraction found by greedy coordinate ascent from random labelings."""
    rng = as_rng(rng)
    best = 0.0
    for _ in range(restarts):
        lab = Labeling(rng.integers(0, psi.sigma_L, psi.n_left), rng.integers(0, psi.sigma_R, psi.n_right))
        cur = satisfied_fraction(psi, lab)
        improved = True
        while improved:
            improved = False
            for side, n, sig in (("left", psi.n_left, psi.sigma_L), ("right", psi.n_right, psi.sigma_R)):
                arr = getattr(lab, side)
                for x in range(n):
                    keep = arr[x]
                    for a in range(sig):
                        arr[x] = a
                        val = satisfied_fraction(psi, lab)
                        if val > cur + 1e-15:
                            cur, keep, improved = val, a, True
                    arr[x] = keep
        best = max(best, cur)
    return best


def gap_classify(psi: LabelCoverInstance, t: float, s: float) -> str:
    if s > t:
        raise ValueError("soundness s must not exceed completeness t")
    opt, _ = brute_force_optimum(psi)
    if opt >= t:
        return "YES"
    if opt <= s:
        return "NO"
    return "NEITHER"


def propagate_unique(psi: LabelCoverInstance):
    """A fully satisfying labeling of a unique instance, or None if none exists.

    In each connected component one seed vertex tries every label and the
    bijective constraints force all other labels.
    """
    if not psi.unique:
        raise ValueError("instance is not unique")
    inverse = np.argsort(psi.tables, axis=1)
    adj = [[] for _ in range(psi.n_left + psi.n_right)]
    for e, (u, v) in enumerate(psi.edges):
        adj[u].append((e, psi.n_left + v))
        adj[psi.n_left + v].append((e, u))
    labels = np.full(psi.n_left + psi.n_right, -1, dtype=np.int64)
    for seed_vertex in range(len(adj)):
        if labels[seed_vertex] >= 0:
            continue
        alphabet = psi.sigma_L
        found = None
        for a in range(alphabet):
            trial = {seed_vertex: a}
            queue = deque([seed_vertex])
            ok = True
            while queue and ok:
                x = queue.popleft()
                for e, y in adj[x]:
                    want = psi.tables[e, trial[x]] if x < psi.n_left else inverse[e, trial[x]]
                    if y in trial:
                        if trial[y] != want:
                            ok = False
                            break
                    else:
                        trial[y] = int(want)
                        queue.append(y)
            if ok:
                found = trial
                break
        if found is None:
            return None
        for x, a in found.items():
            labels[x] = a
    return Labeling(labels[: psi.n_left], labels[psi.n_left:])


# ---------------------------------------------------------------- richness

def two_to_one_functions(sigma_R: int) -> list:
    """All 2-to-1 tables [2 sigma_R] -> [sigma_R], in lexicographic order."""
    return [m.image for m in enumerate_2to1_maps(sigma_R)]


def canonical_fibres(table) -> tuple:
    """Sorted list of fibres of a 2-to-1 table."""
    table = list(table)
    fibres = [tuple(i for i, v in enumerate(table) if v == label) for label in range(max(table) + 1)]
    return tuple(sorted(fibres))


@dataclass
class RichnessResult:
    chi_square: float
    dof: int
    p_value: float
    counts: dict
    degenerate: bool


def richness_statistic(psi: LabelCoverInstance, u: int) -> RichnessResult:
    """Chi-square of the tables at left vertex u against uniform over 2-to-1 functions."""
    from scipy.stats import chi2

    if not psi.two_to_one:
        raise ValueError("instance is not 2-to-1")
    if psi.sigma_R > 4:
        raise ArityError("richness statistics are capped at sigma_R = 4")
    support = two_to_one_functions(psi.sigma_R)
    counts = {f: 0 for f in support}
    for e in np.flatnonzero(psi.edges[:, 0] == u):
        counts[tuple(int(x) for x in psi.tables[e])] += 1
    n = sum(counts.values())
    expected = n / len(support)
    obs = np.array([counts[f] for f in support], dtype=np.float64)
    dof = len(support) - 1
    if n == 0:
        return RichnessResult(0.0, dof, 1.0, counts, True)
    stat = float(np.sum((obs - expected) ** 2) / expected)
    return RichnessResult(stat, dof, float(chi2.sf(stat, dof)), counts, expected < 5)


# -------------------------------------------------------------- generators

def _uniform_table(variant, sigma_L, sigma_R, rng, force=None):
    """Uniform table of the variant; with force=(a, b) conditioned on table[a] = b."""
    if variant == "plain":
        t = rng.integers(0, sigma_R, sigma_L)
        if force:
            t[force[0]] = force[1]
        return t
    if variant == "unique":
        t = rng.permutation(sigma_L)
        if force:
            a, b = force
            c = int(np.flatnonzero(t == b)[0])
            t[a], t[c] = t[c], t[a]
        return t
    # 2-to-1: choose a's partner, then pair the remaining positions
    t = np.empty(sigma_L, dtype=np.int64)
    if force:
        a, b = force
        others = [i for i in range(sigma_L) if i != a]
        j = others[int(rng.integers(len(others)))]
        t[a] = t[j] = b
        rest = [i for i in range(sigma_L) if i not in (a, j)]
        labels = np.repeat([x for x in range(sigma_R) if x != b], 2)
    else:
        rest = list(range(sigma_L))
        labels = np.repeat(np.arange(sigma_R), 2)
    t[rest] = rng.permutation(labels)
    return t


def generate(variant: str, n_left: int, n_right: int, degree: int, sigma_R: int, rng,
             sigma_L: int | None = None, planted: bool = True) -> LabelCoverInstance:
    """Random instance; each left vertex gets ``degree`` distinct right neighbours.

    ``planted`` draws a hidden labeling (uniform on both sides) and conditions
    every table on satisfying it.  For ``rich`` instances this keeps each left
    vertex's tables iid uniform over all 2-to-1 functions, since the right
    labels of distinct neighbours are independent and uniform.
    """
    rng = as_rng(rng)
    if variant not in ("plain", "unique", "two_to_one", "rich"):
        raise ValueError(f"unknown variant {variant!r}")
    if variant in ("two_to_one", "rich"):
        if sigma_L is not None and sigma_L != 2 * sigma_R:
            raise ValueError("2-to-1 instances need sigma_L = 2 sigma_R")
        sigma_L = 2 * sigma_R
        kind = "two_to_one"
    elif variant == "unique":
        if sigma_L is not None and sigma_L != sigma_R:
            raise ValueError("unique instances need sigma_L = sigma_R")
        sigma_L = sigma_R
        kind = "unique"
    else:
        sigma_L = sigma_R if sigma_L is None else sigma_L
        kind = "plain"
    if degree > n_right:
        raise ValueError("degree exceeds the number of right vertices")
    left_lab = rng.integers(0, sigma_L, n_left)
    right_lab = rng.integers(0, sigma_R, n_right)
    edges, tables = [], []
    for u in range(n_left):
        for v in sorted(rng.choice(n_right, size=degree, replace=False).tolist()):
            force = (int(left_lab[u]), int(right_lab[v])) if planted else None
            edges.append((u, v))
            tables.append(_uniform_table(kind, sigma_L, sigma_R, rng, force))
    return LabelCoverInstance(n_left, n_right, sigma_L, sigma_R, np.array(edges).reshape(-1, 2),
                              np.array(tables).reshape(-1, sigma_L))


# ------------------------------------------------------------- file format

def format_instance(psi: LabelCoverInstance) -> str:
    lines = [f"L={psi.n_left} R={psi.n_right} sigmaL={psi.sigma_L} sigmaR={psi.sigma_R}"]
    for (u, v), t in zip(psi.edges, psi.tables):
        lines.append(" ".join(str(int(x)) for x in itertools.chain((u, v), t)))
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> LabelCoverInstance:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise ValueError("empty instance file")
    try:
        head = dict(part.split("=", 1) for part in lines[0].split())
        nl, nr, sl, sr = (int(head[k]) for k in ("L", "R", "sigmaL", "sigmaR"))
    except (KeyError, ValueError) as exc:
        raise ValueError(f"malformed instance header: {lines[0]!r}") from exc
    edges, tables = [], []
    for ln in lines[1:]:
        vals = [int(x) for x in ln.split()]
        if len(vals) != 2 + sl:
            raise ValueError(f"edge line has {len(vals)} fields, expected {2 + sl}")
        edges.append(vals[:2])
        tables.append(vals[2:])
    return LabelCoverInstance(nl, nr, sl, sr, np.array(edges, dtype=np.int64).reshape(-1, 2),
                              np.array(tables, dtype=np.int64).reshape(-1, sl))
