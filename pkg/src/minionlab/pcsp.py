"""Relational structures, homomorphisms, polymorphisms and choice conditions.

Universes are ``range(size)``.  A power A^n has universe [|A|]^n encoded in
base |A| with the first coordinate least significant, so for Boolean A the
encoding coincides with truth-table indexing and polymorphisms convert
directly to :class:`BooleanFunction`.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .boolfn import ArityError, BooleanFunction, MinorMap, apply_minor, iter_minor_maps, random_2to1_map
from .rng import make_rng

POWER_CAP = 10 ** 6


class SignatureError(ValueError):
    pass


class SliceNotClosed(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    arities: tuple

    def __post_init__(self):
        object.__setattr__(self, "arities", tuple(int(r) for r in self.arities))
        if not self.arities or any(r < 1 for r in self.arities):
            raise SignatureError("a signature needs at least one symbol of arity >= 1")


class RelationalStructure:
    """Finite structure on range(size) with one tuple list per relation symbol."""

    def __init__(self, size: int, relations, arities=None):
        if size < 1:
            raise ValueError("universe must be non-empty")
        rels = []
        for k, rel in enumerate(relations):
            tuples = sorted(set(tuple(int(v) for v in tup) for tup in rel))
            rels.append(tuples)
        if arities is None:
            arities = [len(rel[0]) if rel else None for rel in rels]
            if any(a is None for a in arities):
                raise SignatureError("arity of an empty relation must be given explicitly")
        self.signature = Signature(tuple(arities))
        for r, tuples in zip(self.signature.arities, rels):
            for tup in tuples:
                if len(tup) != r:
                    raise SignatureError(f"tuple {tup} does not have arity {r}")
                if any(not 0 <= v < size for v in tup):
                    raise ValueError(f"tuple {tup} leaves the universe [0, {size})")
        if len(rels) != len(self.signature.arities):
            raise SignatureError("one arity per relation is required")
        self.size = size
        self.relations = rels
        self._sets = [frozenset(r) for r in rels]

    def __repr__(self):
        return f"RelationalStructure(size={self.size}, arities={self.signature.arities})"

    def __eq__(self, other):
        return (isinstance(other, RelationalStructure) and self.size == other.size
                and self.signature == other.signature and self.relations == other.relations)

    def contains(self, k: int, tup) -> bool:
        return tuple(tup) in self._sets[k]


def _check_similar(X, A):
    if X.signature != A.signature:
        raise SignatureError("structures are not similar")


def is_homomorphism(phi, X: RelationalStructure, A: RelationalStructure) -> bool:
    _check_similar(X, A)
    phi = [int(v) for v in phi]
    if len(phi) != X.size:
        raise ArityError("map length differs from the universe size")
    if any(not 0 <= v < A.size for v in phi):
        return False
    for k, rel in enumerate(X.relations):
        for tup in rel:
            if not A.contains(k, tuple(phi[v] for v in tup)):
                return False
    return True


@dataclass
class Template:
    A: RelationalStructure
    B: RelationalStructure
    witness: tuple = None

    def __post_init__(self):
        _check_similar(self.A, self.B)
        if self.witness is None:
            w = find_homomorphism(self.A, self.B)
            if w is None:
                raise ValueError("A does not map to B")
            self.witness = tuple(w)
        elif not is_homomorphism(self.witness, self.A, self.B):
            raise ValueError("witness is not a homomorphism A -> B")


# ------------------------------------------------------------------ search

class _Search:
    """Backtracking with forward checking over a static fail-first order."""

    def __init__(self, X, A):
        _check_similar(X, A)
        self.X, self.A = X, A
        self.cons = [[] for _ in range(X.size)]
        for k, rel in enumerate(X.relations):
            for tup in rel:
                for v in set(tup):
                    self.cons[v].append((k, tup))
        self.order = sorted(range(X.size), key=lambda v: (-len(self.cons[v]), v))

    def run(self, first_values=None):
        X, A = self.X, self.A
        assign = [-1] * X.size
        domains = [set(range(A.size)) for _ in range(X.size)]
        order = self.order

        def check(v):
            pruned = []
            for k, tup in self.cons[v]:
                free = {u for u in tup if assign[u] < 0}
                if not free:
                    if not A.contains(k, tuple(assign[u] for u in tup)):
                        return False, pruned
                elif len(free) == 1:
                    (u,) = free
                    bad = []
                    for val in domains[u]:
                        assign[u] = val
                        if not A.contains(k, tuple(assign[w] for w in tup)):
                            bad.append(val)
                        assign[u] = -1
                    for val in bad:
                        domains[u].discard(val)
                        pruned.append((u, val))
                    if not domains[u]:
                        return False, pruned
            return True, pruned

        def rec(pos):
            if pos == len(order):
                yield tuple(assign)
                return
            v = order[pos]
            values = sorted(domains[v])
            if pos == 0 and first_values is not None:
                values = [x for x in values if x in first_values]
            for val in values:
                assign[v] = val
                ok, pruned = check(v)
                if ok:
                    yield from rec(pos + 1)
                for u, x in pruned:
                    domains[u].add(x)
                assign[v] = -1

        if X.size == 0:
            yield ()
            return
        yield from rec(0)


def find_homomorphism(X: RelationalStructure, A: RelationalStructure):
    """Some homomorphism X -> A as a tuple, or None."""
    return next(_Search(X, A).run(), None)


def iter_homomorphisms(X: RelationalStructure, A: RelationalStructure, threads: int = 1):
    """All homomorphisms X -> A, sorted lexicographically."""
    s = _Search(X, A)
    if threads > 1 and X.size:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda a: list(s.run({a})), range(A.size)))
        found = [h for part in parts for h in part]
    else:
        found = list(s.run())
    return sorted(found)


# ---------------------------------------------------------- constructions

def encode_3sat(clauses, n_vars: int) -> RelationalStructure:
    """Instance structure for 3-SAT.

    Clauses are triples of non-zero integers in DIMACS style (``-3`` is the
    negation of variable 3, variables numbered from 1).  Vertex 2(i-1) is the
    literal x_i and 2(i-1)+1 its negation.  Relation 0 holds the clauses and
    relation 1 the complementary literal pairs.
    """
    def lit(v):
        v = int(v)
        if v == 0 or abs(v) > n_vars:
            raise ValueError(f"literal {v} outside variables 1..{n_vars}")
        return 2 * (abs(v) - 1) + (1 if v < 0 else 0)

    C = []
    for clause in clauses:
        if len(clause) != 3:
            raise ValueError("clauses must have exactly three literals")
        C.append(tuple(lit(v) for v in clause))
    N = [(2 * i, 2 * i + 1) for i in range(n_vars)] + [(2 * i + 1, 2 * i) for i in range(n_vars)]
    return RelationalStructure(2 * n_vars, [C, N], arities=(3, 2))


def assignment_from_hom(phi, n_vars: int) -> tuple:
    return tuple(int(phi[2 * i]) for i in range(n_vars))


def sat_brute_force(clauses, n_vars: int):
    for bits in itertools.product((0, 1), repeat=n_vars):
        if all(any((bits[abs(v) - 1] == 1) == (v > 0) for v in cl) for cl in clauses):
            return bits
    return None


def power_structure(A: RelationalStructure, n: int) -> RelationalStructure:
    """A^n with relations applied coordinatewise."""
    size = A.size ** n
    if size > POWER_CAP:
        raise ArityError(f"|A|^n = {size} exceeds {POWER_CAP}")
    rels = []
    place = [A.size ** j for j in range(n)]
    for k, rel in enumerate(A.relations):
        r = A.signature.arities[k]
        if len(rel) ** n > POWER_CAP:
            raise ArityError("power relation too large")
        out = []
        for rows in itertools.product(rel, repeat=n):
            out.append(tuple(sum(rows[j][pos] * place[j] for j in range(n)) for pos in range(r)))
        rels.append(out)
    return RelationalStructure(size, rels, arities=A.signature.arities)


def clique(k: int) -> RelationalStructure:
    return RelationalStructure(k, [[(a, b) for a in range(k) for b in range(k) if a != b]], arities=(2,))


def three_sat_structure() -> RelationalStructure:
    C = [t for t in itertools.product((0, 1), repeat=3) if any(t)]
    return RelationalStructure(2, [C, [(0, 1), (1, 0)]], arities=(3, 2))


def one_in_three() -> RelationalStructure:
    return RelationalStructure(2, [[(1, 0, 0), (0, 1, 0), (0, 0, 1)]])


def nae3() -> RelationalStructure:
    return RelationalStructure(2, [[t for t in itertools.product((0, 1), repeat=3) if 0 < sum(t) < 3]])


def builtin_template(name: str) -> Template:
    if name == "k2":
        return Template(clique(2), clique(2), (0, 1))
    if name == "k3":
        return Template(clique(3), clique(3), (0, 1, 2))
    if name == "3sat":
        s = three_sat_structure()
        return Template(s, s, (0, 1))
    if name == "1in3-nae":
        return Template(one_in_three(), nae3(), (0, 1))
    raise KeyError(f"unknown builtin template {name!r}")


# ---------------------------------------------------------- polymorphisms

def enumerate_polymorphisms(T: Template, n: int, threads: int = 1) -> list:
    """All n-ary polymorphisms as value arrays over [|A|]^n, sorted by table."""
    P = power_structure(T.A, n)
    return [np.array(h, dtype=np.int64) for h in iter_homomorphisms(P, T.B, threads)]


def to_boolean(table) -> BooleanFunction:
    table = np.asarray(table)
    n = int(table.shape[0]).bit_length() - 1
    return BooleanFunction(n, table)


def boolean_polymorphisms(T: Template, n: int, threads: int = 1) -> list:
    if T.A.size != 2 or T.B.size != 2:
        raise ValueError("template is not Boolean")
    return [to_boolean(t) for t in enumerate_polymorphisms(T, n, threads)]


def projection_table(size: int, n: int, i: int) -> np.ndarray:
    idx = np.arange(size ** n, dtype=np.int64)
    return (idx // size ** i) % size


def minor_of_table(table, size: int, n: int, pi: MinorMap) -> np.ndarray:
    """Minor of a function [size]^n -> [*] given as a value array."""
    m = pi.target_arity
    idx = np.arange(size ** m, dtype=np.int64)
    src = np.zeros_like(idx)
    for j, target in enumerate(pi.image):
        src += ((idx // size ** target) % size) * size ** j
    return np.asarray(table)[src]


def check_minor_closure(T: Template, max_arity: int = 3):
    """First (f, pi) whose minor escapes the enumerated polymorphism sets, or None."""
    pols = {n: {tuple(t) for t in enumerate_polymorphisms(T, n)} for n in range(1, max_arity + 1)}
    for n, fs in pols.items():
        for f in sorted(fs):
            for m in range(1, max_arity + 1):
                for pi in iter_minor_maps(n, m):
                    if tuple(minor_of_table(f, T.A.size, n, pi)) not in pols[m]:
                        return f, pi
    return None


def is_symmetric(f: BooleanFunction) -> bool:
    """True iff f depends only on the number of ones of its input."""
    from ._backend import popcounts

    pc = popcounts(f.arity)
    for s in range(f.arity + 1):
        vals = f.table[pc == s]
        if vals.size and vals.min() != vals.max():
            return False
    return True


def has_symmetric_of_arity(functions, n: int) -> bool:
    return any(f.arity == n and is_symmetric(f) for f in functions)


def threshold_of(f: BooleanFunction):
    """t such that f = THR(arity, t), or None."""
    from ._backend import popcounts

    pc = popcounts(f.arity)
    for t in range(f.arity + 2):
        if np.array_equal(f.table, (pc >= t).astype(np.uint8)):
            return t
    return None


def has_threshold_minor(f: BooleanFunction, m: int, proper: bool = False):
    """First map into [m], in lexicographic order, whose minor is a threshold function.

    With ``proper`` the minor must be non-constant and of arity at least 2, so
    constants and dictators do not count.
    """
    if f.arity > 8:
        raise ArityError("threshold-minor search is capped at arity 8")
    if not 1 <= m <= f.arity:
        raise ValueError(f"m must lie in [1, {f.arity}]")
    for pi in iter_minor_maps(f.arity, m):
        g = apply_minor(f, pi)
        t = threshold_of(g)
        if t is None:
            continue
        if proper and (g.is_constant or m < 2):
            continue
        return pi
    return None


# --------------------------------------------------------- choice conditions

@dataclass
class ChoiceTable:
    choices: dict  # BooleanFunction -> frozenset of coordinates
    M: int

    def __post_init__(self):
        fixed = {}
        for f, coords in self.choices.items():
            coords = frozenset(int(i) for i in coords)
            if not coords:
                raise ValueError("choice sets must be non-empty")
            if any(not 0 <= i < f.arity for i in coords):
                raise ValueError("choice outside the function's coordinates")
            if len(coords) > self.M:
                raise ValueError(f"choice of size {len(coords)} exceeds M = {self.M}")
            fixed[f] = coords
        self.choices = fixed

    def __getitem__(self, f):
        try:
            return self.choices[f]
        except KeyError:
            raise KeyError(f"choice table has no entry for {f!r}") from None

    def mask(self, f) -> int:
        return sum(1 << i for i in self[f])


@dataclass
class Verdict:
    holds: bool
    variant: str
    checked: int = 0
    counterexample: object = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def _map_mask(mask: int, image) -> int:
    out = 0
    i = 0
    while mask:
        if mask & 1:
            out |= 1 << image[i]
        mask >>= 1
        i += 1
    return out


def _transitions(members, strict):
    """For every member, the list of (map, index of the minor) within the slice."""
    index = {f: j for j, f in enumerate(members)}
    arities = sorted({f.arity for f in members if f.arity >= 1})
    trans = []
    for f in members:
        out = []
        if f.arity >= 1:
            for m in arities:
                for pi in iter_minor_maps(f.arity, m):
                    g = apply_minor(f, pi)
                    j = index.get(g)
                    if j is None:
                        if strict:
                            raise SliceNotClosed(f"minor {g!r} of {f!r} under {pi.image} is not in the slice")
                        continue
                    out.append((pi, j))
        trans.append(out)
    return trans


def verify_choice_condition(members, C: ChoiceTable, variant: str = "single", M: int | None = None,
                            tau: float = 0.5, trials: int = 1000, seed: int = 0, strict: bool = True,
                            collect: bool = False) -> Verdict:
    """Check a choice condition on an explicit finite slice of a minion.

    Variants: ``single``, ``multiple``, ``layered`` (chains of ``M`` members)
    and ``random2to1`` (Monte-Carlo over uniform 2-to-1 maps, ``trials`` per
    even-arity member, compared against ``tau``).  With ``strict`` a minor
    that leaves the slice raises :class:`SliceNotClosed`; otherwise such maps
    are skipped.  ``collect`` keeps scanning after the first failure of the
    single and multiple variants and lists every failing (f, pi, g) in
    ``details["failures"]``.
    """
    members = sorted(set(members), key=lambda f: f.key())
    for f in members:
        C[f]
    M = C.M if M is None else M
    if variant == "random2to1":
        return _verify_random(members, C, tau, trials, seed, strict)
    trans = _transitions(members, strict)
    if variant in ("single", "multiple"):
        checked = 0
        failures = []
        for a, f in enumerate(members):
            cf = C.mask(f)
            if variant == "single" and len(C[f]) != 1:
                return Verdict(False, variant, checked, (f,), {"reason": "choice is not a singleton"})
            if variant == "multiple" and len(C[f]) > M:
                return Verdict(False, variant, checked, (f,), {"reason": "choice larger than M"})
            for pi, j in trans[a]:
                checked += 1
                image = _map_mask(cf, pi.image)
                cg = C.mask(members[j])
                ok = image == cg if variant == "single" else bool(image & cg)
                if not ok:
                    if not collect:
                        return Verdict(False, variant, checked, (f, pi, members[j]))
                    failures.append((f, pi, members[j]))
        if failures:
            return Verdict(False, variant, checked, failures[0], {"failures": failures})
        return Verdict(True, variant, checked, details={"failures": []} if collect else {})
    if variant == "layered":
        return _verify_layered(members, C, M, trans)
    raise ValueError(f"unknown variant {variant!r}")


def _verify_layered(members, C, M, trans):
    """Search for a chain f_1 -> ... -> f_M with pairwise-disjoint forward choices.

    Along a chain the union U of the earlier choices, pushed forward to the
    current arity, is all that matters: the chain survives at f_j iff
    C(f_j) misses U, and then U becomes pi(U | C(f_j)).
    """
    if M < 2:
        return Verdict(False, "layered", 0, (), {"reason": "chains of length 1 have no pairs"})
    masks = [C.mask(f) for f in members]

    @lru_cache(maxsize=None)
    def bad_chain(a, U, remaining):
        # can a violating chain of ``remaining`` more members start at a with history U?
        if masks[a] & U:
            return None
        if remaining == 1:
            return (a,)
        carried = U | masks[a]
        for pi, j in trans[a]:
            tail = bad_chain(j, _map_mask(carried, pi.image), remaining - 1)
            if tail is not None:
                return (a, pi) + tail
        return None

    for a in range(len(members)):
        chain = bad_chain(a, 0, M)
        if chain is not None:
            pretty = tuple(members[x] if isinstance(x, int) else x for x in chain)
            return Verdict(False, "layered", len(members), pretty)
    return Verdict(True, "layered", len(members), details={"states": bad_chain.cache_info().currsize})


def _verify_random(members, C, tau, trials, seed, strict):
    index = {f: j for j, f in enumerate(members)}
    rows = []
    for a, f in enumerate(members):
        if f.arity < 2 or f.arity % 2:
            continue
        m = f.arity // 2
        hits, used = 0, 0
        cf = C.mask(f)
        for t in range(trials):
            pi = random_2to1_map(m, make_rng(seed, a, t))
            g = apply_minor(f, pi)
            if g not in index:
                if strict:
                    raise SliceNotClosed(f"2-to-1 minor of {f!r} is not in the slice")
                continue
            used += 1
            hits += bool(_map_mask(cf, pi.image) & C.mask(g))
        if used:
            est = hits / used
            se = math.sqrt(est * (1 - est) / max(used - 1, 1))
            rows.append((f, est, se, used))
    worst = min(rows, key=lambda r: r[1]) if rows else None
    holds = all(r[1] >= tau for r in rows)
    return Verdict(holds, "random2to1", len(rows), None if holds else worst, {"rows": rows, "tau": tau})


def search_choice_table(members, variant: str = "multiple", M: int = 1):
    """Experimental: exhaustive search for any choice table passing ``variant``.

    Only for slices of at most 12 members and M <= 2.
    """
    members = sorted(set(members), key=lambda f: f.key())
    if len(members) > 12 or M > 2:
        raise ArityError("choice search is limited to 12 members and M <= 2")
    options = []
    for f in members:
        opts = [frozenset(c) for size in range(1, M + 1) for c in itertools.combinations(range(f.arity), size)]
        options.append(opts)
    for combo in itertools.product(*options):
        table = ChoiceTable(dict(zip(members, combo)), M)
        if verify_choice_condition(members, table, variant, M=M, strict=False):
            return table
    return None


# ----------------------------------------------------------------- slices

def projection_slice(arities=(1, 2)) -> list:
    from .boolfn import dictator

    return [dictator(n, i) for n in arities for i in range(n)]


def projection_choice(members) -> ChoiceTable:
    choices = {}
    for f in members:
        coords = [i for i in range(f.arity) if np.array_equal(f.table, ((np.arange(1 << f.arity) >> i) & 1))]
        if len(coords) != 1:
            raise ValueError(f"{f!r} is not a projection")
        choices[f] = frozenset(coords)
    return ChoiceTable(choices, 1)


def argmax_influence_choice(members, p: float = 0.5) -> ChoiceTable:
    from .fourier import influences

    choices = {}
    for f in members:
        inf = influences(f, p)
        choices[f] = frozenset([int(np.argmax(inf))])
    return ChoiceTable(choices, 1)


def _cache_path(name):
    root = os.environ.get("MINIONLAB_CACHE")
    if not root:
        return None
    os.makedirs(root, exist_ok=True)
    return os.path.join(root, name)


def positive_ptf_slice(max_arity: int = 4, k: int = 1, margin: float = 1e-6) -> list:
    """Monotone functions of arity 1..max_arity with a degree-k positive representation.

    Cached as hex tables under ``$MINIONLAB_CACHE`` when that variable is set.
    """
    from .boolfn import parse_hex
    from .ptf import find_representation
    from .shapley import is_monotone

    if max_arity > 4:
        raise ArityError("slice enumeration is capped at arity 4")
    key = hashlib.sha1(f"ptf+:{max_arity}:{k}:{margin!r}".encode()).hexdigest()[:16]
    path = _cache_path(f"slice-{key}.json")
    if path and os.path.exists(path):
        with open(path) as fh:
            return [parse_hex(a, h) for a, h in json.load(fh)]
    out = []
    for n in range(1, max_arity + 1):
        for code in range(1 << (1 << n)):
            f = BooleanFunction(n, (code >> np.arange(1 << n)) & 1)
            if is_monotone(f) and find_representation(f, min(k, n), "positive", margin) is not None:
                out.append(f)
    if path:
        with open(path, "w") as fh:
            json.dump([[f.arity, f.to_hex()] for f in out], fh)
    return out


def heavy_set_choice(members, k: int = 1, eps: float = 0.5, margin: float = 1e-6) -> ChoiceTable:
    """C(f) = the set returned by the iterative heavy-set procedure; M = ceil(2k/eps + 1)."""
    from .ptf import find_heavy_set

    choices = {}
    bound = 0
    for f in members:
        res = find_heavy_set(f, min(k, f.arity), eps, margin)
        if not res.coords:
            raise ValueError(f"heavy-set procedure returned no coordinates for {f!r}")
        choices[f] = res.coords
        bound = max(bound, len(res.coords))
    M = max(bound, layered_length(k, eps))
    return ChoiceTable(choices, M)


def layered_length(k: int, eps: float) -> int:
    return math.ceil(2 * k / eps + 1)


# --------------------------------------------------------------- file format

def format_structure(S: RelationalStructure) -> str:
    lines = [f"universe={S.size} relations={len(S.relations)}"]
    for r, rel in zip(S.signature.arities, S.relations):
        lines.append(f"arity={r}")
        lines.extend(" ".join(str(v) for v in tup) for tup in rel)
    return "\n".join(lines) + "\n"


def _parse_structure_lines(lines):
    head = dict(part.split("=", 1) for part in lines[0].split())
    size, count = int(head["universe"]), int(head["relations"])
    arities, rels = [], []
    for ln in lines[1:]:
        if ln.startswith("arity="):
            arities.append(int(ln.split("=", 1)[1]))
            rels.append([])
        else:
            if not rels:
                raise ValueError("tuple before the first arity line")
            rels[-1].append(tuple(int(v) for v in ln.split()))
    if len(rels) != count:
        raise ValueError(f"header announces {count} relations, found {len(rels)}")
    return RelationalStructure(size, rels, arities=arities)


def _clean(text):
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]


def parse_structure(text: str) -> RelationalStructure:
    lines = _clean(text)
    if not lines:
        raise ValueError("empty structure file")
    return _parse_structure_lines(lines)


def format_template(T: Template) -> str:
    return format_structure(T.A) + "---\n" + format_structure(T.B) + "witness=" + " ".join(map(str, T.witness)) + "\n"


def parse_template(text: str) -> Template:
    lines = _clean(text)
    try:
        cut = lines.index("---")
    except ValueError:
        raise ValueError("template file needs a '---' line between the two structures") from None
    rest = lines[cut + 1:]
    witness = None
    if rest and rest[-1].startswith("witness="):
        witness = tuple(int(v) for v in rest[-1].split("=", 1)[1].split())
        rest = rest[:-1]
    return Template(_parse_structure_lines(lines[:cut]), _parse_structure_lines(rest), witness)
