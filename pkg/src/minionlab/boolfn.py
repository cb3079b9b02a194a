"""Boolean functions f : {0,1}^n -> {0,1} as truth tables, and minor maps.

Coordinates are 0-based throughout the package.  The truth table is
little-endian: the input ``x`` sits at index ``sum(x[j] << j)``, so the first
coordinate is the least significant bit.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _backend
from .rng import as_rng

MAX_ARITY = 24


class ArityError(ValueError):
    """Arity mismatch or arity above a documented cap."""


def _check_arity(n, cap=MAX_ARITY):
    if n < 0 or n > cap:
        raise ArityError(f"arity {n} outside [0, {cap}]")


def index_of(x: Sequence[int]) -> int:
    idx = 0
    for j, b in enumerate(x):
        if b:
            idx |= 1 << j
    return idx


def point_of(idx: int, n: int) -> tuple:
    return tuple((idx >> j) & 1 for j in range(n))


# point helpers: x xor e_i, x with x_i := s, and x extended by one coordinate
def flip(x: Sequence[int], i: int) -> tuple:
    y = list(x)
    y[i] ^= 1
    return tuple(y)


def set_bit(x: Sequence[int], i: int, s: int) -> tuple:
    y = list(x)
    y[i] = int(s)
    return tuple(y)


def append(x: Sequence[int], s: int) -> tuple:
    return tuple(x) + (int(s),)


class BooleanFunction:
    """Immutable Boolean function backed by a uint8 truth table."""

    __slots__ = ("arity", "table", "_hash")

    def __init__(self, arity: int, table):
        _check_arity(arity)
        t = np.ascontiguousarray(table, dtype=np.uint8)
        if t.ndim != 1 or t.shape[0] != 1 << arity:
            raise ArityError(f"table length {t.shape[0]} != 2**{arity}")
        if t.size and t.max() > 1:
            raise ValueError("truth table entries must be 0 or 1")
        t = t.copy()
        t.flags.writeable = False
        self.arity = arity
        self.table = t
        self._hash = None

    def __call__(self, x: Sequence[int]) -> int:
        return eval_point(self, x)

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.arity == other.arity and np.array_equal(self.table, other.table)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.arity, self.table.tobytes()))
        return self._hash

    def __repr__(self):
        return f"BooleanFunction(arity={self.arity}, table={self.to_hex()})"

    def key(self):
        """Sort key: arity first, then the truth table read as an integer."""
        return (self.arity, int.from_bytes(np.packbits(self.table, bitorder="little").tobytes(), "little"))

    @property
    def is_constant(self) -> bool:
        return bool(self.table.min() == self.table.max())

    def to_hex(self) -> str:
        return np.packbits(self.table, bitorder="little").tobytes().hex()

    def ones(self) -> int:
        return int(self.table.sum())


def eval_point(f: BooleanFunction, x: Sequence[int]) -> int:
    if len(x) != f.arity:
        raise ArityError(f"input of length {len(x)} for a function of arity {f.arity}")
    return int(f.table[index_of(x)])


# ---------------------------------------------------------------- constructors

def from_callable(n: int, fn) -> BooleanFunction:
    _check_arity(n, 20)
    return BooleanFunction(n, [1 if fn(point_of(idx, n)) else 0 for idx in range(1 << n)])


def constant(n: int, b: int) -> BooleanFunction:
    _check_arity(n)
    return BooleanFunction(n, np.full(1 << n, 1 if b else 0, dtype=np.uint8))


def dictator(n: int, i: int) -> BooleanFunction:
    _check_arity(n)
    if not 0 <= i < n:
        raise IndexError(f"coordinate {i} out of range for arity {n}")
    idx = np.arange(1 << n, dtype=np.int64)
    return BooleanFunction(n, (idx >> i) & 1)


def make_threshold(n: int, t: int) -> BooleanFunction:
    """f(x) = 1 iff x has at least ``t`` ones (0 <= t <= n+1)."""
    _check_arity(n)
    if not 0 <= t <= n + 1:
        raise ValueError(f"threshold {t} outside [0, {n + 1}]")
    return BooleanFunction(n, (_backend.popcounts(n) >= t).astype(np.uint8))


def majority(n: int) -> BooleanFunction:
    """Strict majority, i.e. the threshold at floor(n/2)+1."""
    return make_threshold(n, n // 2 + 1)


def parity(n: int) -> BooleanFunction:
    _check_arity(n)
    return BooleanFunction(n, (_backend.popcounts(n) & 1).astype(np.uint8))


def conjunction(n: int) -> BooleanFunction:
    return make_threshold(n, n)


def disjunction(n: int) -> BooleanFunction:
    return make_threshold(n, 1)


def tribes(width: int, count: int) -> BooleanFunction:
    """OR of ``count`` disjoint ANDs of ``width`` consecutive coordinates."""
    n = width * count
    _check_arity(n)
    idx = np.arange(1 << n, dtype=np.int64)
    block = (1 << width) - 1
    out = np.zeros(1 << n, dtype=bool)
    for c in range(count):
        out |= ((idx >> (c * width)) & block) == block
    return BooleanFunction(n, out.astype(np.uint8))


def parse_hex(arity: int, text: str) -> BooleanFunction:
    """Inverse of :meth:`BooleanFunction.to_hex`."""
    _check_arity(arity)
    raw = bytes.fromhex(text.strip())
    need = max(1, (1 << arity) // 8)
    if len(raw) != need:
        raise ValueError(f"expected {need} bytes of table for arity {arity}, got {len(raw)}")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    if np.any(bits[1 << arity:]):
        raise ValueError("non-zero padding bits in table")
    return BooleanFunction(arity, bits[: 1 << arity])


def random_function(n: int, rng, density: float = 0.5) -> BooleanFunction:
    rng = as_rng(rng)
    return BooleanFunction(n, (rng.random(1 << n) < density).astype(np.uint8))


def influence_collapse_example() -> BooleanFunction:
    """f(x) = 0 if x2 = x3 = x4 else x1 (arity 4; 1-based names)."""
    return from_callable(4, lambda x: 0 if x[1] == x[2] == x[3] else x[0])


# ------------------------------------------------------------------ minor maps

@dataclass(frozen=True)
class MinorMap:
    """pi : [source_arity] -> [target_arity], stored as the tuple of images.

    Surjectivity is not required; unused targets are dummy variables of the minor.
    """

    source_arity: int
    target_arity: int
    image: tuple

    def __post_init__(self):
        image = tuple(int(v) for v in self.image)
        object.__setattr__(self, "image", image)
        if len(image) != self.source_arity:
            raise ArityError("image length differs from source arity")
        if self.target_arity < 0 or any(not 0 <= v < self.target_arity for v in image):
            raise ValueError(f"image entries must lie in [0, {self.target_arity})")

    def __call__(self, i: int) -> int:
        return self.image[i]

    def apply_to_set(self, coords: Iterable[int]) -> frozenset:
        return frozenset(self.image[i] for i in coords)

    def then(self, rho: "MinorMap") -> "MinorMap":
        """The composition rho o self (apply self first)."""
        if rho.source_arity != self.target_arity:
            raise ArityError("maps are not composable")
        return MinorMap(self.source_arity, rho.target_arity, tuple(rho.image[v] for v in self.image))

    def preimage(self, j: int) -> tuple:
        return tuple(i for i, v in enumerate(self.image) if v == j)

    @classmethod
    def identity(cls, n: int) -> "MinorMap":
        return cls(n, n, tuple(range(n)))


class TwoToOneMap(MinorMap):
    """A minor map [2m] -> [m] whose fibres all have size two."""

    def __post_init__(self):
        super().__post_init__()
        m = self.target_arity
        if self.source_arity != 2 * m or m < 1:
            raise ValueError("a 2-to-1 map needs source arity 2 * target arity >= 2")
        counts = np.bincount(np.asarray(self.image, dtype=np.int64), minlength=m)
        if np.any(counts != 2):
            raise ValueError("every target must have exactly two preimages")

    @classmethod
    def from_image(cls, image: Sequence[int]) -> "TwoToOneMap":
        return cls(len(image), len(image) // 2, tuple(image))


def compose(rho: MinorMap, pi: MinorMap) -> MinorMap:
    """rho o pi."""
    return pi.then(rho)


def apply_minor(f: BooleanFunction, pi: MinorMap) -> BooleanFunction:
    """g = f^pi with g(a) = f(a[pi(0)], ..., a[pi(n-1)])."""
    if pi.source_arity != f.arity:
        raise ArityError(f"map from arity {pi.source_arity} applied to arity {f.arity}")
    _check_arity(pi.target_arity)
    table = _backend.minor_table(f.table, np.asarray(pi.image, dtype=np.int64), pi.target_arity)
    return BooleanFunction(pi.target_arity, table)


def identify_last_pair(m: int) -> MinorMap:
    """[m] -> [m-1] sending m-2 and m-1 to m-2, identity elsewhere."""
    if m < 2:
        raise ValueError("need arity >= 2")
    return MinorMap(m, m - 1, tuple(range(m - 1)) + (m - 2,))


def random_2to1_map(m: int, rng) -> TwoToOneMap:
    """Uniform 2-to-1 map [2m] -> [m].

    A uniform permutation sigma of [2m] sends sigma(2j) and sigma(2j+1) to j;
    each 2-to-1 map arises from exactly 2**m permutations.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = as_rng(rng)
    sigma = rng.permutation(2 * m)
    image = np.empty(2 * m, dtype=np.int64)
    image[sigma] = np.arange(2 * m) // 2
    return TwoToOneMap(2 * m, m, tuple(image.tolist()))


def enumerate_2to1_maps(m: int) -> list:
    """All (2m)!/2**m maps [2m] -> [m] with fibres of size two, in lexicographic order."""
    if m < 1 or m > 5:
        raise ValueError("enumerate_2to1_maps supports 1 <= m <= 5")
    out = []
    image = [0] * (2 * m)
    left = [2] * m

    def rec(pos):
        if pos == 2 * m:
            out.append(TwoToOneMap(2 * m, m, tuple(image)))
            return
        for label in range(m):
            if left[label]:
                left[label] -= 1
                image[pos] = label
                rec(pos + 1)
                left[label] += 1

    rec(0)
    return out


def count_2to1_maps(m: int) -> int:
    return math.factorial(2 * m) // 2 ** m


def iter_minor_maps(n: int, m: int):
    """All m**n maps [n] -> [m] in lexicographic order of the image tuple."""
    for image in itertools.product(range(m), repeat=n):
        yield MinorMap(n, m, image)


# -------------------------------------------------------------- file format

def format_function(f: BooleanFunction) -> str:
    return f"arity={f.arity} table={f.to_hex()}"


def parse_function_line(line: str) -> BooleanFunction:
    fields = dict(part.split("=", 1) for part in line.split())
    try:
        return parse_hex(int(fields["arity"]), fields["table"])
    except KeyError as exc:
        raise ValueError(f"malformed function record: {line!r}") from exc


def read_functions(path) -> list:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                out.append(parse_function_line(line))
    return out


def write_functions(path, functions: Iterable[BooleanFunction]) -> None:
    with open(path, "w") as fh:
        for f in functions:
            fh.write(format_function(f) + "\n")
