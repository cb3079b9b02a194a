"""Deterministic randomness.

All experiments draw from numpy's Philox4x64 generator, a counter-based
bit generator.  A stream is keyed by ``SeedSequence([seed, *path])`` so
trial ``t`` of an experiment seeded with ``seed`` always sees the same
numbers, independent of scheduling or thread count.
"""
import numpy as np

SEED_MASK = (1 << 64) - 1


def make_rng(seed=0, *path):
    """Return a Philox-backed Generator for ``(seed, *path)``."""
    key = [int(seed) & SEED_MASK] + [int(x) & SEED_MASK for x in path]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def as_rng(rng):
    """Accept a Generator or an integer seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        raise ValueError("an explicit seed or Generator is required")
    return make_rng(rng)
