import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from minionlab import boolfn as B
from minionlab import fourier as F
from minionlab import pullback as P
from minionlab.boolfn import ArityError

from conftest import biases, boolean_functions


def pairings(n):
    """Perfect matchings of range(n) as lists of pairs, an independent route to 2-to-1 maps."""
    if n == 0:
        yield []
        return
    first = 0
    for j in range(1, n):
        rest = [c for c in range(1, n) if c != j]
        for sub in pairings(len(rest)):
            yield [(first, j)] + [(rest[a], rest[b]) for a, b in sub]


def enumerated_mass(m, p):
    out = {}
    maps = 0
    for matching in pairings(2 * m):
        for labels in itertools.permutations(range(m)):
            maps += 1
            for x in itertools.product((0, 1), repeat=m):
                z = [0] * (2 * m)
                for (a, b), lab in zip(matching, labels):
                    z[a] = z[b] = x[lab]
                w = math.prod(p if v else 1 - p for v in x)
                out[tuple(z)] = out.get(tuple(z), 0.0) + w
    return {z: v / maps for z, v in out.items()}, maps


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("p", [1 / 3, 0.5, 0.9])
def test_closed_form_matches_matchings(m, p):
    masses, maps = enumerated_mass(m, p)
    assert maps == B.count_2to1_maps(m)
    for z in itertools.product((0, 1), repeat=2 * m):
        assert P.pullback_mass(z, p) == pytest.approx(masses.get(z, 0.0), abs=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_module_enumeration_matches_closed_form(m):
    for p in (1 / 3, 0.5, 0.9):
        np.testing.assert_allclose(P.pullback_mass_by_enumeration(m, p), P.pullback_mass_table(m, p), atol=1e-12)


@given(st.integers(1, 10), biases)
def test_mass_sums_to_one(m, p):
    assert P.pullback_mass_table(m, p).sum() == pytest.approx(1.0, abs=1e-9)


def test_odd_points_have_no_mass():
    assert P.pullback_mass((1, 0, 0, 0), 0.4) == 0.0
    with pytest.raises(ArityError):
        P.pullback_mass((1, 0, 0), 0.4)


@pytest.mark.parametrize("m", range(1, 7))
@pytest.mark.parametrize("p", [0.1, 1 / 3, 0.5, 0.9])
def test_density_ratio_at_least_one(m, p):
    assert P.density_ratio_audit(m, p).min_ratio >= 1 - 1e-12


def test_density_ratio_small_case():
    a = P.density_ratio_audit(2, 0.5)
    assert a.min_ratio == pytest.approx(4 / 3)


def test_sampler_matches_mass():
    rng = np.random.default_rng(3)
    idx = P.sample_pullback(3, 0.3, rng, size=200_000)
    freq = np.bincount(idx, minlength=64) / idx.size
    mass = P.pullback_mass_table(3, 0.3)
    se = np.sqrt(mass * (1 - mass) / idx.size)
    assert np.all(np.abs(freq - mass) <= 5 * se + 1e-12)
    z = P.sample_pullback(3, 0.3, rng)
    assert len(z) == 6 and sum(z) % 2 == 0


@pytest.mark.parametrize("p", [1 / 3, 0.5])
def test_gluing_exhaustive_arity4(p):
    lhs, rhs = P.gluing_bound_batch(P.all_functions(4), 4, p)
    assert np.all(lhs - rhs >= -1e-9)


@given(boolean_functions(min_arity=2, max_arity=6), biases)
def test_gluing_single_matches_batch(f, p):
    lhs, rhs = P.gluing_bound_audit(f, p)
    bl, br = P.gluing_bound_batch(f.table[None, :], f.arity, p)
    assert lhs == pytest.approx(bl[0], abs=1e-12) and rhs == pytest.approx(br[0], abs=1e-12)
    assert lhs >= rhs - 1e-9


@given(st.integers(1, 5), biases)
def test_parity_pullback_expectation_zero(m, p):
    assert P.pullback_expectation(B.parity(2 * m), p) == pytest.approx(0.0, abs=1e-12)


@given(st.integers(1, 5), biases)
def test_dictator_pullback_expectation(m, p):
    assert P.pullback_expectation(B.dictator(2 * m, 0), p) == pytest.approx(p, abs=1e-12)


def test_exact_vs_mc_expectation():
    h = B.majority(6)
    exact = P.pullback_expectation(h, 0.4)
    est, se = P.pullback_expectation_se(h, 0.4, "mc", 100_000, 9)
    assert abs(est - exact) <= 3 * se


def test_split_map_uniform():
    rng = np.random.default_rng(8)
    counts = {}
    for _ in range(18000):
        pi = P.split_2to1_map(3, 1, rng)
        counts[pi.image] = counts.get(pi.image, 0) + 1
    assert len(counts) == 90
    expected = 18000 / 90
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 89 + 5 * math.sqrt(2 * 89)


def test_preservation_dictator():
    r = P.influence_preservation_experiment(B.dictator(6, 2), 2, 0.5, 200, (0.2,), seed=4)
    assert np.all(r.influences == 0.25)
    assert r.exceedance == [1.0]


def test_preservation_parity_collapses():
    # each fibre holds two equal inputs, so every 2-to-1 minor of parity is constant
    law = P.influence_preservation_exact(B.parity(4), 0, 0.5)
    assert law == {0.0: 1.0}


def test_preservation_matches_exact_law():
    f = B.majority(5)
    f = P.pad_to_even(f)
    law = P.influence_preservation_exact(f, 0, 0.5)
    r = P.influence_preservation_experiment(f, 0, 0.5, 3000, (0.01,), seed=2)
    vals, counts = np.unique(np.round(r.influences, 12), return_counts=True)
    for v, c in zip(vals, counts):
        q = law[v]
        assert abs(c / 3000 - q) <= 5 * math.sqrt(q * (1 - q) / 3000) + 1e-12


def test_preservation_thread_invariant():
    f = P.majority_of_xor_pairs(4)
    a = P.influence_preservation_experiment(f, 1, 0.5, 300, seed=7, threads=1)
    b = P.influence_preservation_experiment(f, 1, 0.5, 300, seed=7, threads=8)
    np.testing.assert_array_equal(a.influences, b.influences)
    np.testing.assert_array_equal(a.targets, b.targets)


def test_majority_of_xor_pairs_influences():
    f = P.majority_of_xor_pairs(10)
    inf = F.influences(f, 0.5)
    assert np.allclose(inf, inf[0]) and inf[0] >= 0.05
    assert inf.sum() <= f.arity / 4


def test_pad_to_even():
    g = P.pad_to_even(B.majority(3))
    assert g.arity == 4 and F.influence(g, 0.5, 3) == 0.0
    assert P.pad_to_even(B.parity(2)) == B.parity(2)
