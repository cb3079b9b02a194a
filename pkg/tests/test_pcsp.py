import itertools

import pytest
from hypothesis import given, settings, strategies as st

from minionlab import boolfn as B
from minionlab import pcsp
from minionlab.boolfn import MinorMap
from minionlab.pcsp import RelationalStructure


def brute_force_homs(X, A):
    out = []
    for phi in itertools.product(range(A.size), repeat=X.size):
        if pcsp.is_homomorphism(phi, X, A):
            out.append(phi)
    return out


@st.composite
def small_graphs(draw, max_size=5):
    n = draw(st.integers(1, max_size))
    pairs = [(a, b) for a in range(n) for b in range(n) if a < b]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    edges = [(a, b) for a, b in chosen] + [(b, a) for a, b in chosen]
    return RelationalStructure(n, [edges], arities=[2])


@given(small_graphs(), st.integers(2, 3))
def test_search_matches_brute_force(X, k):
    K = pcsp.clique(k)
    homs = sorted(tuple(int(v) for v in h) for h in pcsp.iter_homomorphisms(X, K))
    assert homs == brute_force_homs(X, K)
    found = pcsp.find_homomorphism(X, K)
    assert (found is None) == (not homs)


def test_search_thread_invariant():
    X = pcsp.clique(3)
    a = [tuple(h) for h in pcsp.iter_homomorphisms(pcsp.power_structure(X, 2), X, threads=1)]
    b = [tuple(h) for h in pcsp.iter_homomorphisms(pcsp.power_structure(X, 2), X, threads=8)]
    assert a == b


def test_k2_binary_polymorphisms():
    pols = [pcsp.to_boolean(t) for t in pcsp.enumerate_polymorphisms(pcsp.builtin_template("k2"), 2)]
    expected = {B.dictator(2, 0), B.dictator(2, 1),
                B.BooleanFunction(2, 1 - B.dictator(2, 0).table), B.BooleanFunction(2, 1 - B.dictator(2, 1).table)}
    assert set(pols) == expected and len(pols) == 4


def test_k3_polymorphism_counts():
    T = pcsp.builtin_template("k3")
    assert [len(pcsp.enumerate_polymorphisms(T, n)) for n in (1, 2)] == [6, 12]
    assert sorted(tuple(t) for t in pcsp.enumerate_polymorphisms(T, 1)) == sorted(itertools.permutations(range(3)))


@pytest.mark.parametrize("name", ["k2", "3sat", "1in3-nae", "k3"])
def test_projections_present(name):
    T = pcsp.builtin_template(name)
    if T.A.size > T.B.size:
        return
    for n in (1, 2, 3):
        pols = {tuple(t) for t in pcsp.enumerate_polymorphisms(T, n)}
        for i in range(n):
            proj = pcsp.projection_table(T.A.size, n, i)
            assert tuple(int(T.witness[v]) for v in proj) in pols


@pytest.mark.parametrize("name", ["k2", "3sat", "1in3-nae"])
def test_minor_closure(name):
    assert pcsp.check_minor_closure(pcsp.builtin_template(name), 3) is None


def test_power_structure():
    K3 = pcsp.clique(3)
    P = pcsp.power_structure(K3, 2)
    assert P.size == 9 and len(P.relations[0]) == 36
    proj = pcsp.projection_table(3, 2, 0)
    assert pcsp.is_homomorphism(proj, P, K3)


def test_k3_not_to_k2():
    assert pcsp.find_homomorphism(pcsp.clique(3), pcsp.clique(2)) is None


def test_3sat_encoding():
    clauses = [(1, 2, 3), (-1, -2, -3), (1, -2, 3)]
    X = pcsp.encode_3sat(clauses, 3)
    phi = pcsp.find_homomorphism(X, pcsp.three_sat_structure())
    a = pcsp.assignment_from_hom(phi, 3)
    assert all(any((lit > 0) == bool(a[abs(lit) - 1]) for lit in c) for c in clauses)
    unsat = [tuple(s * v for s, v in zip(signs, (1, 2, 3))) for signs in itertools.product((1, -1), repeat=3)]
    assert pcsp.sat_brute_force(unsat, 3) is None
    assert pcsp.find_homomorphism(pcsp.encode_3sat(unsat, 3), pcsp.three_sat_structure()) is None


@settings(max_examples=30)
@given(st.lists(st.tuples(*[st.integers(1, 4).flatmap(lambda v: st.sampled_from([v, -v]))] * 3),
                min_size=1, max_size=12))
def test_3sat_agrees_with_brute_force(clauses):
    X = pcsp.encode_3sat(clauses, 4)
    phi = pcsp.find_homomorphism(X, pcsp.three_sat_structure())
    assert (phi is None) == (pcsp.sat_brute_force(clauses, 4) is None)


def test_symmetry_and_thresholds():
    assert pcsp.is_symmetric(B.majority(5)) and not pcsp.is_symmetric(B.dictator(3, 0))
    assert pcsp.threshold_of(B.make_threshold(4, 2)) == 2
    assert pcsp.has_threshold_minor(B.majority(3), 3, proper=True) == MinorMap.identity(3)
    assert pcsp.has_threshold_minor(B.parity(3), 2, proper=True) is None
    f = B.from_callable(3, lambda x: x[0] or (x[1] and x[2]))
    assert pcsp.has_threshold_minor(f, 2, proper=True).image == (0, 1, 1)


def test_projection_slice_single():
    members = pcsp.projection_slice()
    v = pcsp.verify_choice_condition(members, pcsp.projection_choice(members), "single")
    assert v.holds and v.checked > 0


def test_collapse_pair_fails_multiple():
    f = B.influence_collapse_example()
    g = B.apply_minor(f, MinorMap(4, 2, (1, 0, 0, 0)))
    C = pcsp.argmax_influence_choice([f, g])
    v = pcsp.verify_choice_condition([f, g], C, "multiple", strict=False, collect=True)
    assert not v.holds
    assert any(a == f and pi.image == (1, 0, 0, 0) and b == g for a, pi, b in v.details["failures"])


def test_choice_table_validation():
    with pytest.raises(ValueError):
        pcsp.ChoiceTable({B.dictator(2, 0): frozenset()}, 1)
    with pytest.raises(ValueError):
        pcsp.ChoiceTable({B.dictator(2, 0): frozenset({0, 1})}, 1)


def test_slice_not_closed():
    f = B.majority(3)
    C = pcsp.ChoiceTable({f: frozenset({0})}, 1)
    with pytest.raises(pcsp.SliceNotClosed):
        pcsp.verify_choice_condition([f], C, "single")


def test_layered_on_projections():
    members = pcsp.projection_slice((1, 2, 3))
    v = pcsp.verify_choice_condition(members, pcsp.projection_choice(members), "layered", M=3)
    assert v.holds


def test_random_variant_on_projections():
    members = pcsp.projection_slice((1, 2, 4))
    members += [B.dictator(4, i) for i in range(4)]
    v = pcsp.verify_choice_condition(members, pcsp.projection_choice(members), "random2to1",
                                     tau=0.99, trials=50, seed=1, strict=False)
    assert v.holds


def test_search_choice_table():
    members = pcsp.projection_slice()
    table = pcsp.search_choice_table(members, "single", 1)
    assert table is not None


def test_heavy_set_choice_layered(tmp_path, monkeypatch):
    monkeypatch.setenv("MINIONLAB_CACHE", str(tmp_path))
    members = pcsp.positive_ptf_slice(3, 1)
    assert list(tmp_path.iterdir())
    assert pcsp.positive_ptf_slice(3, 1) == members
    C = pcsp.heavy_set_choice(members, 1, 0.5)
    v = pcsp.verify_choice_condition(members, C, "layered", M=pcsp.layered_length(1, 0.5))
    assert v.holds


def test_file_formats():
    T = pcsp.builtin_template("1in3-nae")
    back = pcsp.parse_template(pcsp.format_template(T))
    assert back.A == T.A and back.B == T.B and back.witness == T.witness
    with pytest.raises(ValueError):
        pcsp.parse_template("universe=2 relations=1\narity=2\n0 1\n")
    with pytest.raises(ValueError):
        pcsp.parse_structure("universe=2 relations=2\narity=2\n0 1\n")
