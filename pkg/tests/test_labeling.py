import csv
import io
import json
from fractions import Fraction
from itertools import combinations, product
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ordered_turan.core import OrderedHypergraph, ParameterError, build_pattern, find_embedding, natural_path
from ordered_turan.labeling import (
    Labeling,
    PreconditionError,
    bad_by_middle,
    bad_fraction_limit,
    badcount_prediction,
    conjectured_good_fraction,
    cost,
    cost_bruteforce,
    density_rows,
    descend_k1,
    emit_density_table,
    even_construction,
    even_limit_part_fractions,
    even_partition,
    hypergraph_to_labeling,
    improve_k1_swap,
    is_monotone,
    k1_triple,
    labeling_to_hypergraph,
    longest_path_labels,
    odd_construction,
    pairs,
    profile,
    profile_violations,
    reverse_invert,
)


@st.composite
def labelings(draw, max_n=7, max_k=4):
    n = draw(st.integers(3, max_n))
    k = draw(st.integers(1, max_k))
    values = draw(st.lists(st.integers(1, k), min_size=comb(n, 2), max_size=comb(n, 2)))
    return Labeling(n, k, tuple(values))


def labeling_from(n, k, table):
    return Labeling.from_function(n, k, lambda u, v: table[(u, v)])


# ---------------------------------------------------------------------------
# basics and formats

def test_pairs_in_lex_order():
    assert pairs(4) == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]


def test_label_range_checked():
    with pytest.raises(ParameterError):
        Labeling(3, 2, (1, 2, 3))
    with pytest.raises(ParameterError):
        Labeling(3, 2, (1, 2))


@settings(max_examples=30)
@given(labelings())
def test_csv_round_trip(phi):
    again = Labeling.from_files(phi.to_csv(), json.dumps(phi.sidecar()))
    assert again == phi
    rows = list(csv.reader(io.StringIO(phi.to_csv())))
    assert rows[0] == ["u", "v", "label"] and len(rows) == comb(phi.n, 2) + 1


# ---------------------------------------------------------------------------
# cost

def test_cost_examples():
    assert cost(Labeling.constant(3, 1)) == (0, 1)
    for n in range(3, 8):
        right = Labeling.from_function(n, n - 1, lambda u, v: v - 1)
        assert cost(right) == (comb(n, 3), 0)
    assert cost(odd_construction(6, 3))[1] == 2


@settings(max_examples=60)
@given(labelings())
def test_cost_matches_bruteforce(phi):
    assert cost(phi) == cost_bruteforce(phi)
    assert sum(bad_by_middle(phi)) == cost(phi)[1]
    assert sum(cost(phi)) == comb(phi.n, 3)


# ---------------------------------------------------------------------------
# hypergraph correspondence

def test_hypergraph_examples():
    assert len(labeling_to_hypergraph(Labeling.constant(5, 2))) == 0
    right = Labeling.from_function(4, 3, lambda u, v: v - 1)
    assert labeling_to_hypergraph(right) == OrderedHypergraph.complete(4, 3)
    g = labeling_to_hypergraph(even_construction(4, 2))
    assert g.edges == {(1, 2, 3), (1, 2, 4), (1, 3, 4)}
    assert find_embedding(g, build_pattern(natural_path(3, 4))) is None


def test_longest_path_examples():
    native = longest_path_labels(OrderedHypergraph(5, 3))
    assert set(native.values()) == {0}
    native = longest_path_labels(OrderedHypergraph.from_edges(4, 3, [(1, 2, 3)]))
    assert native[(1, 2)] == 0 and native[(2, 3)] == 1
    assert all(x == 0 for p, x in native.items() if p != (2, 3))
    phi = hypergraph_to_labeling(OrderedHypergraph.from_edges(4, 3, [(1, 2, 3)]), 4)
    assert phi(2, 3) == 2 and phi(1, 2) == 1


def test_hypergraph_to_labeling_rejects_paths():
    with pytest.raises(PreconditionError) as info:
        hypergraph_to_labeling(OrderedHypergraph.complete(4, 3), 4)
    assert info.value.witness == (1, 2, 3, 4)


@settings(max_examples=40, deadline=None)
@given(labelings(max_n=7, max_k=3))
def test_round_trip_keeps_good_triples(phi):
    s = phi.k + 2
    g = labeling_to_hypergraph(phi)
    # a k-labeling's hypergraph never contains the path on k+2 vertices
    assert find_embedding(g, build_pattern(natural_path(3, s))) is None
    back = hypergraph_to_labeling(g, s)
    assert cost(back)[0] >= len(g)


# ---------------------------------------------------------------------------
# constructions

def test_odd_examples():
    assert cost(odd_construction(120, 3))[1] == 2 * comb(60, 3) == 68440
    for n in (3, 5, 9):
        assert cost(odd_construction(n, 1))[1] == comb(n, 3)
    with pytest.raises(ParameterError):
        odd_construction(6, 2)


def test_even_example():
    phi = even_construction(4, 2)
    assert [phi(u, v) for u, v in pairs(4)] == [1, 1, 2, 2, 2, 2]
    assert cost(phi) == (3, 1)
    with pytest.raises(ParameterError):
        even_construction(6, 3)


@pytest.mark.parametrize("k", [2, 4, 6])
def test_even_parts_approach_limits(k):
    n = 2400
    sizes = even_partition(n, k).lengths
    assert len(sizes) == k and sum(sizes) == n
    for got, want in zip(sizes, even_limit_part_fractions(k)):
        assert abs(Fraction(got, n) - want) < Fraction(1, 200)
    assert sum(even_limit_part_fractions(k)) == 1


@pytest.mark.parametrize("n,k", [(9, 1), (12, 3), (15, 5), (10, 2), (13, 4), (16, 6)])
def test_constructions_monotone_and_free(n, k):
    phi = odd_construction(n, k) if k % 2 else even_construction(n, k)
    assert is_monotone(phi)
    g = labeling_to_hypergraph(phi)
    assert find_embedding(g, build_pattern(natural_path(3, k + 2))) is None


def test_prediction_examples():
    n = 50
    assert badcount_prediction(0, 1, 0, n) == comb(n, 3)
    assert badcount_prediction(Fraction(1, 3), 0, Fraction(1, 2), n) == 0
    half = Fraction(1, 2)
    # two halves with empty outer neighbours: (1/2)(1/2)(1) + (1)(1/2)(1/2)
    total = badcount_prediction(0, half, half, n) + badcount_prediction(half, half, 0, n)
    assert total == half * comb(n, 3)
    with pytest.raises(ParameterError):
        badcount_prediction(-1, 1, 0, n)


def test_even_k2_measured_against_prediction():
    n = 200
    phi = even_construction(n, 2)
    assert abs(Fraction(cost(phi)[1], comb(n, 3)) - bad_fraction_limit(2)) < Fraction(1, 50)


def test_limits():
    assert bad_fraction_limit(3) == Fraction(1, 4)
    assert bad_fraction_limit(4) == Fraction(1, 6)
    assert bad_fraction_limit(1) == 1
    assert conjectured_good_fraction(3) == Fraction(3, 4)


# ---------------------------------------------------------------------------
# profiles, symmetry, swaps

def test_profile_example():
    prof = profile(even_construction(4, 2))
    assert prof.phi_left == (0, 1, 2, 2)
    assert prof.phi_right == (1, 2, 2, 3)
    assert prof.part(0) == {1} and prof.part(1) == {2} and prof.part(2) == {3, 4}
    assert prof.part(1, hat=True) == {1} and prof.part(2, hat=True) == {2, 3} and prof.part(3, hat=True) == {4}
    assert prof.part(1) ^ prof.part(1, hat=True) == {1, 2}
    assert not [v for v in profile_violations(prof) if v["check"] == "symmetric-difference"]


def test_profile_constant():
    prof = profile(Labeling.constant(5, 3, 2))
    assert prof.part(0) == {1} and prof.part(2) == {2, 3, 4, 5}


def test_profile_needs_monotone():
    phi = labeling_from(3, 2, {(1, 2): 2, (1, 3): 1, (2, 3): 1})
    with pytest.raises(PreconditionError):
        profile(phi)


def monotone_labelings(n, k):
    for values in product(range(1, k + 1), repeat=comb(n, 2)):
        phi = Labeling(n, k, values)
        if is_monotone(phi):
            yield phi


@pytest.mark.parametrize("n,k", [(4, 2), (4, 3), (5, 2)])
def test_symmetric_difference_bound_on_every_monotone_labeling(n, k):
    for phi in monotone_labelings(n, k):
        prof = profile(phi)
        for i in range(k + 2):
            assert len(prof.part(i) ^ prof.part(i, hat=True)) <= 2


def test_reverse_invert_examples():
    phi = labeling_from(3, 2, {(1, 2): 1, (1, 3): 1, (2, 3): 2})
    psi = reverse_invert(phi)
    assert (psi(1, 2), psi(1, 3), psi(2, 3)) == (1, 2, 2)
    assert cost(phi)[1] == cost(psi)[1] == 0
    even = even_construction(4, 2)
    assert cost(reverse_invert(even))[1] == 1


@settings(max_examples=40)
@given(labelings())
def test_reverse_invert_involution_and_cost(phi):
    assert reverse_invert(reverse_invert(phi)) == phi
    assert cost(reverse_invert(phi)) == cost(phi)
    assert is_monotone(reverse_invert(phi)) == is_monotone(phi)


def test_swap_examples():
    for x in (1, 2):
        phi = labeling_from(3, 2, {(1, 2): 2, (1, 3): x, (2, 3): 1})
        assert cost(phi)[1] == 1
        assert cost(improve_k1_swap(phi))[1] == 0
    assert improve_k1_swap(even_construction(4, 2)) is None


@settings(max_examples=40)
@given(labelings(max_k=4).filter(lambda phi: phi.k >= 2))
def test_descent_terminates_without_k1_triples(phi):
    out = descend_k1(phi)
    assert k1_triple(out) is None
    assert cost(out)[1] <= cost(phi)[1]


# ---------------------------------------------------------------------------
# density tables

def test_density_examples():
    row = density_rows("odd", [120], 3)[0]
    assert abs(float(row.fraction) - 0.2436) < 5e-4 and row.limit == Fraction(1, 4)
    for n in (3, 7, 10):
        row = density_rows("odd", [n], 1)[0]
        assert row.fraction == 1 and row.limit == 1
    row = density_rows("even", [4], 2)[0]
    assert row.fraction == Fraction(1, 4) and row.limit == Fraction(1, 2) and row.gap == Fraction(-1, 4)


def test_density_table_csv():
    text = emit_density_table("even", [10, 20], 4)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [int(r["n"]) for r in rows] == [10, 20]
    for r in rows:
        assert Fraction(r["bad_fraction"]) == Fraction(int(r["bad"]), comb(int(r["n"]), 3))
        assert Fraction(r["gap"]) == Fraction(r["bad_fraction"]) - Fraction(r["limit"])
        assert abs(float(r["bad_fraction_float"]) - float(Fraction(r["bad_fraction"]))) < 1e-6


@pytest.mark.parametrize("construction,k", [("odd", 2), ("even", 3), ("other", 2)])
def test_density_parity_mismatch(construction, k):
    with pytest.raises(ParameterError):
        density_rows(construction, [10], k)


def test_density_needs_triples():
    with pytest.raises(ParameterError):
        density_rows("odd", [2], 3)


def test_small_brute_force_bad_counts():
    # every triple of the odd construction is bad exactly when all three vertices share a part
    phi = odd_construction(9, 5)
    parts = [0, 0, 0, 1, 1, 1, 2, 2, 2]
    expected = sum(1 for u, v, w in combinations(range(9), 3) if parts[u] == parts[v] == parts[w])
    assert cost(phi)[1] == expected
