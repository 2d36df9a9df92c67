from itertools import combinations, product
from math import comb

import pytest

from ordered_turan.constructions import corollary_value, verify_transversal
from ordered_turan.core import OrderedHypergraph, PatternKind, PatternSpec, loose_path, natural_path
from ordered_turan.labeling import Labeling, cost, is_monotone, k1_triple
from ordered_turan.lp import copy_table
from ordered_turan.oracle import (
    SearchBudget,
    all_optimal_labelings,
    check_optimum_structure,
    exact_ex,
    exact_f,
    exact_nu,
    exact_tau,
    max_pattern_free,
)

SMALL = [(5, natural_path(3, 4)), (6, natural_path(3, 5)), (5, natural_path(2, 3)), (6, natural_path(2, 4)),
         (6, loose_path(3, 4)), (6, PatternSpec(PatternKind.CROSSING_PATH, 2, 4)),
         (5, PatternSpec(PatternKind.TIGHT_CYCLE, 2, 3)), (6, natural_path(4, 5))]


def brute_tau(n, pattern):
    table = copy_table(n, pattern)
    for size in range(len(table.edges) + 1):
        best = None
        for hit in combinations(range(len(table.edges)), size):
            hs = set(hit)
            if all(hs & set(c) for c in table.copy_ranks):
                best = [table.edges[e] for e in hit]
                break
        if best is not None:
            return size, sorted(best)


def brute_nu(n, pattern):
    table = copy_table(n, pattern)
    copies = [set(c) for c in table.copy_ranks]
    best = [0]

    def rec(i, used, size):
        best[0] = max(best[0], size)
        if size + len(copies) - i <= best[0]:
            return
        for j in range(i, len(copies)):
            if not copies[j] & used:
                rec(j + 1, used | copies[j], size + 1)

    rec(0, set(), 0)
    return best[0]


def brute_f(n, k, monotone=False):
    best = -1
    for values in product(range(1, k + 1), repeat=comb(n, 2)):
        phi = Labeling(n, k, values)
        if monotone and not is_monotone(phi):
            continue
        best = max(best, cost(phi)[0])
    return best


# ---------------------------------------------------------------------------
# tau, nu, ex

def test_tau_examples():
    assert exact_tau(6, natural_path(3, 4)).value == 7
    res = exact_tau(6, natural_path(3, 5))
    assert res.value == 2 and sorted(res.witness) == [(1, 2, 3), (4, 5, 6)]
    assert exact_tau(4, natural_path(3, 4)).value == 1


def test_nu_examples():
    assert exact_nu(6, natural_path(3, 5)).value == 2
    assert exact_nu(6, natural_path(3, 4)).value == 7
    assert exact_nu(4, natural_path(3, 4)).value == 1


def test_ex_examples():
    res = exact_ex(6, natural_path(3, 4), cross_check=True)
    assert res.value == 13 == comb(6, 3) - 7 and res.extra["direct_value"] == 13
    assert exact_ex(6, natural_path(3, 5)).value == 18
    assert exact_ex(4, natural_path(3, 6)).value == comb(4, 3)


@pytest.mark.parametrize("n,pattern", SMALL)
def test_tau_matches_brute_force(n, pattern):
    size, least = brute_tau(n, pattern)
    res = exact_tau(n, pattern)
    assert res.value == size and res.status == "optimal"
    # the reported witness is the least optimal one in the brute-force order
    assert sorted(res.witness) == least
    g = OrderedHypergraph(n, pattern.r, frozenset(res.witness))
    assert verify_transversal(g, pattern).verified


@pytest.mark.parametrize("n,pattern", SMALL)
def test_nu_matches_brute_force(n, pattern):
    res = exact_nu(n, pattern)
    assert res.value == brute_nu(n, pattern)
    assert res.value <= exact_tau(n, pattern).value


@pytest.mark.parametrize("n,pattern", SMALL)
def test_ex_complement_matches_direct_search(n, pattern):
    res = exact_ex(n, pattern)
    assert res.value == comb(n, pattern.r) - exact_tau(n, pattern).value
    assert max_pattern_free(n, pattern).value == res.value


@pytest.mark.parametrize("n,r,s", [(n, r, s) for n in (4, 6, 8) for r in (2, 3) for s in range(r, min(2 * r - 1, n) + 1)])
def test_oracle_matches_construction_size(n, r, s):
    assert exact_tau(n, natural_path(r, s)).value == corollary_value(n, r, s)
    assert exact_nu(n, natural_path(r, s)).value == corollary_value(n, r, s)


def test_witnesses_do_not_depend_on_lp_bound():
    for n, p in SMALL[:4]:
        a, b = exact_tau(n, p), exact_tau(n, p, use_lp_bound=False)
        assert a.value == b.value and sorted(a.witness) == sorted(b.witness)
        a, b = exact_nu(n, p), exact_nu(n, p, use_lp_bound=False)
        assert a.value == b.value and a.witness == b.witness


def test_budget_gives_bounds():
    res = exact_nu(10, natural_path(3, 4), SearchBudget(node_limit=5))
    assert res.status == "bounded" and res.value is None
    assert res.lower <= 50 <= res.upper
    d = res.to_dict()
    assert d["status"] == "bounded" and d["lower"] == res.lower and d["upper"] == res.upper
    res = exact_tau(8, natural_path(3, 4), SearchBudget(node_limit=2), use_lp_bound=False)
    assert res.status == "bounded" and res.lower <= 22 <= res.upper


def test_budget_from_env(monkeypatch):
    monkeypatch.setenv("ORDERED_TURAN_NODE_LIMIT", "123")
    monkeypatch.setenv("ORDERED_TURAN_TIME_LIMIT", "4.5")
    b = SearchBudget.from_env()
    assert b.node_limit == 123 and b.time_limit == 4.5
    with pytest.raises(ValueError):
        SearchBudget(0, 1)


# ---------------------------------------------------------------------------
# f(n, k)

def test_f_examples():
    assert exact_f(3, 1).value == 0
    assert exact_f(4, 2).value == 3
    for n in range(3, 7):
        assert exact_f(n, n - 1).value == comb(n, 3)


@pytest.mark.parametrize("n,k", [(3, 2), (4, 2), (4, 3), (5, 2), (5, 3)])
def test_f_matches_brute_force(n, k):
    assert exact_f(n, k).value == brute_f(n, k)
    assert exact_f(n, k, monotone_only=True).value == brute_f(n, k, monotone=True)


@pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (5, 3), (6, 2), (6, 3), (5, 4)])
def test_branch_and_exhaustive_agree(n, k):
    for monotone in (False, True):
        a = exact_f(n, k, monotone_only=monotone, method="exhaustive")
        b = exact_f(n, k, monotone_only=monotone, method="branch")
        assert a.value == b.value
        # both report the least optimal labeling
        assert a.witness.values == b.witness.values


@pytest.mark.parametrize("n,k", [(4, 2), (5, 3), (6, 2)])
def test_all_optima_agree_between_methods(n, k):
    va, a = all_optimal_labelings(n, k, method="exhaustive")
    vb, b = all_optimal_labelings(n, k, method="branch")
    assert va == vb and [p.values for p in a] == [p.values for p in b]
    assert all(cost(p)[0] == va for p in a)


def test_symmetry_pruning_keeps_the_value():
    for n, k in [(5, 3), (6, 2), (6, 3)]:
        plain = exact_f(n, k, method="branch")
        sym = exact_f(n, k, SearchBudget(symmetry=True), method="branch")
        assert plain.value == sym.value


def test_monotone_never_beats_unrestricted():
    for n in range(3, 8):
        assert exact_f(n, 3, monotone_only=True).value <= exact_f(n, 3).value


def test_f_result_json():
    d = exact_f(4, 2).to_dict()
    assert d["value"] == 3 and d["status"] == "optimal"
    assert Labeling(4, 2, tuple(x for _, _, x in d["witness"]["labels"]))


# ---------------------------------------------------------------------------
# structure checks

def test_structure_examples():
    cert = check_optimum_structure(exact_f(6, 3, monotone_only=True))
    assert cert.verified
    value, optima = all_optimal_labelings(4, 2)
    assert value == 3 and optima and all(k1_triple(p) is None for p in optima)
    assert check_optimum_structure(exact_f(5, 1)).verified
    assert check_optimum_structure(exact_f(5, 1, monotone_only=True)).verified
