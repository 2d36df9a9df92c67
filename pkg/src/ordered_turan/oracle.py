"""Exact solvers used as ground truth: transversal number, packing number,
Turan number, and the optimal labeling count f(n, k).

Each search first proves the optimum value, then a separate pass returns the
lexicographically least optimal witness, so witnesses do not depend on the
branching heuristics.  Every witness is re-verified before it is returned.
"""

from __future__ import annotations

import logging
import math
import os
import time
from dataclasses import dataclass, field
from itertools import product
from math import comb

import numpy as np

from .core import (
    Certificate,
    OrderedHypergraph,
    PatternSpec,
    build_pattern,
    find_embedding,
)
from .labeling import (
    Labeling,
    cost,
    is_monotone,
    k1_triple,
    odd_construction,
    pair_index,
    pairs,
    profile,
    profile_violations,
    reverse_invert,
)
from .lp import ResourceLimitError, copy_table, solve_fractional

log = logging.getLogger(__name__)

NODE_LIMIT_ENV = "ORDERED_TURAN_NODE_LIMIT"
TIME_LIMIT_ENV = "ORDERED_TURAN_TIME_LIMIT"

# exhaustive labeling enumeration is used up to this many labelings
EXHAUSTIVE_LIMIT = 3**15
# node cap for the lexicographic witness pass of the packing search
LEX_NODE_CAP = 200_000


@dataclass(frozen=True)
class SearchBudget:
    node_limit: int = 10**8
    time_limit: float = 60.0
    symmetry: bool = False

    def __post_init__(self):
        if self.node_limit <= 0 or self.time_limit <= 0:
            raise ValueError("budget limits must be positive")

    @classmethod
    def from_env(cls) -> "SearchBudget":
        return cls(int(os.environ.get(NODE_LIMIT_ENV, 10**8)),
                   float(os.environ.get(TIME_LIMIT_ENV, 60.0)))


class BudgetExceeded(Exception):
    pass


class _Meter:
    def __init__(self, budget: SearchBudget | None):
        self.budget = budget or SearchBudget.from_env()
        self.nodes = 0
        self.start = time.monotonic()

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget.node_limit:
            raise BudgetExceeded(f"node limit {self.budget.node_limit} reached")
        if self.nodes % 4096 == 0 and time.monotonic() - self.start > self.budget.time_limit:
            raise BudgetExceeded(f"time limit {self.budget.time_limit}s reached")


@dataclass
class ExactResult:
    kind: str                 # tau | nu | ex | f | monotone-f
    params: dict
    value: int | None
    witness: object = None
    optimal: bool = True
    lower: int | None = None
    upper: int | None = None
    nodes: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.optimal:
            self.lower = self.upper = self.value

    @property
    def status(self) -> str:
        return "optimal" if self.optimal else "bounded"

    def witness_json(self):
        w = self.witness
        if w is None:
            return None
        if isinstance(w, Labeling):
            return w.to_dict()
        if isinstance(w, OrderedHypergraph):
            return w.to_dict()
        return [list(x) for x in w]

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "parameters": self.params, "status": self.status,
             "value": self.value, "lower": self.lower, "upper": self.upper,
             "nodes": self.nodes, "witness": self.witness_json()}
        d.update(self.extra)
        return d


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _pattern_params(n, pattern):
    return {"n": n, "pattern": pattern.to_dict()}


# ---------------------------------------------------------------------------
# tau: minimum hitting set of the copies

def _disjoint_copy_bound(copies: list[int], allowed: int) -> int:
    """Greedy family of uncovered copies with pairwise disjoint allowed edges."""
    used = 0
    count = 0
    for m in sorted(copies, key=lambda c: (_popcount(c & allowed), c)):
        a = m & allowed
        if not a & used:
            used |= a
            count += 1
    return count


def _greedy_hitting_set(copy_masks: list[int], m: int) -> int:
    uncovered = list(copy_masks)
    chosen = 0
    while uncovered:
        best, best_hits = -1, -1
        for e in range(m):
            bit = 1 << e
            hits = sum(1 for c in uncovered if c & bit)
            if hits > best_hits:
                best, best_hits = e, hits
        chosen |= 1 << best
        uncovered = [c for c in uncovered if not c >> best & 1]
    # drop redundant edges, highest rank first
    for e in sorted(_bits(chosen), reverse=True):
        trial = chosen & ~(1 << e)
        if all(c & trial for c in copy_masks):
            chosen = trial
    return chosen


def _min_hitting_set_value(copy_masks, m, root_lb, meter):
    full = (1 << m) - 1
    best = [_greedy_hitting_set(copy_masks, m)]
    best_size = [_popcount(best[0])]

    def search(chosen, excluded, uncovered, size):
        meter.tick()
        if best_size[0] <= root_lb:
            return
        if not uncovered:
            if size < best_size[0]:
                best_size[0], best[0] = size, chosen
            return
        allowed = full & ~excluded
        if size + _disjoint_copy_bound(uncovered, allowed) >= best_size[0]:
            return
        target = min(uncovered, key=lambda c: (_popcount(c & allowed), c))
        options = list(_bits(target & allowed))
        options.sort(key=lambda e: (-sum(1 for c in uncovered if c >> e & 1), e))
        for e in options:
            rest = [c for c in uncovered if not c >> e & 1]
            search(chosen | 1 << e, excluded, rest, size + 1)
            excluded |= 1 << e

    search(0, 0, list(copy_masks), 0)
    return best_size[0], best[0]


def _lex_least_hitting_set(copy_masks, m, size, meter):
    """Least hitting set of the given size, comparing sorted rank tuples."""
    top = [max(_bits(c)) for c in copy_masks]

    def search(i, chosen, uncovered, left):
        meter.tick()
        if not uncovered:
            return chosen
        if left == 0 or i >= m:
            return None
        if any(top[j] < i for j in uncovered):
            return None
        allowed = ((1 << m) - 1) & ~((1 << i) - 1)
        if _disjoint_copy_bound([copy_masks[j] for j in uncovered], allowed) > left:
            return None
        bit = 1 << i
        hit = [j for j in uncovered if copy_masks[j] & bit]
        if hit:
            got = search(i + 1, chosen | bit, [j for j in uncovered if not copy_masks[j] & bit], left - 1)
            if got is not None:
                return got
        return search(i + 1, chosen, uncovered, left)

    return search(0, 0, list(range(len(copy_masks))), size)


def exact_tau(n: int, pattern: PatternSpec, budget: SearchBudget | None = None,
              use_lp_bound: bool = True) -> ExactResult:
    table = copy_table(n, pattern)
    params = _pattern_params(n, pattern)
    meter = _Meter(budget)
    masks = table.masks
    m = len(table.edges)
    if not masks:
        return ExactResult("tau", params, 0, [])
    root_lb = 1
    if use_lp_bound and len(masks) * m <= 200_000:
        root_lb = math.ceil(solve_fractional(n, pattern).value)
    try:
        value, _ = _min_hitting_set_value(masks, m, root_lb, meter)
        witness_mask = _lex_least_hitting_set(masks, m, value, meter)
    except BudgetExceeded as exc:
        log.warning("tau search stopped: %s", exc)
        return ExactResult("tau", params, None, optimal=False, lower=root_lb,
                           upper=_popcount(_greedy_hitting_set(masks, m)), nodes=meter.nodes)
    witness = [table.edges[e] for e in _bits(witness_mask)]
    g = OrderedHypergraph(n, pattern.r, frozenset(witness))
    from .constructions import verify_transversal

    if len(witness) != value or not verify_transversal(g, pattern).verified:
        raise AssertionError("tau witness failed verification")
    return ExactResult("tau", params, value, witness, nodes=meter.nodes)


# ---------------------------------------------------------------------------
# nu: maximum family of edge-disjoint copies

def _color_bound(cands: int, conflict: list[int]) -> tuple[list[int], list[int]]:
    """Greedy partition of the candidate copies into classes of pairwise
    conflicting copies; a packing takes at most one copy per class.

    Returns the candidates in class order with the running class count.
    """
    order, bounds = [], []
    uncolored = cands
    color = 0
    while uncolored:
        color += 1
        q = uncolored
        while q:
            v = (q & -q).bit_length() - 1
            q &= ~(1 << v)
            # keep only copies conflicting with everything in this class
            q &= conflict[v]
            uncolored &= ~(1 << v)
            order.append(v)
            bounds.append(color)
    return order, bounds


def _max_packing_value(conflict, N, ub, meter, cands=None, edge_masks=None):
    """Largest packing inside ``cands`` (all copies by default); stops early at ``ub``.

    With ``edge_masks`` the colouring bound is tightened by edge capacity: the
    copies left can use at most |union of their edges| / (edges per copy) slots.
    """
    compat = [((1 << N) - 1) & ~conflict[v] & ~(1 << v) for v in range(N)]
    per_copy = _popcount(edge_masks[0]) if edge_masks else 0
    best = [0, 0]

    def capacity(cands):
        union = 0
        for v in _bits(cands):
            union |= edge_masks[v]
        return _popcount(union) // per_copy

    def expand(cands, size, chosen):
        meter.tick()
        if best[0] >= ub:
            return
        if per_copy and size + capacity(cands) <= best[0]:
            return
        order, bounds = _color_bound(cands, conflict)
        for idx in range(len(order) - 1, -1, -1):
            if size + bounds[idx] <= best[0]:
                return
            v = order[idx]
            new_chosen = chosen | 1 << v
            nxt = cands & compat[v]
            if nxt:
                expand(nxt, size + 1, new_chosen)
            elif size + 1 > best[0]:
                best[0], best[1] = size + 1, new_chosen
            cands &= ~(1 << v)
            if best[0] >= ub:
                return

    if cands is None:
        cands = (1 << N) - 1
    if cands:
        expand(cands, 0, 0)
    return best[0], best[1]


def _lex_least_packing(conflict, N, size, meter, edge_masks=None):
    """Take copies in increasing order whenever the rest can still be completed."""
    compat = [((1 << N) - 1) & ~conflict[v] & ~(1 << v) for v in range(N)]
    cands, chosen, need = (1 << N) - 1, 0, size
    for v in range(N):
        if need == 0:
            break
        if not cands >> v & 1:
            continue
        rest = cands & compat[v]
        if need == 1 or _max_packing_value(conflict, N, need - 1, meter, rest, edge_masks)[0] >= need - 1:
            chosen |= 1 << v
            cands, need = rest, need - 1
        else:
            cands &= ~(1 << v)
    if need:
        raise AssertionError("packing of the proven size could not be rebuilt")
    return chosen


def _conflicts(masks: list[int]) -> list[int]:
    N = len(masks)
    conflict = [0] * N
    for i in range(N):
        for j in range(i + 1, N):
            if masks[i] & masks[j]:
                conflict[i] |= 1 << j
                conflict[j] |= 1 << i
    return conflict


def exact_nu(n: int, pattern: PatternSpec, budget: SearchBudget | None = None,
             use_lp_bound: bool = True) -> ExactResult:
    table = copy_table(n, pattern)
    params = _pattern_params(n, pattern)
    meter = _Meter(budget)
    masks = table.masks
    N = len(masks)
    if not N:
        return ExactResult("nu", params, 0, [])
    # the value search runs over copies relabelled by decreasing conflict
    # degree, where the colouring expands the least constrained copies first;
    # the witness pass keeps the original order
    degree = [sum(1 for j in range(N) if j != i and masks[i] & masks[j]) for i in range(N)]
    relabel = sorted(range(N), key=lambda i: (-degree[i], i))
    relabelled = [masks[i] for i in relabel]
    conflict_by_degree = _conflicts(relabelled)
    conflict = _conflicts(masks)
    ub = N
    if use_lp_bound and N * len(table.edges) <= 200_000:
        ub = math.floor(solve_fractional(n, pattern).value)
    try:
        value, found = _max_packing_value(conflict_by_degree, N, ub, meter, None, relabelled)
    except BudgetExceeded as exc:
        log.warning("nu search stopped: %s", exc)
        return ExactResult("nu", params, None, optimal=False, lower=0, upper=ub, nodes=meter.nodes)
    witness_rule = "lex-least"
    lex_meter = _Meter(SearchBudget(LEX_NODE_CAP, meter.budget.time_limit))
    try:
        chosen = _lex_least_packing(conflict, N, value, lex_meter, masks)
    except BudgetExceeded as exc:
        # the value is already proven; keep the (deterministic) witness of the value search
        log.info("lex-least packing pass stopped (%s); using the search witness", exc)
        chosen = sum(1 << relabel[i] for i in _bits(found))
        witness_rule = "search-order"
    witness = [table.copies[j] for j in _bits(chosen)]
    used = 0
    for j in _bits(chosen):
        if used & masks[j]:
            raise AssertionError("nu witness is not edge-disjoint")
        used |= masks[j]
    if len(witness) != value:
        raise AssertionError("nu witness has the wrong size")
    return ExactResult("nu", params, value, witness, nodes=meter.nodes + lex_meter.nodes,
                       extra={"witness_rule": witness_rule})


# ---------------------------------------------------------------------------
# ex: maximum pattern-free subgraph

def max_pattern_free(n: int, pattern: PatternSpec, budget: SearchBudget | None = None) -> ExactResult:
    """Direct search over edge subsets avoiding every copy; independent of tau."""
    table = copy_table(n, pattern)
    params = _pattern_params(n, pattern)
    meter = _Meter(budget)
    m = len(table.edges)
    copies_of = [[] for _ in range(m)]
    for j, ranks in enumerate(table.copy_ranks):
        for e in ranks:
            copies_of[e].append(j)
    size = [len(ranks) for ranks in table.copy_ranks]
    masks = table.masks
    inside = [0] * len(size)     # included edges per copy
    broken = [0] * len(size)     # excluded edges per copy
    best = [-1, 0]

    def bound(i, count):
        # each live copy whose remaining edges are disjoint from the others'
        # must still lose one of them
        later = ((1 << m) - 1) & ~((1 << i) - 1)
        live = [masks[j] & later for j in range(len(size)) if not broken[j]]
        return count + (m - i) - _disjoint_copy_bound([x for x in live if x], later)

    def search(i, count, chosen):
        meter.tick()
        if i == m:
            if count > best[0]:
                best[0], best[1] = count, chosen
            return
        if bound(i, count) <= best[0]:
            return
        if all(inside[j] + 1 < size[j] or broken[j] for j in copies_of[i]):
            for j in copies_of[i]:
                inside[j] += 1
            search(i + 1, count + 1, chosen | 1 << i)
            for j in copies_of[i]:
                inside[j] -= 1
        for j in copies_of[i]:
            broken[j] += 1
        search(i + 1, count, chosen)
        for j in copies_of[i]:
            broken[j] -= 1

    try:
        search(0, 0, 0)
    except BudgetExceeded:
        return ExactResult("ex", params, None, optimal=False, lower=max(best[0], 0),
                           upper=m, nodes=meter.nodes)
    g = OrderedHypergraph(n, pattern.r, frozenset(table.edges[e] for e in _bits(best[1])))
    if find_embedding(g, build_pattern(pattern)) is not None:
        raise AssertionError("ex witness contains the pattern")
    return ExactResult("ex", params, best[0], g, nodes=meter.nodes, extra={"method": "direct"})


def exact_ex(n: int, pattern: PatternSpec, budget: SearchBudget | None = None,
             cross_check: bool | None = None) -> ExactResult:
    """C(n,r) - tau, optionally confirmed by a direct pattern-free search."""
    total = comb(n, pattern.r)
    params = _pattern_params(n, pattern)
    tau = exact_tau(n, pattern, budget)
    if not tau.optimal:
        return ExactResult("ex", params, None, optimal=False, lower=total - tau.upper,
                           upper=total - tau.lower, nodes=tau.nodes)
    hit = frozenset(tau.witness)
    g = OrderedHypergraph(n, pattern.r, frozenset(e for e in copy_table(n, pattern).edges if e not in hit))
    if find_embedding(g, build_pattern(pattern)) is not None:
        raise AssertionError("complement of the tau witness contains the pattern")
    value = total - tau.value
    extra = {"method": "complement"}
    if cross_check is None:
        cross_check = total <= 35
    if cross_check:
        direct = max_pattern_free(n, pattern, budget)
        if direct.optimal and direct.value != value:
            raise AssertionError(f"ex mismatch: complement {value}, direct {direct.value}")
        extra["direct_value"] = direct.value
    return ExactResult("ex", params, value, g, nodes=tau.nodes, extra=extra)


# ---------------------------------------------------------------------------
# f(n, k): best labeling

def _triple_pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    first, second = [], []
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            for w in range(v + 1, n + 1):
                first.append(pair_index(u, v, n))
                second.append(pair_index(v, w, n))
    return np.array(first, dtype=np.intp), np.array(second, dtype=np.intp)


def _exhaustive_labelings(n: int, k: int, monotone_only: bool, collect: bool):
    """Score every labeling with numpy; returns (best, lex-least optimum, all optima)."""
    P = comb(n, 2)
    first, second = _triple_pair_indices(n)
    inner = min(P, 10)
    outer = P - inner
    grid = np.array(list(product(range(1, k + 1), repeat=inner)), dtype=np.int8).reshape(-1, inner)
    best, best_lab, optima = -1, None, []
    for prefix in product(range(1, k + 1), repeat=outer):
        L = np.empty((grid.shape[0], P), dtype=np.int8)
        L[:, :outer] = prefix
        L[:, outer:] = grid
        a, b = L[:, first], L[:, second]
        good = (a < b).sum(axis=1) if len(first) else np.zeros(len(L), dtype=np.int64)
        if monotone_only and len(first):
            good = np.where((a <= b).all(axis=1), good, -1)
        top = int(good.max())
        if top > best:
            best = top
            best_lab = tuple(int(x) for x in L[int(np.argmax(good))])
            optima = []
        if collect and top == best:
            optima.extend(tuple(int(x) for x in row) for row in L[good == best])
    return best, best_lab, optima


def _branch_labelings(n: int, k: int, monotone_only: bool, collect: bool, meter: _Meter,
                      symmetry: bool = False):
    """Depth-first over pairs (1,2), (1,3), ..., labels ascending.

    Choosing phi(uv) settles every triple x u v; the bound counts, for each
    unsettled pair (u, v), the in-pairs of u that are unlabelled or below k.
    """
    pair_list = pairs(n)
    P = len(pair_list)
    inhist = [[0] * (k + 2) for _ in range(n + 1)]
    inmax = [0] * (n + 1)
    top_in = [0] * (n + 1)           # in-pairs of v labelled k
    labels = [0] * P
    best = [-1]
    best_lab = [None]
    optima = []
    # remaining[u] = number of unlabelled out-pairs of u
    remaining = [n - u for u in range(n + 1)]
    # potential contributed by the pairs not yet labelled
    pot = [sum((n - u) * (u - 1) for u in range(1, n + 1))]

    def recurse(p, good):
        meter.tick()
        if p == P:
            if good > best[0]:
                best[0] = good
                best_lab[0] = tuple(labels)
                optima.clear()
            if collect and good == best[0]:
                optima.append(tuple(labels))
            return
        bound = good + pot[0]
        if bound < best[0] or (bound == best[0] and not collect):
            return
        u, v = pair_list[p]
        lo = inmax[u] if monotone_only and u > 1 else 1
        # contribution of this pair to the potential: in-pairs of u below k
        here = (u - 1) - top_in[u]
        below = sum(inhist[u][:lo])
        for x in range(lo, k + 1):
            if symmetry and p == P - 1 and labels[0] + x > k + 1:
                break
            gain = below
            below += inhist[u][x]
            labels[p] = x
            inhist[v][x] += 1
            old_max = inmax[v]
            if x > old_max:
                inmax[v] = x
            delta = here
            if x == k:
                top_in[v] += 1
                delta += n - v   # the out-pairs of v lose this in-pair
            pot[0] -= delta
            recurse(p + 1, good + gain)
            pot[0] += delta
            if x == k:
                top_in[v] -= 1
            inmax[v] = old_max
            inhist[v][x] -= 1
        labels[p] = 0

    recurse(0, 0)
    return best[0], best_lab[0], optima


def _labeling_search(n, k, monotone_only, collect, budget, method):
    meter = _Meter(budget)
    if method == "auto":
        method = "exhaustive" if k ** comb(n, 2) <= EXHAUSTIVE_LIMIT else "branch"
    symmetry = bool(budget and budget.symmetry and not collect and not monotone_only)
    if method == "exhaustive":
        best, lab, optima = _exhaustive_labelings(n, k, monotone_only, collect)
    else:
        best, lab, optima = _branch_labelings(n, k, monotone_only, collect, meter, symmetry)
    return best, lab, optima, meter.nodes, method


def exact_f(n: int, k: int, budget: SearchBudget | None = None, monotone_only: bool = False,
            method: str = "auto") -> ExactResult:
    """f(n, k), or its monotone restriction, with the lexicographically least optimal labeling."""
    kind = "monotone-f" if monotone_only else "f"
    params = {"n": n, "k": k}
    if n < 2:
        return ExactResult(kind, params, 0, Labeling(n, k, ()))
    try:
        best, lab, _, nodes, used = _labeling_search(n, k, monotone_only, False, budget, method)
    except BudgetExceeded as exc:
        log.warning("f search stopped: %s", exc)
        return ExactResult(kind, params, None, optimal=False, lower=None, upper=comb(n, 3))
    phi = Labeling(n, k, lab, {"construction": "search-optimum", "monotone_only": monotone_only})
    if cost(phi)[0] != best or (monotone_only and not is_monotone(phi)):
        raise AssertionError("labeling witness failed verification")
    return ExactResult(kind, params, best, phi, nodes=nodes, extra={"method": used})


def all_optimal_labelings(n: int, k: int, monotone_only: bool = False,
                          budget: SearchBudget | None = None, method: str = "auto"):
    """(value, every optimal labeling in lexicographic order)."""
    best, _, optima, _, _ = _labeling_search(n, k, monotone_only, True, budget, method)
    return best, [Labeling(n, k, t) for t in sorted(optima)]


# ---------------------------------------------------------------------------
# structure of optima

def check_optimum_structure(result: ExactResult) -> Certificate:
    """Necessary conditions on optimal labelings.

    Unrestricted optima have no triple labelled (k, 1).  Monotone optima
    satisfy the part-size inequalities of their Phi profiles, also after
    reversal and inversion.
    """
    phi = result.witness
    n, k = phi.n, phi.k
    params = {"n": n, "k": k, "kind": result.kind}
    findings = []
    if result.kind == "f":
        if k >= 2:
            t = k1_triple(phi)
            if t is not None:
                findings.append({"check": "k1-triple", "triple": list(t)})
    elif result.kind == "monotone-f":
        prof = profile(phi)
        findings.extend(profile_violations(prof))
        mirrored = reverse_invert(phi)
        if cost(mirrored) != cost(phi):
            findings.append({"check": "reversal-cost"})
        mprof = profile(mirrored)
        if list(mprof.sizes()) != list(reversed(prof.sizes(hat=True))):
            findings.append({"check": "reversal-parts"})
        findings.extend(dict(v, mirrored=True) for v in profile_violations(mprof))
    else:
        raise ValueError(f"expected an f result, got {result.kind}")
    reference = None
    if k % 2 == 1 and n >= 1:
        reference = cost(odd_construction(n, k))[1]
    cert = Certificate("optimum structure", params, result.value, not findings, findings=findings)
    cert.parameters["odd_construction_bad"] = reference
    cert.parameters["optimum_bad"] = comb(n, 3) - result.value
    return cert
