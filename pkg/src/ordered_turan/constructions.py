"""Explicit extremal constructions for ordered tight paths.

Biased transversals and their matching decodable packings (exact for
r <= s <= 2r-1 and even n), flower packings and the matching fractional
transversal (r | s), and the interval blow-up lower bound ((r-1) | (s-1)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .core import (
    Certificate,
    Edge,
    IntervalPartition,
    OrderedHypergraph,
    ParameterError,
    PatternSpec,
    build_pattern,
    copy_edges,
    edge_universe,
    natural_path,
    translate,
)
from .lp import EdgeWeighting


class DecodeError(ValueError):
    """An edge does not belong to any copy of the packing family."""


class StructureError(AssertionError):
    """A construction edge violated a structural property the proofs guarantee."""


def _require_even(n: int) -> None:
    if n % 2:
        raise ParameterError(f"n must be even (interval splits need |X| = |Z|), got n={n}")


def _short_path_params(n: int, r: int, s: int) -> int:
    _require_even(n)
    if not (1 <= r <= s <= 2 * r - 1):
        raise ParameterError(f"need r <= s <= 2r-1, got r={r}, s={s}")
    if s > n:
        raise ParameterError(f"need s <= n, got s={s}, n={n}")
    return s - r + 1


# ---------------------------------------------------------------------------
# biased sets

def is_biased(S: Iterable[int], n: int, m: int, side: str = "left") -> bool:
    """Whether some split (X, Y, Z) with |X| = |Z| has m vertices of S in X and
    none in Z (``side="left"``), or the mirror condition (``side="right"``)."""
    _require_even(n)
    S = set(S)
    if side not in ("left", "right"):
        raise ParameterError(f"side must be 'left' or 'right', got {side!r}")
    for x in range(n // 2 + 1):
        in_x = sum(1 for u in S if u <= x)
        in_z = sum(1 for u in S if u > n - x)
        if side == "right":
            in_x, in_z = in_z, in_x
        if in_x == m and in_z == 0:
            return True
    return False


def h_count(n: int, t: int, m: int, mode: str = "formula") -> int:
    """Number of m-left-biased t-subsets of [n]."""
    _require_even(n)
    if not (1 <= m <= t):
        raise ParameterError(f"need 1 <= m <= t, got m={m}, t={t}")
    if t > n:
        raise ParameterError(f"need t <= n, got t={t}, n={n}")
    if mode == "formula":
        return sum(comb(k - 1, m - 1) * comb(n - 2 * k, t - m) for k in range(m, n // 2 + 1))
    if mode == "enumerate":
        return sum(1 for S in combinations(range(1, n + 1), t) if is_biased(S, n, m, "left"))
    raise ParameterError(f"mode must be 'formula' or 'enumerate', got {mode!r}")


def corollary_value(n: int, r: int, s: int) -> int:
    """2 h(n,r,m) + h(n,r-1,m) with m = s-r+1; the second term is 0 when m = r."""
    m = _short_path_params(n, r, s)
    second = h_count(n, r - 1, m) if m <= r - 1 else 0
    return 2 * h_count(n, r, m) + second


# ---------------------------------------------------------------------------
# transversal

@dataclass(frozen=True)
class BiasedTransversal:
    n: int
    r: int
    s: int
    E1: frozenset
    E2: frozenset

    @property
    def m(self) -> int:
        return self.s - self.r + 1

    @property
    def edges(self) -> frozenset:
        return self.E1 | self.E2

    @property
    def overlap(self) -> int:
        return len(self.E1 & self.E2)

    @property
    def graph(self) -> OrderedHypergraph:
        return OrderedHypergraph(self.n, self.r, self.edges)

    def __len__(self):
        return len(self.edges)


def _reflecting_tail(e: Sequence[int], m: int, n: int) -> bool:
    # m-th and last vertices are reflections of each other
    return e[m - 1] + e[-1] == n + 1


def biased_transversal(n: int, r: int, s: int) -> BiasedTransversal:
    m = _short_path_params(n, r, s)
    E1, E2 = set(), set()
    for e in edge_universe(n, r):
        if is_biased(e, n, m, "left") or is_biased(e, n, m, "right"):
            E1.add(e)
        if _reflecting_tail(e, m, n):
            E2.add(e)
    return BiasedTransversal(n, r, s, frozenset(E1), frozenset(E2))


def verify_transversal(g: OrderedHypergraph, pattern: PatternSpec) -> Certificate:
    """Check that every copy of the pattern in K^(r)_n has an edge in g.

    Copies are scanned in lexicographic order of their vertex tuples, so the
    reported counterexample is the least one.
    """
    if g.r != pattern.r:
        raise ParameterError(f"uniformity mismatch: g has r={g.r}, pattern r={pattern.r}")
    n = g.n
    params = {"n": n, "pattern": pattern.to_dict(), "edges": len(g)}
    H = build_pattern(pattern)
    if pattern.s <= n:
        for image in combinations(range(1, n + 1), pattern.s):
            if not any(e in g.edges for e in copy_edges(H, image)):
                return Certificate(f"{pattern.name}-transversal", params, len(g), False, list(image))
    return Certificate(f"{pattern.name}-transversal", params, len(g), True)


# ---------------------------------------------------------------------------
# packing

def _split(x: int, n: int) -> IntervalPartition:
    return IntervalPartition((x, n - 2 * x, x))


def _counts(e: Iterable[int], x: int, n: int) -> tuple[int, int, int]:
    cx = cz = 0
    size = 0
    for u in e:
        size += 1
        if u <= x:
            cx += 1
        elif u > n - x:
            cz += 1
    return cx, size - cx - cz, cz


def canonical_partition(e: Sequence[int], n: int, s: int) -> IntervalPartition:
    """The split (X, Y, Z) with |X| = |Z| maximal such that one side holds
    m-1 vertices of e and the other none."""
    _require_even(n)
    r = len(e)
    m = s - r + 1
    for x in range(n // 2, -1, -1):
        cx, _, cz = _counts(e, x, n)
        if max(cx, cz) == m - 1 and min(cx, cz) == 0:
            return _split(x, n)
    raise StructureError(f"{tuple(e)} is not ({m - 1})-biased in [{n}]")


def min_core_partition(f: Sequence[int], n: int, s: int) -> IntervalPartition:
    """The split with |X| = |Z| and smallest middle part holding 2r-s vertices of f."""
    _require_even(n)
    r = len(f)
    for x in range(n // 2, -1, -1):
        if _counts(f, x, n)[1] == 2 * r - s:
            return _split(x, n)
    raise DecodeError(f"no split leaves {2 * r - s} vertices of {tuple(f)} in the middle")


def _copy_vertices(e: Sequence[int], n: int, s: int) -> tuple[int, ...]:
    part = canonical_partition(e, n, s)
    x = part.lengths[0]
    m = s - len(e) + 1
    cx, _, cz = _counts(e, x, n)
    if cx == m - 1:
        extra = translate([u for u in e if u <= x], n - x, n)
    else:
        extra = translate([u for u in e if u > n - x], -(n - x), n)
    V = tuple(sorted(set(e) | set(extra)))
    if len(V) != s:
        raise StructureError(f"copy generated by {tuple(e)} has {len(V)} vertices, expected {s}")
    return V


@dataclass(frozen=True)
class PackingFamily:
    n: int
    r: int
    s: int
    members: tuple   # (generator edge, copy vertex tuple) pairs
    approximate: bool = False

    def __len__(self):
        return len(self.members)

    def copies(self) -> list[tuple[int, ...]]:
        return [v for _, v in self.members]

    def copy_edge_sets(self) -> list[list[Edge]]:
        H = build_pattern(natural_path(self.r, self.s))
        return [copy_edges(H, v) for _, v in self.members]

    def to_dict(self) -> dict:
        return {
            "n": self.n, "r": self.r, "s": self.s, "approximate": self.approximate,
            "members": [{"generator": list(e), "copy": list(v)} for e, v in self.members],
        }


def generate_packing(n: int, r: int, s: int) -> PackingFamily:
    """One copy of P^(r)_s per edge of the biased transversal, pairwise edge-disjoint."""
    T = biased_transversal(n, r, s)
    members = tuple((e, _copy_vertices(e, n, s)) for e in sorted(T.edges))
    return PackingFamily(n, r, s, members)


def decode_generator(f: Sequence[int], n: int, r: int, s: int) -> Edge:
    """Recover the transversal edge whose copy contains the edge f."""
    m = _short_path_params(n, r, s)
    f = tuple(sorted(f))
    if len(f) != r:
        raise DecodeError(f"{f} is not an r-set")
    part = min_core_partition(f, n, s)
    x = part.lengths[0]
    left = [u for u in f if u <= x]
    right = [u for u in f if u > n - x]
    V = set(f)
    try:
        V.update(translate(left, n - x, n))
        V.update(translate(right, -(n - x), n))
    except ValueError as exc:
        raise DecodeError(f"{f} does not lie in any family copy") from exc
    V = tuple(sorted(V))
    if len(V) != s:
        raise DecodeError(f"{f} reconstructs to {len(V)} vertices, not {s}")
    lo, hi = x + 1, n - x
    if lo in V:
        e = V[:r]
    elif hi in V:
        e = V[-r:]
    else:
        raise DecodeError(f"reconstruction of {f} contains neither end of the middle interval")
    # re-derive the copy from e and make sure f really is one of its edges
    biased = is_biased(e, n, m, "left") or is_biased(e, n, m, "right")
    if not (biased or _reflecting_tail(e, m, n)):
        raise DecodeError(f"{f} decodes to {e}, which is not a transversal edge")
    try:
        W = _copy_vertices(e, n, s)
    except StructureError as exc:
        raise DecodeError(str(exc)) from exc
    if W != V or f not in copy_edges(build_pattern(natural_path(r, s)), W):
        raise DecodeError(f"{f} is not an edge of the copy generated by {e}")
    return e


def check_edge_disjoint(family_edges: Sequence[Sequence[Edge]]) -> tuple[bool, object]:
    """Pairwise edge-disjointness of a list of copies given as edge lists.

    Returns ``(True, None)`` or ``(False, (i, j, edge))`` for the first clash.
    """
    owner = {}
    for i, edges in enumerate(family_edges):
        for e in edges:
            if e in owner:
                return False, (owner[e], i, e)
            owner[e] = i
    return True, None


def verify_packing(family: PackingFamily) -> Certificate:
    ok, clash = check_edge_disjoint(family.copy_edge_sets())
    params = {"n": family.n, "r": family.r, "s": family.s}
    cex = None
    if not ok:
        i, j, e = clash
        cex = {"copies": [list(family.members[i][1]), list(family.members[j][1])], "edge": list(e)}
    return Certificate(f"edge-disjoint P({family.r},{family.s})-packing", params, len(family), ok, cex)


# ---------------------------------------------------------------------------
# r | s: flowers and fractional weights

def _flower_params(n: int, r: int, s: int, padded: bool) -> tuple[int, int, bool]:
    if r < 1 or s % r:
        raise ParameterError(f"need r | s, got r={r}, s={s}")
    k = s // r
    if n % k:
        if not padded:
            raise ParameterError(f"need s/r = {k} to divide n = {n} (pass padded=True to drop "
                                 f"{n % k} trailing vertices)")
        return k, n - n % k, True
    return k, n, False


def flower_packing(n: int, r: int, s: int, padded: bool = False) -> PackingFamily:
    """For each r-set e of the first of k = s/r equal parts, the path on e and its
    translates by multiples of the part size."""
    k, used, approx = _flower_params(n, r, s, padded)
    width = used // k
    members = []
    for e in combinations(range(1, width + 1), r):
        V = tuple(u + j * width for j in range(k) for u in e)
        members.append((e, tuple(sorted(V))))
    return PackingFamily(n, r, s, tuple(members), approx)


def flower_recover(f: Sequence[int], n: int, r: int, s: int) -> Edge:
    """The first-part edge whose flower copy contains f (copies are windows of r
    consecutive vertices, so their residues modulo the part size are distinct)."""
    k, used, _ = _flower_params(n, r, s, True)
    width = used // k
    e = tuple(sorted((u - 1) % width + 1 for u in f))
    if len(set(e)) != r:
        raise DecodeError(f"{tuple(f)} does not lie in a flower copy")
    return e


def fractional_transversal_weights(n: int, r: int, s: int, padded: bool = False) -> EdgeWeighting:
    """Weight r/s on every edge inside one of the k = s/r equal parts."""
    k, used, approx = _flower_params(n, r, s, padded)
    width = used // k
    w = Fraction(r, s)
    weights = {}
    for j in range(k):
        for e in combinations(range(1 + j * width, 1 + (j + 1) * width), r):
            weights[e] = w
    if approx:
        # dropped vertices would otherwise leave copies uncovered; give those edges weight 1
        for e in edge_universe(n, r):
            if e[-1] > used:
                weights[e] = Fraction(1)
    return EdgeWeighting(n, r, weights, approximate=approx)


# ---------------------------------------------------------------------------
# (r-1) | (s-1): interval blow-up

def interval_blowup(n: int, r: int, s: int) -> OrderedHypergraph:
    """K^(r)_n minus every edge inside one of (s-1)/(r-1) near-equal parts."""
    if r < 2 or (s - 1) % (r - 1):
        raise ParameterError(f"need (r-1) | (s-1) with r >= 2, got r={r}, s={s}")
    parts = (s - 1) // (r - 1)
    label = IntervalPartition.balanced(n, parts).labels()
    edges = [e for e in edge_universe(n, r) if len({label[u - 1] for u in e}) > 1]
    return OrderedHypergraph(n, r, frozenset(edges))


# ---------------------------------------------------------------------------
# typical / degenerate counting

def is_degenerate(S: Iterable[int], n: int) -> bool:
    S = set(S)
    return any(n + 1 - u in S for u in S)


def count_degenerate(n: int, r: int) -> int:
    _require_even(n)
    return sum(1 for e in combinations(range(1, n + 1), r) if is_degenerate(e, n))


def count_typical_left_biased(n: int, r: int, m: int) -> int:
    _require_even(n)
    return sum(1 for e in combinations(range(1, n + 1), r)
               if not is_degenerate(e, n) and is_biased(e, n, m, "left"))
