"""Edge labelings of the ordered complete graph and their good/bad triples.

A triple u < v < w is good under a labeling phi when phi(uv) < phi(vw).  For
3-uniform ordered hypergraphs, forbidding the tight path on s vertices is the
same problem as maximising good triples with s-2 labels; this module holds
both directions of that translation, the odd/even-k constructions, and the
Phi_L/Phi_R profile machinery used to analyse monotone optima.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, Iterable

import numpy as np

from .core import (
    IntervalPartition,
    OrderedHypergraph,
    ParameterError,
    build_pattern,
    find_embedding,
    natural_path,
)

INTERMEDIATE_RULE = "lower part index + 1"


class PreconditionError(ValueError):
    """Input violates an operation's precondition; ``witness`` shows where."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def pairs(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(1, n + 1), 2))


def pair_index(u: int, v: int, n: int) -> int:
    # pairs are listed (1,2), (1,3), ..., (1,n), (2,3), ...
    return (u - 1) * n - (u - 1) * u // 2 + (v - u - 1)


@dataclass(frozen=True)
class Labeling:
    n: int
    k: int
    values: tuple
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        vals = tuple(int(x) for x in self.values)
        if len(vals) != comb(self.n, 2):
            raise ParameterError(f"need {comb(self.n, 2)} labels for n={self.n}, got {len(vals)}")
        if any(not 1 <= x <= self.k for x in vals):
            raise ParameterError(f"labels must lie in 1..{self.k}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, n: int, k: int, fn: Callable[[int, int], int], **metadata) -> "Labeling":
        return cls(n, k, tuple(fn(u, v) for u, v in pairs(n)), dict(metadata))

    @classmethod
    def constant(cls, n: int, k: int, c: int = 1) -> "Labeling":
        return cls(n, k, (c,) * comb(n, 2), {"construction": "constant"})

    def __call__(self, u: int, v: int) -> int:
        return self.values[pair_index(u, v, self.n)]

    def matrix(self) -> np.ndarray:
        """(n+1) x (n+1) array with M[u, v] = phi(uv) for u < v, zero elsewhere."""
        M = np.zeros((self.n + 1, self.n + 1), dtype=np.int64)
        iu = np.array([p[0] for p in pairs(self.n)], dtype=np.int64)
        iv = np.array([p[1] for p in pairs(self.n)], dtype=np.int64)
        if len(iu):
            M[iu, iv] = self.values
        return M

    def items(self) -> Iterable[tuple[int, int, int]]:
        for (u, v), x in zip(pairs(self.n), self.values):
            yield u, v, x

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["u", "v", "label"])
        for row in self.items():
            w.writerow(row)
        return buf.getvalue()

    def sidecar(self) -> dict:
        return {"n": self.n, "k": self.k, **self.metadata}

    @classmethod
    def from_csv(cls, text: str, n: int, k: int, metadata: dict | None = None) -> "Labeling":
        rows = list(csv.DictReader(io.StringIO(text)))
        lab = {(int(r["u"]), int(r["v"])): int(r["label"]) for r in rows}
        if set(lab) != set(pairs(n)):
            raise ParameterError("CSV does not label every pair exactly once")
        return cls(n, k, tuple(lab[p] for p in pairs(n)), dict(metadata or {}))

    @classmethod
    def from_files(cls, csv_text: str, sidecar_text: str) -> "Labeling":
        meta = json.loads(sidecar_text)
        n, k = meta.pop("n"), meta.pop("k")
        return cls.from_csv(csv_text, n, k, meta)

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "labels": [list(t) for t in self.items()],
                "metadata": self.metadata}


# ---------------------------------------------------------------------------
# cost

def _middle_counts(phi: Labeling) -> tuple[np.ndarray, np.ndarray]:
    """Per middle vertex v: (#good, #total) triples u < v < w."""
    n, k = phi.n, phi.k
    M = phi.matrix()
    good = np.zeros(n + 1, dtype=np.int64)
    total = np.zeros(n + 1, dtype=np.int64)
    for v in range(2, n):
        into = np.bincount(M[1:v, v], minlength=k + 1)
        out = np.bincount(M[v, v + 1:], minlength=k + 1)
        # good: in-label a < out-label b
        below = np.concatenate(([0], np.cumsum(into)[:-1]))
        good[v] = int(np.dot(out, below))
        total[v] = (v - 1) * (n - v)
    return good, total


def cost(phi: Labeling) -> tuple[int, int]:
    """(good, bad) triple counts, aggregated per middle vertex."""
    good, total = _middle_counts(phi)
    g = int(good.sum())
    return g, comb(phi.n, 3) - g


def cost_bruteforce(phi: Labeling) -> tuple[int, int]:
    good = bad = 0
    for u, v, w in combinations(range(1, phi.n + 1), 3):
        if phi(u, v) < phi(v, w):
            good += 1
        else:
            bad += 1
    return good, bad


def bad_by_middle(phi: Labeling) -> list[int]:
    """Bad triples with middle vertex v, as a list indexed by v (entry 0 unused)."""
    good, total = _middle_counts(phi)
    return [int(t - g) for g, t in zip(good, total)]


def is_monotone(phi: Labeling) -> bool:
    return monotone_violation(phi) is None


def monotone_violation(phi: Labeling):
    """A triple (u, v, w) with phi(uv) > phi(vw), or None."""
    n = phi.n
    M = phi.matrix()
    for v in range(2, n):
        into = M[1:v, v]
        out = M[v, v + 1:]
        if into.max() > out.min():
            return (int(np.argmax(into)) + 1, v, int(np.argmin(out)) + v + 1)
    return None


# ---------------------------------------------------------------------------
# labelings <-> P^(3)_s-free hypergraphs

def labeling_to_hypergraph(phi: Labeling) -> OrderedHypergraph:
    edges = [(u, v, w) for u, v, w in combinations(range(1, phi.n + 1), 3) if phi(u, v) < phi(v, w)]
    return OrderedHypergraph(phi.n, 3, frozenset(edges))


def longest_path_labels(g: OrderedHypergraph) -> dict[tuple[int, int], int]:
    """phi(uv) = number of edges of a longest tight path of g ending in u, v."""
    if g.r != 3:
        raise ParameterError("need a 3-uniform hypergraph")
    n = g.n
    ending = [[] for _ in range(n + 1)]  # edges grouped by last vertex
    for e in g.edges:
        ending[e[2]].append(e)
    phi = {p: 0 for p in pairs(n)}
    # pairs in increasing (v, u); an edge x u v extends a path ending in x u
    for v in range(1, n + 1):
        for x, u, _ in ending[v]:
            phi[(u, v)] = max(phi[(u, v)], phi[(x, u)] + 1)
    return phi


def hypergraph_to_labeling(g: OrderedHypergraph, s: int) -> Labeling:
    """The (s-2)-labeling by longest path length, shifted to labels 1..s-2."""
    if s < 3:
        raise ParameterError(f"need s >= 3, got {s}")
    emb = find_embedding(g, build_pattern(natural_path(3, s)))
    if emb is not None:
        raise PreconditionError(f"hypergraph contains P(3,{s})", witness=emb)
    native = longest_path_labels(g)
    assert max(native.values(), default=0) <= s - 3
    return Labeling(g.n, s - 2, tuple(native[p] + 1 for p in pairs(g.n)),
                    {"construction": "longest-path", "label_shift": 1, "s": s})


# ---------------------------------------------------------------------------
# constructions

def odd_construction(n: int, k: int) -> Labeling:
    """phi(uv) = i + j over t = (k+1)/2 near-equal parts (stored shifted to 1..k)."""
    if k < 1 or k % 2 == 0:
        raise ParameterError(f"odd construction needs odd k >= 1, got {k}")
    t = (k + 1) // 2
    part = IntervalPartition.balanced(n, t)
    idx = part.labels()
    return Labeling.from_function(
        n, k, lambda u, v: idx[u - 1] + idx[v - 1] + 1,
        construction="odd", parts=list(part.lengths), label_offset=-1)


def even_partition(n: int, k: int) -> IntervalPartition:
    """Common refinement of the t- and (t+1)-part near-equal partitions, t = k/2.

    Boundaries interleave as 0, n/(t+1), n/t, 2n/(t+1), ..., t n/(t+1), n
    (floored); coinciding boundaries give empty parts, so there are always k.
    """
    if k < 2 or k % 2:
        raise ParameterError(f"even construction needs even k >= 2, got {k}")
    t = k // 2
    bounds = [0]
    for j in range(1, t + 1):
        bounds.append(j * n // (t + 1))
        bounds.append(j * n // t)
    return IntervalPartition(tuple(b - a for a, b in zip(bounds, bounds[1:])))


def fractional_index(u: int, part: range) -> Fraction:
    return Fraction(u + 1 - part.start, len(part))


def even_construction(n: int, k: int) -> Labeling:
    partition = even_partition(n, k)
    parts = partition.parts()
    idx = partition.labels()

    def label(u, v):
        i, j = idx[u - 1] + 1, idx[v - 1] + 1
        if i == j:
            return i
        if j - i >= 2:
            return i + 1
        lam = fractional_index(u, parts[i - 1]) + fractional_index(v, parts[j - 1])
        return i if lam <= 1 else i + 1

    return Labeling.from_function(n, k, label, construction="even", parts=list(partition.lengths),
                                  intermediate_label=INTERMEDIATE_RULE, tie_rule="sum <= 1 -> lower")


def even_limit_part_fractions(k: int) -> list[Fraction]:
    """Limiting |X_i|/n of the even construction, i = 1..k."""
    t = k // 2
    out = []
    for i in range(1, k + 1):
        if i % 2 == 0:
            out.append(Fraction(i // 2, t * (t + 1)))
        else:
            out.append(Fraction(t - (i - 1) // 2, t * (t + 1)))
    return out


def badcount_prediction(a, b, c, n: int) -> Fraction:
    """(a+b) b (b+c) C(n,3): the leading-order bad count with middle vertex in a
    part of relative size b between neighbours of relative sizes a and c."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if min(a, b, c) < 0:
        raise ParameterError("part fractions must be nonnegative")
    return (a + b) * b * (b + c) * comb(n, 3)


def bad_fraction_limit(k: int) -> Fraction:
    """Limiting bad fraction of the odd (4/(k+1)^2) or even (4/(k(k+2))) construction."""
    if k % 2:
        return Fraction(4, (k + 1) ** 2)
    return Fraction(4, k * (k + 2))


def conjectured_good_fraction(k: int) -> Fraction:
    """1 - 1/floor((k+1)^2/4), the conjectured limit of f(n,k)/C(n,3)."""
    return 1 - Fraction(1, (k + 1) ** 2 // 4)


# ---------------------------------------------------------------------------
# profiles

@dataclass(frozen=True)
class LabelProfile:
    n: int
    k: int
    phi_left: tuple     # indexed by vertex - 1
    phi_right: tuple
    left_parts: IntervalPartition    # X_0 .. X_{k+1}
    right_parts: IntervalPartition   # hat X_0 .. hat X_{k+1}

    def part(self, i: int, hat: bool = False) -> set[int]:
        values = self.phi_right if hat else self.phi_left
        return {v for v, x in enumerate(values, start=1) if x == i}

    def sizes(self, hat: bool = False) -> tuple[int, ...]:
        return (self.right_parts if hat else self.left_parts).lengths

    def pair_sums(self, hat: bool = False) -> tuple[list[int], list[int]]:
        """a_l = |X_2l| + |X_2l+1| and b_l = |X_2l+1| + |X_2l+2| for 0 <= 2l+1 <= k+1."""
        x = list(self.sizes(hat)) + [0]
        a = [x[2 * l] + x[2 * l + 1] for l in range((self.k + 2) // 2)]
        b = [x[2 * l + 1] + x[2 * l + 2] for l in range((self.k + 1) // 2)]
        return a, b


def _sizes_by_value(values, k: int) -> IntervalPartition:
    counts = [0] * (k + 2)
    for x in values:
        counts[x] += 1
    return IntervalPartition(tuple(counts))


def profile(phi: Labeling) -> LabelProfile:
    viol = monotone_violation(phi)
    if viol is not None:
        raise PreconditionError(f"labeling is not monotone at triple {viol}", witness=viol)
    n, k = phi.n, phi.k
    M = phi.matrix()
    left = [0] + [int(M[1:v, v].max()) for v in range(2, n + 1)]
    right = [int(M[v, v + 1:].min()) for v in range(1, n)] + [k + 1]
    if n == 1:
        left, right = [0], [k + 1]
    # monotone values give interval parts
    assert all(a <= b for a, b in zip(left, left[1:])), "Phi_L not monotone"
    assert all(a <= b for a, b in zip(right, right[1:])), "Phi_R not monotone"
    return LabelProfile(n, k, tuple(left), tuple(right), _sizes_by_value(left, k),
                        _sizes_by_value(right, k))


def profile_violations(prof: LabelProfile) -> list[dict]:
    """Inequalities the Phi profiles of an optimal monotone labeling must satisfy.

    * every part and its hatted twin differ in at most 2 vertices;
    * |X_i| + |X_i+1| <= |X_i-2| + |X_i-1| + 2 for 2 <= i <= k;
    * |hX_j-1| + |hX_j| <= |hX_j+1| + |hX_j+2| + 2 for 1 <= j <= k-1.
    The first holds for every monotone labeling; the other two need optimality.
    """
    k = prof.k
    out = []
    for i in range(k + 2):
        diff = prof.part(i) ^ prof.part(i, hat=True)
        if len(diff) > 2:
            out.append({"check": "symmetric-difference", "i": i, "size": len(diff)})
    x = list(prof.sizes())
    for i in range(2, k + 1):
        if x[i] + x[i + 1] > x[i - 2] + x[i - 1] + 2:
            out.append({"check": "left-parts", "i": i, "lhs": x[i] + x[i + 1],
                        "rhs": x[i - 2] + x[i - 1] + 2})
    y = list(prof.sizes(hat=True))
    for j in range(1, k):
        if y[j - 1] + y[j] > y[j + 1] + y[j + 2] + 2:
            out.append({"check": "right-parts", "j": j, "lhs": y[j - 1] + y[j],
                        "rhs": y[j + 1] + y[j + 2] + 2})
    return out


def chain_violations(phi: Labeling, prof: LabelProfile | None = None):
    """First pair (u, v) breaking Phi_L(u) <= Phi_R(u) <= phi(uv) <= Phi_L(v) <= Phi_R(v)."""
    prof = prof or profile(phi)
    L, R = prof.phi_left, prof.phi_right
    for u, v, x in phi.items():
        if not (L[u - 1] <= R[u - 1] <= x <= L[v - 1] <= R[v - 1]):
            return (u, v)
    return None


# ---------------------------------------------------------------------------
# symmetry and the (k,1) swap

def reverse_invert(phi: Labeling) -> Labeling:
    """phi'(uv) = (k+1) - phi(v* u*) with x* = n+1-x."""
    n, k = phi.n, phi.k
    meta = dict(phi.metadata)
    meta["reversed"] = not meta.get("reversed", False)
    return Labeling.from_function(n, k, lambda u, v: k + 1 - phi(n + 1 - v, n + 1 - u), **meta)


def k1_triple(phi: Labeling):
    """First (u, v, w) with phi(uv) = k and phi(vw) = 1, scanning v upward, with
    u the least such vertex and w the largest; None if there is none."""
    n, k = phi.n, phi.k
    for v in range(2, n):
        us = [u for u in range(1, v) if phi(u, v) == k]
        ws = [w for w in range(v + 1, n + 1) if phi(v, w) == 1]
        if us and ws:
            return us[0], v, ws[-1]
    return None


def improve_k1_swap(phi: Labeling) -> Labeling | None:
    """Swap labels on a (k,1) triple; the result has strictly fewer bad triples."""
    if phi.k < 2:
        raise ParameterError("the swap needs k >= 2")
    t = k1_triple(phi)
    if t is None:
        return None
    u, v, w = t
    vals = list(phi.values)
    vals[pair_index(u, v, phi.n)] = 1
    vals[pair_index(v, w, phi.n)] = phi.k
    out = Labeling(phi.n, phi.k, tuple(vals), dict(phi.metadata))
    if cost(out)[1] >= cost(phi)[1]:
        raise AssertionError(f"swap at {t} did not reduce the cost")
    return out


def descend_k1(phi: Labeling) -> Labeling:
    """Apply the swap until no (k,1) triple remains."""
    while True:
        nxt = improve_k1_swap(phi)
        if nxt is None:
            return phi
        phi = nxt


# ---------------------------------------------------------------------------
# density tables

@dataclass(frozen=True)
class DensityRow:
    n: int
    bad: int
    fraction: Fraction
    limit: Fraction

    @property
    def gap(self) -> Fraction:
        return self.fraction - self.limit

    def as_csv_row(self) -> list:
        return [self.n, self.bad, str(self.fraction), f"{float(self.fraction):.6f}",
                str(self.limit), f"{float(self.limit):.6f}", str(self.gap), f"{float(self.gap):.6f}"]


DENSITY_HEADER = ["n", "bad", "bad_fraction", "bad_fraction_float", "limit", "limit_float",
                  "gap", "gap_float"]


def density_rows(construction: str, ns: Iterable[int], k: int) -> list[DensityRow]:
    if construction == "odd":
        if k % 2 == 0:
            raise ParameterError(f"odd construction needs odd k, got {k}")
        build = odd_construction
    elif construction == "even":
        if k % 2:
            raise ParameterError(f"even construction needs even k, got {k}")
        build = even_construction
    else:
        raise ParameterError(f"construction must be 'odd' or 'even', got {construction!r}")
    rows = []
    for n in ns:
        if n < 3:
            raise ParameterError(f"density needs n >= 3 (no triples otherwise), got n={n}")
        bad = cost(build(n, k))[1]
        rows.append(DensityRow(n, bad, Fraction(bad, comb(n, 3)), bad_fraction_limit(k)))
    return rows


def emit_density_table(construction: str, ns: Iterable[int], k: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DENSITY_HEADER)
    for row in density_rows(construction, ns, k):
        w.writerow(row.as_csv_row())
    return buf.getvalue()
