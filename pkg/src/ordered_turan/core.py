"""Ordered hypergraphs, the path/cycle pattern generators, and order-preserving
containment.

Vertices are the integers ``1..n``.  Edges are strictly increasing tuples.  The
edge universe of the complete ordered r-graph is ranked colexicographically so
that edge sets can be held as integer bitmasks.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Sequence

Edge = tuple[int, ...]


class ParameterError(ValueError):
    """Raised when an operation is called with parameters outside its domain."""


class VertexRangeError(ValueError):
    """Raised when a vertex map leaves the vertex set ``1..n``."""


# ---------------------------------------------------------------------------
# colex ranking of r-subsets of {1, 2, ...}

def rank_edge(edge: Sequence[int]) -> int:
    """Colex rank of a strictly increasing tuple of positive vertices.

    The rank does not depend on n, so K^(r)_n's edges occupy ranks
    ``0..C(n,r)-1`` for every n.
    """
    return sum(comb(v - 1, i + 1) for i, v in enumerate(edge))


def unrank_edge(rank: int, r: int) -> Edge:
    out = []
    for i in range(r, 0, -1):
        v = i
        while comb(v, i) <= rank:
            v += 1
        # v is the least value with C(v, i) > rank, so the vertex is v (1-based)
        rank -= comb(v - 1, i)
        out.append(v)
    return tuple(reversed(out))


@lru_cache(maxsize=None)
def edge_universe(n: int, r: int) -> tuple[Edge, ...]:
    """All r-subsets of [n], listed in colex rank order."""
    edges = sorted(combinations(range(1, n + 1), r), key=lambda e: e[::-1])
    return tuple(edges)


def edges_to_mask(edges: Iterable[Sequence[int]]) -> int:
    mask = 0
    for e in edges:
        mask |= 1 << rank_edge(e)
    return mask


def mask_to_edges(mask: int, r: int) -> list[Edge]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(unrank_edge(i, r))
        mask >>= 1
        i += 1
    return out


# ---------------------------------------------------------------------------
# hypergraphs

@dataclass(frozen=True)
class OrderedHypergraph:
    n: int
    r: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0 or self.r < 1:
            raise ParameterError(f"need n >= 0 and r >= 1, got n={self.n}, r={self.r}")
        clean = set()
        for e in self.edges:
            e = tuple(int(v) for v in e)
            if len(e) != self.r:
                raise ParameterError(f"edge {e} does not have {self.r} vertices")
            if any(b <= a for a, b in zip(e, e[1:])):
                raise ParameterError(f"edge {e} is not strictly increasing")
            if e and (e[0] < 1 or e[-1] > self.n):
                raise ParameterError(f"edge {e} leaves the vertex set 1..{self.n}")
            clean.add(e)
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, r: int, edges: Iterable[Iterable[int]]) -> "OrderedHypergraph":
        return cls(n, r, frozenset(tuple(sorted(e)) for e in edges))

    @classmethod
    def complete(cls, n: int, r: int) -> "OrderedHypergraph":
        return cls(n, r, frozenset(edge_universe(n, r)))

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def __len__(self):
        return len(self.edges)

    def __contains__(self, edge):
        return tuple(edge) in self.edges

    @property
    def mask(self) -> int:
        return edges_to_mask(self.edges)

    def complement(self) -> "OrderedHypergraph":
        return OrderedHypergraph(self.n, self.r, frozenset(edge_universe(self.n, self.r)) - self.edges)

    def to_dict(self) -> dict:
        return {"n": self.n, "r": self.r, "edges": [list(e) for e in self.sorted_edges()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "OrderedHypergraph":
        return cls.from_edges(int(d["n"]), int(d["r"]), d["edges"])

    @classmethod
    def from_json(cls, text: str) -> "OrderedHypergraph":
        return cls.from_dict(json.loads(text))


class PatternKind(str, enum.Enum):
    NATURAL_PATH = "natural"
    LOOSE_PATH = "loose"
    CROSSING_PATH = "crossing"
    TIGHT_CYCLE = "cycle"
    COMPLETE = "complete"


@dataclass(frozen=True)
class PatternSpec:
    kind: PatternKind
    r: int
    s: int

    def __post_init__(self):
        object.__setattr__(self, "kind", PatternKind(self.kind))
        if not (self.s >= self.r >= 1):
            raise ParameterError(f"pattern needs s >= r >= 1, got r={self.r}, s={self.s}")
        if self.kind is PatternKind.LOOSE_PATH and not (self.r < self.s <= 2 * self.r - 1):
            raise ParameterError(
                f"loose path needs r < s <= 2r-1, got r={self.r}, s={self.s}")

    @property
    def name(self) -> str:
        letter = {"natural": "P", "loose": "LP", "crossing": "Q", "cycle": "C", "complete": "K"}
        return f"{letter[self.kind.value]}({self.r},{self.s})"

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "r": self.r, "s": self.s}


def natural_path(r: int, s: int) -> PatternSpec:
    return PatternSpec(PatternKind.NATURAL_PATH, r, s)


def loose_path(r: int, s: int) -> PatternSpec:
    return PatternSpec(PatternKind.LOOSE_PATH, r, s)


def _crossing_edges(r: int, s: int) -> list[Edge]:
    # path vertex p sits at column p // r, row p % r of the grid; the host order
    # lists row 1 left to right, then row 2, ...
    t = -(-s // r)
    full_rows = s - (t - 1) * r
    row_len = [t if i < full_rows else t - 1 for i in range(r)]
    row_start = [1 + sum(row_len[:i]) for i in range(r)]
    position = [row_start[p % r] + p // r for p in range(s)]
    return [tuple(sorted(position[j:j + r])) for j in range(s - r + 1)]


def build_pattern(spec: PatternSpec) -> OrderedHypergraph:
    r, s = spec.r, spec.s
    kind = spec.kind
    if kind is PatternKind.NATURAL_PATH:
        edges = [tuple(range(j, j + r)) for j in range(1, s - r + 2)]
    elif kind is PatternKind.LOOSE_PATH:
        edges = [tuple(range(1, r + 1)), tuple(range(s - r + 1, s + 1))]
    elif kind is PatternKind.CROSSING_PATH:
        edges = _crossing_edges(r, s)
    elif kind is PatternKind.TIGHT_CYCLE:
        edges = [tuple(sorted((j + i) % s + 1 for i in range(r))) for j in range(s)]
    elif kind is PatternKind.COMPLETE:
        edges = list(combinations(range(1, s + 1), r))
    else:  # pragma: no cover
        raise ParameterError(f"unknown pattern kind {kind!r}")
    return OrderedHypergraph(s, r, frozenset(edges))


def parse_pattern(text: str) -> PatternSpec:
    """Parse ``kind:r:s`` (for example ``natural:3:5``) into a PatternSpec."""
    try:
        kind, r, s = text.split(":")
        kind, r, s = PatternKind(kind), int(r), int(s)
    except ValueError as exc:
        raise ParameterError(f"bad pattern {text!r}; expected kind:r:s with kind in "
                             f"{[k.value for k in PatternKind]}") from exc
    return PatternSpec(kind, r, s)


# ---------------------------------------------------------------------------
# containment

def iter_embeddings(host: OrderedHypergraph, pattern: OrderedHypergraph) -> Iterator[tuple[int, ...]]:
    """Yield every strictly increasing map ``pattern vertex i -> image[i-1]`` that
    sends each pattern edge onto a host edge, in lexicographic order."""
    if host.r != pattern.r:
        raise ParameterError(f"uniformity mismatch: host r={host.r}, pattern r={pattern.r}")
    s, n = pattern.n, host.n
    if s > n:
        return
    # edges are checked as soon as their largest vertex is placed
    closing = [[] for _ in range(s + 1)]
    for e in pattern.edges:
        closing[e[-1]].append(e)
    host_edges = host.edges
    image = [0] * (s + 1)

    def extend(i: int, lo: int):
        if i > s:
            yield tuple(image[1:])
            return
        for x in range(lo, n - (s - i) + 1):
            image[i] = x
            if all(tuple(image[v] for v in e) in host_edges for e in closing[i]):
                yield from extend(i + 1, x + 1)

    yield from extend(1, 1)


def find_embedding(host: OrderedHypergraph, pattern: OrderedHypergraph) -> tuple[int, ...] | None:
    for emb in iter_embeddings(host, pattern):
        return emb
    return None


def is_embedding(host: OrderedHypergraph, pattern: OrderedHypergraph, image: Sequence[int]) -> bool:
    if len(image) != pattern.n or any(b <= a for a, b in zip(image, image[1:])):
        return False
    return all(tuple(image[v - 1] for v in e) in host.edges for e in pattern.edges)


def copy_edges(pattern: OrderedHypergraph, image: Sequence[int]) -> list[Edge]:
    """Edges of the copy of ``pattern`` placed on the increasing tuple ``image``."""
    return sorted(tuple(image[v - 1] for v in e) for e in pattern.edges)


def iter_copies(n: int, spec: PatternSpec) -> Iterator[tuple[tuple[int, ...], list[Edge]]]:
    """Copies of the pattern in K^(r)_n as ``(vertex tuple, edges)``.

    Every increasing s-tuple of [n] hosts exactly one copy, so the vertex
    tuples are simply the s-subsets in lexicographic order.
    """
    pattern = build_pattern(spec)
    for image in combinations(range(1, n + 1), spec.s):
        yield image, copy_edges(pattern, image)


def count_embeddings(host: OrderedHypergraph, pattern: OrderedHypergraph) -> int:
    return sum(1 for _ in iter_embeddings(host, pattern))


# ---------------------------------------------------------------------------
# intervals

@dataclass(frozen=True)
class IntervalPartition:
    lengths: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(int(x) for x in self.lengths))
        if any(x < 0 for x in self.lengths):
            raise ParameterError(f"negative part size in {self.lengths}")

    @property
    def n(self) -> int:
        return sum(self.lengths)

    def parts(self) -> list[range]:
        out, start = [], 1
        for length in self.lengths:
            out.append(range(start, start + length))
            start += length
        return out

    def part_of(self, u: int) -> int:
        """0-based index of the part containing vertex u."""
        start = 1
        for i, length in enumerate(self.lengths):
            if start <= u < start + length:
                return i
            start += length
        raise VertexRangeError(f"vertex {u} outside 1..{self.n}")

    def labels(self) -> list[int]:
        """0-based part index of each vertex 1..n, as a list indexed by u-1."""
        out = []
        for i, length in enumerate(self.lengths):
            out.extend([i] * length)
        return out

    @classmethod
    def balanced(cls, n: int, parts: int) -> "IntervalPartition":
        # part l gets floor(l n / p) - floor((l-1) n / p) vertices
        return cls(tuple((l * n) // parts - ((l - 1) * n) // parts for l in range(1, parts + 1)))


def interval_chromatic_number(g: OrderedHypergraph) -> int:
    if g.r != 2:
        raise ParameterError("interval chromatic number is defined here for 2-uniform graphs only")
    if g.n == 0:
        return 0
    nbrs = [set() for _ in range(g.n + 1)]
    for u, v in g.edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    count, start = 1, 1
    for v in range(2, g.n + 1):
        if any(start <= u < v for u in nbrs[v]):
            count += 1
            start = v
    return count


def min_independent_interval_partition(g: OrderedHypergraph) -> int:
    """Exhaustive minimum over all interval partitions; the greedy's reference."""
    if g.r != 2:
        raise ParameterError("defined for 2-uniform graphs only")
    n = g.n
    if n == 0:
        return 0
    for parts in range(1, n + 1):
        for cuts in combinations(range(1, n), parts - 1):
            bounds = (0,) + cuts + (n,)
            label = {}
            for i in range(parts):
                for v in range(bounds[i] + 1, bounds[i + 1] + 1):
                    label[v] = i
            if all(label[u] != label[v] for u, v in g.edges):
                return parts
    raise AssertionError("singleton partition is always independent")


def is_r_interval_partite(g: OrderedHypergraph) -> tuple[bool, IntervalPartition | None]:
    """Test for an r-part interval partition giving every edge one vertex per part.

    Scans the C(n-1, r-1) placements of nonempty parts in lexicographic order of
    the cut positions; the first success is returned as the witness.
    """
    n, r = g.n, g.r
    if n < r:
        # no edge fits; pad with empty parts
        return True, IntervalPartition((1,) * n + (0,) * (r - n))
    for cuts in combinations(range(1, n), r - 1):
        bounds = (0,) + cuts + (n,)
        ok = True
        for e in g.edges:
            if any(not (bounds[i] < e[i] <= bounds[i + 1]) for i in range(r)):
                ok = False
                break
        if ok:
            return True, IntervalPartition(tuple(bounds[i + 1] - bounds[i] for i in range(r)))
    return False, None


def reflect(u: int, n: int) -> int:
    if not 1 <= u <= n:
        raise VertexRangeError(f"vertex {u} outside 1..{n}")
    return n + 1 - u


def translate(vertices: Iterable[int], c: int, n: int) -> tuple[int, ...]:
    out = tuple(sorted(u + c for u in vertices))
    if out and (out[0] < 1 or out[-1] > n):
        raise VertexRangeError(f"translation by {c} leaves 1..{n}")
    return out


# ---------------------------------------------------------------------------
# verification reports

def rational_str(x) -> str:
    """Render an int or Fraction as ``p`` or ``p/q``."""
    return str(x)


@dataclass
class Certificate:
    claim: str
    parameters: dict
    value: object
    verified: bool
    counterexample: object = None
    findings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        value = self.value
        if value is not None and not isinstance(value, (int, bool, str)):
            value = rational_str(value)
        d = {
            "claim": self.claim,
            "parameters": self.parameters,
            "value": value,
            "verified": self.verified,
            "counterexample": self.counterexample,
        }
        if self.findings:
            d["findings"] = self.findings
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __bool__(self):
        return self.verified
