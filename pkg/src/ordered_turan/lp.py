"""Fractional transversal and packing numbers by exact rational linear programming.

The packing LP ``max 1.y  s.t.  A y <= 1, y >= 0`` (rows are edges of
K^(r)_n, columns are copies of the pattern) is solved by a primal simplex on an
integer tableau with a shared denominator, so every intermediate value is exact.
The transversal weights are read off the slack columns of the final objective
row.  Neither side is trusted: both are re-checked constraint by constraint and
their objectives compared as Fractions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .core import (
    Certificate,
    Edge,
    ParameterError,
    PatternSpec,
    build_pattern,
    copy_edges,
    edge_universe,
    rank_edge,
)

log = logging.getLogger(__name__)

DEFAULT_COPY_CAP = 10**6


class ResourceLimitError(RuntimeError):
    """An instance is larger than the configured limit."""


# ---------------------------------------------------------------------------
# weightings

def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass
class EdgeWeighting:
    """Nonnegative rational weight per edge of K^(r)_n; absent edges weigh 0."""

    n: int
    r: int
    weights: dict = field(default_factory=dict)
    approximate: bool = False

    def __post_init__(self):
        clean = {}
        for e, w in self.weights.items():
            e = tuple(e)
            w = _frac(w)
            if w < 0:
                raise ParameterError(f"negative weight {w} on edge {e}")
            if len(e) != self.r or e[0] < 1 or e[-1] > self.n:
                raise ParameterError(f"edge {e} is not an edge of K^({self.r})_{self.n}")
            if w:
                clean[e] = w
        self.weights = clean

    def __getitem__(self, e) -> Fraction:
        return self.weights.get(tuple(e), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def scaled(self, c) -> "EdgeWeighting":
        return EdgeWeighting(self.n, self.r, {e: w * c for e, w in self.weights.items()})

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "weights": [[list(e), str(w)] for e, w in sorted(self.weights.items())],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EdgeWeighting":
        return cls(d["n"], d["r"], {tuple(e): Fraction(w) for e, w in d["weights"]})


@dataclass
class CopyWeighting:
    """Nonnegative rational weight per copy, keyed by the copy's vertex tuple."""

    n: int
    pattern: PatternSpec
    weights: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for c, w in self.weights.items():
            w = _frac(w)
            if w < 0:
                raise ParameterError(f"negative weight {w} on copy {c}")
            if w:
                clean[tuple(c)] = w
        self.weights = clean

    def __getitem__(self, c) -> Fraction:
        return self.weights.get(tuple(c), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "pattern": self.pattern.to_dict(),
            "weights": [[list(c), str(w)] for c, w in sorted(self.weights.items())],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CopyWeighting":
        p = d["pattern"]
        spec = PatternSpec(p["kind"], p["r"], p["s"])
        return cls(d["n"], spec, {tuple(c): Fraction(w) for c, w in d["weights"]})


@dataclass
class LPOutcome:
    n: int
    pattern: PatternSpec
    value: Fraction
    primal: EdgeWeighting
    dual: CopyWeighting
    status: str = "optimal"
    pivots: int = 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "pattern": self.pattern.to_dict(),
            "status": self.status,
            "value": str(self.value),
            "pivots": self.pivots,
            "primal": self.primal.to_dict(),
            "dual": self.dual.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LPOutcome":
        p = d["pattern"]
        spec = PatternSpec(p["kind"], p["r"], p["s"])
        return cls(d["n"], spec, Fraction(d["value"]), EdgeWeighting.from_dict(d["primal"]),
                   CopyWeighting.from_dict(d["dual"]), d["status"], d.get("pivots", 0))


# ---------------------------------------------------------------------------
# copy tables

@dataclass(frozen=True)
class CopyTable:
    n: int
    pattern: PatternSpec
    copies: tuple          # vertex tuples, lexicographic
    copy_ranks: tuple      # per copy, the sorted tuple of its edge ranks
    edges: tuple           # edge universe in rank order

    @property
    def masks(self) -> list[int]:
        return [sum(1 << e for e in ranks) for ranks in self.copy_ranks]


@lru_cache(maxsize=64)
def _copy_table(n: int, spec: PatternSpec, cap: int) -> CopyTable:
    r, s = spec.r, spec.s
    n_copies = comb(n, s) if s <= n else 0
    if n_copies > cap:
        raise ResourceLimitError(
            f"{spec.name} in K_{n}: {n_copies} copies exceeds the cap of {cap}")
    pattern = build_pattern(spec)
    from itertools import combinations

    copies, ranks = [], []
    for image in combinations(range(1, n + 1), s):
        copies.append(image)
        ranks.append(tuple(sorted(rank_edge(e) for e in copy_edges(pattern, image))))
    return CopyTable(n, spec, tuple(copies), tuple(ranks), edge_universe(n, r))


def copy_table(n: int, spec: PatternSpec, cap: int = DEFAULT_COPY_CAP) -> CopyTable:
    return _copy_table(n, spec, cap)


# ---------------------------------------------------------------------------
# simplex

def _simplex_max_packing(m: int, columns: list[tuple[int, ...]]):
    """Maximise sum(y) subject to sum_{j: i in col_j} y_j <= 1 and y >= 0.

    Returns ``(value, y, w, pivots)`` with ``y`` per column and ``w`` per row
    (the optimal dual, i.e. the covering weights).  Entering variables follow
    the largest-coefficient rule until a degenerate pivot happens; from then
    until the next strict improvement Bland's rule is used, which rules out
    cycling.
    """
    N = len(columns)
    width = N + m + 1
    T = np.zeros((m + 1, width), dtype=object)
    T[:] = 0
    for j, col in enumerate(columns):
        for i in col:
            T[i + 1, j] = 1
    for i in range(m):
        T[i + 1, N + i] = 1
        T[i + 1, -1] = 1
    T[0, :N] = -1
    basis = [N + i for i in range(m)]
    d = 1
    pivots = 0
    bland = False

    while True:
        obj = T[0, :-1]
        neg = [j for j in range(width - 1) if obj[j] < 0]
        if not neg:
            break
        if bland:
            c = neg[0]
        else:
            c = min(neg, key=lambda j: (obj[j], j))
        col = T[1:, c]
        rhs = T[1:, -1]
        best = None
        for i in range(m):
            a = col[i]
            if a > 0:
                if best is None:
                    best = i
                    continue
                # compare rhs[i]/a with rhs[best]/col[best]; ties go to the smaller basic index
                lhs = rhs[i] * col[best]
                rhs_best = rhs[best] * a
                if lhs < rhs_best or (lhs == rhs_best and basis[i] < basis[best]):
                    best = i
        if best is None:  # pragma: no cover - the packing LP is bounded
            raise RuntimeError("unbounded packing LP")
        r = best + 1
        degenerate = T[r, -1] == 0
        p = T[r, c]
        pivot_row = T[r].copy()
        factors = T[:, c].copy()
        T *= p
        T -= np.outer(factors, pivot_row)
        T //= d
        T[r] = pivot_row
        d = p
        basis[best] = c
        pivots += 1
        bland = degenerate

    value = Fraction(T[0, -1], d)
    y = [Fraction(0)] * N
    for i, b in enumerate(basis):
        if b < N:
            y[b] = Fraction(T[i + 1, -1], d)
    w = [Fraction(T[0, N + i], d) for i in range(m)]
    return value, y, w, pivots


def solve_fractional(n: int, pattern: PatternSpec, cap: int = DEFAULT_COPY_CAP) -> LPOutcome:
    """Exact tau*(n, H) = nu*(n, H) with a primal and a dual certificate."""
    table = copy_table(n, pattern, cap)
    r = pattern.r
    if not table.copies:
        log.info("%s does not fit in K_%d: no copies, value 0", pattern.name, n)
        return LPOutcome(n, pattern, Fraction(0), EdgeWeighting(n, r), CopyWeighting(n, pattern))
    m = len(table.edges)
    if m * (len(table.copies) + m) > cap * 10:
        raise ResourceLimitError(f"tableau {m} x {len(table.copies) + m} exceeds the size limit")
    value, y, w, pivots = _simplex_max_packing(m, list(table.copy_ranks))
    primal = EdgeWeighting(n, r, {table.edges[i]: w[i] for i in range(m)})
    dual = CopyWeighting(n, pattern, {table.copies[j]: y[j] for j in range(len(y))})
    out = LPOutcome(n, pattern, value, primal, dual, "optimal", pivots)
    _certify(out, table)
    return out


def _certify(out: LPOutcome, table: CopyTable) -> None:
    """Re-check both solutions independently of the tableau."""
    p = verify_feasible(out.primal, out.n, out.pattern, cap=len(table.copies) + 1)
    d = verify_feasible(out.dual, out.n, out.pattern, cap=len(table.copies) + 1)
    if not (p.verified and d.verified):
        raise ArithmeticError(f"simplex output failed verification: {p.counterexample or d.counterexample}")
    if not (out.primal.total() == out.dual.total() == out.value):
        raise ArithmeticError(
            f"objectives differ: primal {out.primal.total()}, dual {out.dual.total()}, value {out.value}")


def verify_feasible(weighting, n: int, pattern: PatternSpec, cap: int = DEFAULT_COPY_CAP) -> Certificate:
    """Check every copy constraint (edge weighting) or every edge load (copy weighting)."""
    table = copy_table(n, pattern, max(cap, DEFAULT_COPY_CAP))
    params = {"n": n, "pattern": pattern.to_dict()}
    if isinstance(weighting, EdgeWeighting):
        if (weighting.n, weighting.r) != (n, pattern.r):
            raise ParameterError("weighting domain does not match (n, r)")
        for image, ranks in zip(table.copies, table.copy_ranks):
            load = sum((weighting[table.edges[e]] for e in ranks), Fraction(0))
            if load < 1:
                return Certificate("fractional transversal", params, weighting.total(), False,
                                   {"copy": list(image), "weight": str(load)})
        return Certificate("fractional transversal", params, weighting.total(), True)
    if isinstance(weighting, CopyWeighting):
        if weighting.n != n or weighting.pattern.r != pattern.r:
            raise ParameterError("weighting domain does not match (n, r)")
        load = [Fraction(0)] * len(table.edges)
        index = {c: j for j, c in enumerate(table.copies)}
        for c, w in weighting.weights.items():
            if c not in index:
                return Certificate("fractional packing", params, weighting.total(), False,
                                   {"copy": list(c), "reason": "not a copy of the pattern"})
            for e in table.copy_ranks[index[c]]:
                load[e] += w
        for e, x in enumerate(load):
            if x > 1:
                return Certificate("fractional packing", params, weighting.total(), False,
                                   {"edge": list(table.edges[e]), "load": str(x)})
        return Certificate("fractional packing", params, weighting.total(), True)
    raise TypeError(f"cannot verify {type(weighting).__name__}")


def to_lp_format(n: int, pattern: PatternSpec, cap: int = DEFAULT_COPY_CAP) -> str:
    """The transversal LP in CPLEX LP text format, for cross-checking externally."""
    table = copy_table(n, pattern, cap)
    names = ["w_" + "_".join(map(str, e)) for e in table.edges]
    lines = [f"\\ fractional transversal of {pattern.name} in K_{n}", "Minimize"]
    lines.append(" obj: " + (" + ".join(names) if names else "0"))
    lines.append("Subject To")
    for image, ranks in zip(table.copies, table.copy_ranks):
        label = "c_" + "_".join(map(str, image))
        lines.append(f" {label}: " + " + ".join(names[e] for e in ranks) + " >= 1")
    lines.append("End")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# the chain nu <= nu* = tau* <= tau

@dataclass
class ChainReport:
    n: int
    pattern: PatternSpec
    nu: int
    lp_value: Fraction
    tau: int
    nu_source: str
    tau_source: str

    @property
    def holds(self) -> bool:
        return self.nu <= self.lp_value <= self.tau

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "pattern": self.pattern.to_dict(),
            "nu": self.nu,
            "nu_star": str(self.lp_value),
            "tau_star": str(self.lp_value),
            "tau": self.tau,
            "nu_source": self.nu_source,
            "tau_source": self.tau_source,
            "holds": self.holds,
        }

    def __str__(self):
        return (f"{self.pattern.name}, n={self.n}: {self.nu} <= {self.lp_value} = "
                f"{self.lp_value} <= {self.tau}")


def duality_chain(n: int, pattern: PatternSpec, nu: int | None = None, tau: int | None = None,
                  budget=None, outcome: LPOutcome | None = None) -> ChainReport:
    """Compute nu, nu*, tau*, tau and compare them.

    ``nu``/``tau`` may be supplied when they are already certified elsewhere
    (for instances past the oracle's reach); otherwise the exact oracle runs.
    """
    from . import oracle

    if outcome is None:
        outcome = solve_fractional(n, pattern)
    nu_source = tau_source = "given"
    if nu is None:
        res = oracle.exact_nu(n, pattern, budget)
        if not res.optimal:
            raise ResourceLimitError(f"nu search did not finish: {res.lower}..{res.upper}")
        nu, nu_source = res.value, "oracle"
    if tau is None:
        res = oracle.exact_tau(n, pattern, budget)
        if not res.optimal:
            raise ResourceLimitError(f"tau search did not finish: {res.lower}..{res.upper}")
        tau, tau_source = res.value, "oracle"
    report = ChainReport(n, pattern, nu, outcome.value, tau, nu_source, tau_source)
    if not report.holds:
        log.error("duality chain violated: %s", report)
    return report
