"""Command-line entry point: ``ordered-turan <command> ...``.

Results go to stdout, or into ``--out DIR`` when given.  Failures print a JSON
object ``{"error": {"type": ..., "message": ...}}`` on stderr.  Exit codes:
0 success, 1 a verification or acceptance check failed, 2 bad input,
3 a search hit its budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path

from . import acceptance
from .constructions import (
    biased_transversal,
    corollary_value,
    flower_packing,
    fractional_transversal_weights,
    generate_packing,
    interval_blowup,
    verify_packing,
    verify_transversal,
)
from .core import OrderedHypergraph, ParameterError, PatternKind, PatternSpec, parse_pattern
from .labeling import (
    Labeling,
    PreconditionError,
    bad_fraction_limit,
    cost,
    emit_density_table,
    even_construction,
    labeling_to_hypergraph,
    odd_construction,
)
from .lp import (
    CopyWeighting,
    EdgeWeighting,
    ResourceLimitError,
    solve_fractional,
    to_lp_format,
    verify_feasible,
)
from .oracle import (
    SearchBudget,
    all_optimal_labelings,
    exact_ex,
    exact_f,
    exact_nu,
    exact_tau,
)

log = logging.getLogger("ordered_turan")

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
INPUT_ERRORS = (ParameterError, PreconditionError, ValueError, KeyError, FileNotFoundError)


class CheckFailed(Exception):
    pass


class BudgetStopped(Exception):
    pass


# ---------------------------------------------------------------------------
# output helpers

def _emit(args, name: str, text: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)
        log.info("wrote %s", out / name)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(args, name: str, obj) -> None:
    _emit(args, name, json.dumps(obj, indent=2, default=str))


def _rows_to_csv(header: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def _budget(args) -> SearchBudget:
    base = SearchBudget.from_env()
    return SearchBudget(args.node_limit or base.node_limit, args.time_limit or base.time_limit,
                        getattr(args, "symmetry", False))


def _pattern_from_args(args) -> PatternSpec:
    if getattr(args, "pattern", None):
        return parse_pattern(args.pattern)
    if args.r is None or args.s is None:
        raise ParameterError("give --pattern kind:r:s or both --r and --s")
    return PatternSpec(PatternKind(args.kind), args.r, args.s)


def _need(args, *names):
    missing = [f"--{x}" for x in names if getattr(args, x, None) is None]
    if missing:
        raise ParameterError(f"missing {', '.join(missing)}")


# ---------------------------------------------------------------------------
# construct / verify

def cmd_construct(args) -> int:
    _need(args, "n", "r", "s")
    n, r, s = args.n, args.r, args.s
    name = f"{args.object}_n{n}_r{r}_s{s}.json"
    if args.object == "transversal":
        T = biased_transversal(n, r, s)
        certs = [verify_transversal(T.graph, p).to_dict() for p in _short_patterns(r, s)]
        payload = {"hypergraph": T.graph.to_dict(), "size": len(T), "E1": len(T.E1), "E2": len(T.E2),
                   "overlap": T.overlap, "expected": corollary_value(n, r, s), "certificates": certs}
        ok = all(c["verified"] for c in certs)
    elif args.object in ("packing", "flower"):
        fam = flower_packing(n, r, s, padded=args.padded) if args.object == "flower" \
            else generate_packing(n, r, s)
        cert = verify_packing(fam)
        payload = {"packing": fam.to_dict(), "size": len(fam), "certificate": cert.to_dict()}
        ok = cert.verified
    elif args.object == "weights":
        w = fractional_transversal_weights(n, r, s, padded=args.padded)
        cert = verify_feasible(w, n, PatternSpec(PatternKind(args.kind), r, s))
        payload = {"weights": w.to_dict(), "total": str(w.total()), "certificate": cert.to_dict()}
        ok = cert.verified
    elif args.object == "blowup":
        g = interval_blowup(n, r, s)
        payload = {"hypergraph": g.to_dict(), "size": len(g)}
        ok = True
    else:  # pragma: no cover - argparse restricts choices
        raise ParameterError(f"unknown object {args.object}")
    _emit_json(args, name, payload)
    if not ok:
        raise CheckFailed(f"{args.object} failed its certificate")
    return EXIT_OK


def _short_patterns(r, s):
    return acceptance._patterns(r, s)


def cmd_verify(args) -> int:
    pattern = _pattern_from_args(args)
    if args.object == "transversal":
        if args.input:
            g = OrderedHypergraph.from_json(Path(args.input).read_text())
        else:
            _need(args, "n")
            g = biased_transversal(args.n, pattern.r, pattern.s).graph
        cert = verify_transversal(g, pattern)
    elif args.object == "weights":
        _need(args, "input")
        data = json.loads(Path(args.input).read_text())
        if isinstance(data.get("weights"), dict):
            data = data["weights"]
        w = CopyWeighting.from_dict(data) if "pattern" in data else EdgeWeighting.from_dict(data)
        cert = verify_feasible(w, w.n, pattern)
    elif args.object == "packing":
        _need(args, "n")
        cert = verify_packing(generate_packing(args.n, pattern.r, pattern.s))
    else:  # pragma: no cover
        raise ParameterError(f"unknown object {args.object}")
    _emit_json(args, f"verify_{args.object}.json", cert.to_dict())
    if not cert.verified:
        raise CheckFailed(f"{cert.claim}: counterexample {cert.counterexample}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# exact / lp

def cmd_exact(args) -> int:
    budget = _budget(args)
    if args.quantity in ("f", "monotone-f"):
        _need(args, "n", "k")
        monotone = args.quantity == "monotone-f"
        if args.all_optima:
            value, optima = all_optimal_labelings(args.n, args.k, monotone, budget, args.method)
            payload = {"kind": args.quantity, "parameters": {"n": args.n, "k": args.k},
                       "status": "optimal", "value": value, "count": len(optima),
                       "optima": [phi.to_dict() for phi in optima]}
            _emit_json(args, f"{args.quantity}_n{args.n}_k{args.k}_all.json", payload)
            return EXIT_OK
        res = exact_f(args.n, args.k, budget, monotone_only=monotone, method=args.method)
        name = f"{args.quantity}_n{args.n}_k{args.k}.json"
    else:
        _need(args, "n")
        pattern = _pattern_from_args(args)
        solver = {"tau": exact_tau, "nu": exact_nu, "ex": exact_ex}[args.quantity]
        res = solver(args.n, pattern, budget)
        name = f"{args.quantity}_n{args.n}_{pattern.kind.value}_r{pattern.r}_s{pattern.s}.json"
    _emit_json(args, name, res.to_dict())
    if not res.optimal:
        raise BudgetStopped(f"search stopped with bounds {res.lower}..{res.upper}")
    return EXIT_OK


def cmd_lp(args) -> int:
    _need(args, "n")
    pattern = _pattern_from_args(args)
    stem = f"lp_n{args.n}_{pattern.kind.value}_r{pattern.r}_s{pattern.s}"
    if args.format == "lp":
        _emit(args, stem + ".lp", to_lp_format(args.n, pattern))
        return EXIT_OK
    out = solve_fractional(args.n, pattern)
    _emit_json(args, stem + ".json", out.to_dict())
    return EXIT_OK


# ---------------------------------------------------------------------------
# label

def _build_labeling(construction: str, n: int, k: int) -> Labeling:
    if construction == "odd":
        return odd_construction(n, k)
    if construction == "even":
        return even_construction(n, k)
    raise ParameterError(f"construction must be odd or even, got {construction!r}")


def parse_range(text: str) -> list[int]:
    """``a``, ``a..b`` or ``a..b:step`` (inclusive); ``;`` joins several."""
    values = []
    for piece in text.split(";"):
        piece = piece.strip()
        if ".." in piece:
            span, _, step = piece.partition(":")
            lo, hi = span.split("..")
            step = int(step) if step else 1
            if step <= 0:
                raise ParameterError(f"range step must be positive in {piece!r}")
            values.extend(range(int(lo), int(hi) + 1, step))
        else:
            values.append(int(piece))
    return values


def cmd_label(args) -> int:
    if args.action in ("odd", "even"):
        _need(args, "n", "k")
        phi = _build_labeling(args.action, args.n, args.k)
        stem = f"{args.action}_n{args.n}_k{args.k}"
        if args.hypergraph:
            _emit_json(args, stem + "_hypergraph.json", labeling_to_hypergraph(phi).to_dict())
            return EXIT_OK
        good, bad = cost(phi)
        meta = dict(phi.sidecar(), good=good, bad=bad)
        if args.out:
            _emit(args, stem + ".csv", phi.to_csv())
            _emit_json(args, stem + ".json", meta)
        else:
            sys.stdout.write(phi.to_csv())
            log.info("%s", json.dumps(meta))
        return EXIT_OK
    if args.action == "cost":
        _need(args, "input", "sidecar")
        phi = Labeling.from_files(Path(args.input).read_text(), Path(args.sidecar).read_text())
        good, bad = cost(phi)
        _emit_json(args, "cost.json", {"n": phi.n, "k": phi.k, "good": good, "bad": bad,
                                       "bad_fraction": str(Fraction(bad, comb(phi.n, 3)) if phi.n >= 3 else 0)})
        return EXIT_OK
    if args.action == "density":
        _need(args, "k", "ns")
        construction = args.construction or ("odd" if args.k % 2 else "even")
        text = emit_density_table(construction, parse_range(args.ns), args.k)
        _emit(args, f"density_{construction}_k{args.k}.csv", text)
        return EXIT_OK
    raise ParameterError(f"unknown label action {args.action}")  # pragma: no cover


# ---------------------------------------------------------------------------
# sweep

SWEEP_QUANTITIES = ("construct", "verify", "tau", "nu", "ex", "lp", "f", "label-density")


@dataclass
class SweepSpec:
    grid: dict
    quantities: list
    kind: str = "natural"
    out: str | None = None
    node_limit: int = 10**8
    time_limit: float = 60.0
    points: list = field(default_factory=list)

    @classmethod
    def parse(cls, grid_text: str, quantity_text: str, **kw) -> "SweepSpec":
        grid = {}
        for item in grid_text.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in ("n", "r", "s", "k"):
                raise ParameterError(f"bad grid item {item!r}; expected n|r|s|k=range")
            grid[key] = parse_range(value)
        quantities = [q.strip() for q in quantity_text.split(",") if q.strip()]
        unknown = [q for q in quantities if q not in SWEEP_QUANTITIES]
        if unknown:
            raise ParameterError(f"unknown quantities {unknown}; choose from {list(SWEEP_QUANTITIES)}")
        spec = cls(grid, quantities, **kw)
        keys = list(grid)
        points = [{}]
        for key in keys:
            points = [dict(p, **{key: v}) for p in points for v in grid[key]]
        spec.points = points
        return spec

    def columns(self) -> list[str]:
        cols = list(self.grid)
        for q in self.quantities:
            cols.extend({
                "construct": ["transversal", "packing", "expected"],
                "verify": ["transversal_ok", "packing_ok"],
                "tau": ["tau", "tau_status"],
                "nu": ["nu", "nu_status"],
                "ex": ["ex", "ex_status"],
                "lp": ["lp", "lp_float"],
                "f": ["f", "f_status"],
                "label-density": ["construction", "bad", "bad_fraction", "bad_fraction_float",
                                  "limit", "gap_float"],
            }[q])
        return cols


def _point_pattern(point, kind) -> PatternSpec:
    if "r" not in point or "s" not in point:
        raise ParameterError("needs r and s in the grid")
    return PatternSpec(PatternKind(kind), point["r"], point["s"])


def _require_nk(point):
    if "n" not in point or "k" not in point:
        raise ParameterError("needs n and k in the grid")


def sweep_point(spec: SweepSpec, point: dict) -> tuple[dict | None, str | None]:
    """Evaluate one grid point; returns (row, None) or (None, skip reason)."""
    row = dict(point)
    budget = SearchBudget(spec.node_limit, spec.time_limit)
    try:
        n = point.get("n")
        if n is None:
            raise ParameterError("needs n in the grid")
        for q in spec.quantities:
            if q == "construct":
                r, s = point.get("r"), point.get("s")
                _point_pattern(point, "natural")
                row["expected"] = corollary_value(n, r, s)
                row["transversal"] = len(biased_transversal(n, r, s))
                row["packing"] = len(generate_packing(n, r, s))
            elif q == "verify":
                r, s = point.get("r"), point.get("s")
                pattern = _point_pattern(point, spec.kind)
                corollary_value(n, r, s)
                T = biased_transversal(n, r, s)
                row["transversal_ok"] = verify_transversal(T.graph, pattern).verified
                row["packing_ok"] = verify_packing(generate_packing(n, r, s)).verified
            elif q in ("tau", "nu", "ex"):
                pattern = _point_pattern(point, spec.kind)
                if pattern.s > n:
                    raise ParameterError(f"pattern has s={pattern.s} > n={n} vertices")
                res = {"tau": exact_tau, "nu": exact_nu, "ex": exact_ex}[q](n, pattern, budget)
                row[q] = res.value if res.optimal else f"{res.lower}..{res.upper}"
                row[f"{q}_status"] = res.status
            elif q == "lp":
                pattern = _point_pattern(point, spec.kind)
                value = solve_fractional(n, pattern).value
                row["lp"], row["lp_float"] = str(value), f"{float(value):.6f}"
            elif q == "f":
                _require_nk(point)
                res = exact_f(n, point["k"], budget)
                row["f"] = res.value if res.optimal else f"{res.lower}..{res.upper}"
                row["f_status"] = res.status
            elif q == "label-density":
                _require_nk(point)
                k = point["k"]
                if n < 3:
                    raise ParameterError("densities need n >= 3")
                construction = "odd" if k % 2 else "even"
                bad = cost(_build_labeling(construction, n, k))[1]
                frac = Fraction(bad, comb(n, 3))
                limit = bad_fraction_limit(k)
                row.update(construction=construction, bad=bad, bad_fraction=str(frac),
                           bad_fraction_float=f"{float(frac):.6f}", limit=str(limit),
                           gap_float=f"{float(frac - limit):.6f}")
    except (ParameterError, PreconditionError) as exc:
        return None, str(exc)
    return row, None


def _sweep_task(job):
    spec, point = job
    return sweep_point(spec, point)


def cmd_sweep(args) -> int:
    base = _budget(args)
    spec = SweepSpec.parse(args.grid, args.quantity, kind=args.kind, out=args.out,
                           node_limit=base.node_limit, time_limit=base.time_limit)
    jobs = [(spec, p) for p in spec.points]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_sweep_task, jobs))   # map keeps grid order
    else:
        results = [_sweep_task(j) for j in jobs]
    rows, skipped = [], []
    for point, (row, reason) in zip(spec.points, results):
        if row is None:
            log.warning("skipping %s: %s", point, reason)
            skipped.append({"point": point, "reason": reason})
        else:
            rows.append(row)
    _emit(args, args.name, _rows_to_csv(spec.columns(), rows))
    if args.out and skipped:
        _emit_json(args, Path(args.name).stem + "_skipped.json", skipped)
    return EXIT_OK


# ---------------------------------------------------------------------------
# reproduce

def cmd_reproduce(args) -> int:
    if args.criterion == "all":
        ids = list(acceptance.CRITERIA)
    else:
        try:
            ids = [int(args.criterion)]
        except ValueError:
            raise ParameterError(f"criterion must be 1..9 or 'all', got {args.criterion!r}") from None
        if ids[0] not in acceptance.CRITERIA:
            raise ParameterError(f"no criterion {ids[0]}; choose 1..{len(acceptance.CRITERIA)} or all")
    results = []
    for cid in ids:
        res = acceptance.run_criterion(cid)
        print(res.line(), flush=True)
        results.append(res)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"criterion_{cid}.json").write_text(json.dumps(res.to_dict(), indent=2, default=str))
    failed = [r.id for r in results if not r.ok]
    if failed:
        raise CheckFailed(f"criteria failed: {failed}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _add_budget(p):
    p.add_argument("--node-limit", type=int, default=None, help="search node budget")
    p.add_argument("--time-limit", type=float, default=None, help="search time budget in seconds")


def _add_pattern(p):
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--kind", default="natural", choices=[k.value for k in PatternKind],
                   help="pattern family used with --r/--s")
    p.add_argument("--pattern", help="pattern as kind:r:s, e.g. natural:3:5")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ordered-turan",
                                     description="Ordered hypergraph Turan constructions and exact solvers.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--out", help="directory for output files (default: stdout)")
    # the same options are accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="directory for output files")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = command("construct", help="build a transversal, packing, weighting or blow-up")
    p.add_argument("object", choices=["transversal", "packing", "flower", "weights", "blowup"])
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--kind", default="natural", choices=[k.value for k in PatternKind],
                   help="pattern the weights are checked against")
    p.add_argument("--padded", action="store_true",
                   help="allow n not divisible by the flower size (flower, weights)")
    p.set_defaults(func=cmd_construct)

    p = command("verify", help="check a transversal, packing or weighting")
    p.add_argument("object", choices=["transversal", "packing", "weights"])
    _add_pattern(p)
    p.add_argument("--input", help="JSON file (hypergraph or weights)")
    p.set_defaults(func=cmd_verify)

    p = command("exact", help="exact tau, nu, ex or f")
    p.add_argument("quantity", choices=["tau", "nu", "ex", "f", "monotone-f"])
    _add_pattern(p)
    p.add_argument("--k", type=int)
    p.add_argument("--method", default="auto", choices=["auto", "exhaustive", "branch"])
    p.add_argument("--all-optima", action="store_true", help="list every optimal labeling")
    p.add_argument("--symmetry", action="store_true",
                   help="use the reversal symmetry to prune the labeling search")
    _add_budget(p)
    p.set_defaults(func=cmd_exact)

    p = command("lp", help="solve the fractional transversal / packing LP exactly")
    _add_pattern(p)
    p.add_argument("--format", default="json", choices=["json", "lp"])
    p.set_defaults(func=cmd_lp)

    p = command("label", help="labeling constructions, costs and density tables")
    p.add_argument("action", choices=["odd", "even", "cost", "density"])
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--ns", help="n values for density, e.g. 60..300:60")
    p.add_argument("--construction", choices=["odd", "even"])
    p.add_argument("--input", help="labeling CSV (cost)")
    p.add_argument("--sidecar", help="labeling sidecar JSON (cost)")
    p.add_argument("--hypergraph", action="store_true", help="emit the associated 3-graph instead")
    p.set_defaults(func=cmd_label)

    p = command("sweep", help="evaluate quantities over a parameter grid, one CSV row per point")
    p.add_argument("--grid", required=True, help="e.g. n=4..10:2,r=3,s=4..5")
    p.add_argument("--quantity", required=True, help=f"comma list from {','.join(SWEEP_QUANTITIES)}")
    p.add_argument("--kind", default="natural", choices=[k.value for k in PatternKind])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--name", default="sweep.csv", help="file name inside --out")
    _add_budget(p)
    p.set_defaults(func=cmd_sweep)

    p = command("reproduce", help="run an acceptance check (1-9) or all of them")
    p.add_argument("criterion")
    p.set_defaults(func=cmd_reproduce)
    return parser


def _error(kind: str, exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": str(exc)}}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CheckFailed as exc:
        return _error("check-failed", exc, EXIT_FAILED)
    except (BudgetStopped, ResourceLimitError) as exc:
        return _error("budget", exc, EXIT_BUDGET)
    except INPUT_ERRORS as exc:
        return _error(type(exc).__name__, exc, EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
