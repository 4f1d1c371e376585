"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 theorem violation,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import closed_form
from .bounds import (BoundViolation, check_all, gd_equality_index, monotonicity_check,
                     report_csv)
from .closed_form import dirichlet_spectrum, format_pi_squared
from .graph import (InvalidGraphError, LengthModel, MetricGraph, attach_pendant, is_equilateral_star,
                    is_path_graph, is_tree, loop_graph, random_tree, star_graph, total_length)
from .graphio import GraphFormatError, load_graph
from .oracle import OracleError, eigenvalues_oracle
from .secular import (DEFAULT_SCAN_DIV, DEFAULT_TOL, SolverError, StructuralFailure,
                      eigenvalues, solve_interessant)

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_NUMERICS = 0, 1, 2, 3
PI2 = math.pi ** 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _num(v: float) -> str:
    return repr(float(v))


# spectrum ------------------------------------------------------------------

def closed_form_for(graph: MetricGraph, count: int):
    """Closed-form spectrum for paths, equilateral stars and a lone loop."""
    if len(graph.vertices) == 1 and len(graph.edges) == 1 and graph.edges[0].is_loop:
        return closed_form.loop_spectrum(graph.edges[0].length, count)
    if is_path_graph(graph):
        return closed_form.path_spectrum(total_length(graph), count)
    if is_equilateral_star(graph):
        return closed_form.equilateral_star_spectrum(len(graph.edges), graph.edges[0].length, count)
    raise UsageError("closed-form method applies only to paths, equilateral stars and a single loop")


def compute_spectrum(graph, count, method, tol, scan_div, audit=False):
    if method == "closed-form":
        return closed_form_for(graph, count)
    if method == "oracle":
        return eigenvalues_oracle(graph, count)
    return eigenvalues(graph, count, tolerance=tol, scan_div=scan_div, audit=audit)


def cmd_spectrum(args, out):
    graph = load_graph(args.graph)
    spec = compute_spectrum(graph, args.k, args.method, args.tol, args.scan_div, args.audit)
    exact = spec.wavenumbers
    if args.format == "json":
        doc = {"method": spec.method, "values": list(spec.values)}
        if exact is not None:
            doc["exact"] = [format_pi_squared(w) for w in exact]
        if "audit" in spec.diagnostics:
            doc["audit"] = spec.diagnostics["audit"]
        out.write(json.dumps(doc, indent=2) + "\n")
        return EXIT_OK
    if args.format == "csv":
        out.write("index,lambda" + (",exact" if exact else "") + "\n")
        for i, v in enumerate(spec.values, 1):
            tail = f",{format_pi_squared(exact[i - 1])}" if exact else ""
            out.write(f"{i},{_num(v)}{tail}\n")
        return EXIT_OK
    out.write(f"# method={spec.method} count={len(spec)}\n")
    for i, v in enumerate(spec.values, 1):
        tail = f"  {format_pi_squared(exact[i - 1])}" if exact else ""
        out.write(f"lambda_{i}  {_num(v)}{tail}\n")
    for rec in spec.diagnostics.get("audit", []):
        flag = "certified" if rec["certified"] else "uncertified"
        out.write(f"# audit mu={_num(rec['mu'])} secular={rec['secular']} "
                  f"oracle={rec['oracle']} ({flag})\n")
    return EXIT_OK


# bounds --------------------------------------------------------------------

def cmd_bounds(args, out):
    graph = load_graph(args.graph)
    spec = compute_spectrum(graph, args.k + 1, args.method, args.tol, args.scan_div)
    graph_id = os.path.splitext(os.path.basename(args.graph))[0]
    report = check_all(graph, args.k, spec, graph_id=graph_id)
    if args.format == "json":
        out.write(json.dumps(report.records(), indent=2) + "\n")
    else:
        out.write(report_csv([report]))
    return EXIT_OK


# verify --------------------------------------------------------------------

def _trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def run_trial(seed: int, index: int, max_edges: int, max_k: int, tol: float, scan_div: int) -> dict:
    """One random tree: bound suite, equality/strictness claims, monotonicity."""
    rng = _trial_rng(seed, index)
    model = LengthModel(with_sqrt2=True)
    edges = int(rng.integers(1, max_edges + 1))
    tree = random_tree(edges + 1, model, rng)
    spec = eigenvalues(tree, max_k + 1, tolerance=tol, scan_div=scan_div)
    report = check_all(tree, max_k, spec, graph_id=f"trial{index}", strict=False)
    failures = [f"k={k}: {name} bound violated" for k, name in report.violations()]

    margins: dict[str, float] = {}
    for row in report.rows:
        for name, m in row.margins().items():
            margins[name] = min(margins.get(name, math.inf), m)

    star = report.equilateral_star
    eq_avg_1 = bool(report.rows[0].eq_avg)
    eq_avg_mismatch = edges >= 2 and eq_avg_1 != star
    if eq_avg_mismatch and edges >= 3:
        failures.append("k=1 average-bound equality does not match equilateral-star test")
    if report.strict_expected and any(r.eq_dirichlet for r in report.rows):
        failures.append("Dirichlet equality despite rationally independent lengths")
    eq_k = report.equality_k
    if eq_k is not None and eq_k <= max_k and not report.row(eq_k).eq_dirichlet:
        failures.append(f"no Dirichlet equality at k={eq_k}")

    pend = random_tree(int(rng.integers(2, 5)), model, rng)
    at = tree.vertices[int(rng.integers(len(tree.vertices)))]
    root = pend.vertices[int(rng.integers(len(pend.vertices)))]
    extended = attach_pendant(tree, at, pend, root)
    mono_k = min(max_k, 8)
    try:
        rec = monotonicity_check(tree, extended, mono_k)
        margins["monotonicity"] = min(rec.margins)
    except BoundViolation as err:
        failures.append(str(err))

    return {
        "trial": index,
        "edges": edges,
        "equilateral_star": star,
        "eq_avg_k1": eq_avg_1,
        "eq_avg_mismatch": eq_avg_mismatch,
        "strict_expected": bool(report.strict_expected),
        "equality_k": eq_k,
        "margins": margins,
        "failures": failures,
    }


def _workers() -> int:
    env = os.environ.get("TREESPEC_WORKERS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


def run_campaign(seed: int, trials: int, max_edges: int, max_k: int = 10,
                 tol: float = DEFAULT_TOL, scan_div: int = DEFAULT_SCAN_DIV,
                 workers: int | None = None) -> list[dict]:
    workers = workers or _workers()
    jobs = [(seed, i, max_edges, max_k, tol, scan_div) for i in range(trials)]
    if workers == 1:
        return [run_trial(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order
        return list(pool.map(run_trial, *zip(*jobs), chunksize=8))


def summarize(results: list[dict]) -> dict:
    min_margin: dict[str, float] = {}
    for r in results:
        for name, m in r["margins"].items():
            min_margin[name] = min(min_margin.get(name, math.inf), m)
    failed = [r for r in results if r["failures"]]
    return {
        "trials": len(results),
        "failures": len(failed),
        "failure_details": [{"trial": r["trial"], "failures": r["failures"]} for r in failed[:20]],
        "min_margins": dict(sorted(min_margin.items())),
        "eq_avg_k1_flagged": sum(r["eq_avg_k1"] for r in results),
        "equilateral_stars": sum(r["equilateral_star"] for r in results),
        "eq_avg_mismatches_two_edges": sum(r["eq_avg_mismatch"] and r["edges"] == 2 for r in results),
        "strict_regime": sum(r["strict_expected"] for r in results),
        "equality_regime": sum(r["equality_k"] is not None for r in results),
    }


def cmd_verify(args, out):
    results = run_campaign(args.seed, args.trials, args.max_edges, args.k, args.tol, args.scan_div)
    summary = summarize(results)
    if args.format == "json":
        out.write(json.dumps(summary, indent=2) + "\n")
    else:
        for key in ("trials", "failures", "eq_avg_k1_flagged", "equilateral_stars",
                    "eq_avg_mismatches_two_edges", "strict_regime", "equality_regime"):
            out.write(f"{key}: {summary[key]}\n")
        for name, m in summary["min_margins"].items():
            out.write(f"min_margin[{name}]: {_num(m)}\n")
        for d in summary["failure_details"]:
            out.write(f"FAIL trial {d['trial']}: {'; '.join(d['failures'])}\n")
    return EXIT_VIOLATION if summary["failures"] else EXIT_OK


# named examples ----------------------------------------------------------------

def example_star_limit(ns, tol, out):
    if any(n < 2 or n % 2 for n in ns):
        raise UsageError("star-limit needs even n >= 2")
    out.write("# n lambda_interessant lambda_solver one_minus_lambda\n")
    rows = []
    for n in ns:
        lam = solve_interessant(n)
        # star {pi/n, pi/n, pi} = pi * star {1/n, 1/n, 1}
        unit = star_graph([Fraction(1, n), Fraction(1, n), 1])
        lam_solver = eigenvalues(unit, 2, tolerance=tol)[1] / PI2
        rows.append((n, lam, lam_solver))
        out.write(f"{n} {_num(lam)} {_num(lam_solver)} {_num(1.0 - lam)}\n")
    return rows


def example_loop(length: float, tol, out):
    lam2 = closed_form.loop_spectrum(length, 2)[1]
    lam2_solver = eigenvalues(loop_graph(1), 2, tolerance=tol)[1] / (length * length)
    bound = PI2 / (length * length)
    out.write("# loop of length L: lambda_2 versus the tree bound pi^2 / L_max^2\n")
    out.write(f"L {_num(length)}\n")
    out.write(f"lambda_2 {_num(lam2)}\n")
    out.write(f"lambda_2_solver {_num(lam2_solver)}\n")
    out.write(f"bound_lmax {_num(bound)}\n")
    out.write(f"exceeds_bound {'true' if lam2 > bound else 'false'}\n")
    return lam2, bound


def example_gd_equality(path, tol, out):
    graph = load_graph(path)
    if not is_tree(graph):
        raise UsageError("gd-equality needs a tree")
    idx = gd_equality_index(graph)
    spec = eigenvalues(graph, idx.k + 1, tolerance=tol)
    dir_spec = dirichlet_spectrum(graph, idx.k)
    lam, lam_d = spec.nth(idx.k + 1), dir_spec.nth(idx.k)
    out.write(f"x {idx.x}\n")
    out.write(f"k {idx.k}\n")
    out.write(f"lambda_{idx.k + 1} {_num(lam)}\n")
    out.write(f"lambda_{idx.k}^D {_num(lam_d)}  {format_pi_squared(dir_spec.wavenumbers[-1])}\n")
    out.write(f"relative_difference {_num(abs(lam - lam_d) / lam_d)}\n")
    return idx, lam, lam_d


def cmd_example(args, out):
    if args.name == "star-limit":
        example_star_limit(args.n or [2, 4, 8, 16, 32, 64], args.tol, out)
    elif args.name == "loop":
        example_loop(args.length if args.length is not None else 2 * math.pi, args.tol, out)
    else:
        if not args.graph:
            raise UsageError("gd-equality needs --graph")
        example_gd_equality(args.graph, args.tol, out)
    return EXIT_OK


# wiring --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="treespec", description="Spectra and eigenvalue bounds for metric trees.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def numerics(sp):
        sp.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
        sp.add_argument("--scan-div", type=_positive_int, default=DEFAULT_SCAN_DIV)

    sp = sub.add_parser("spectrum", help="eigenvalues of a graph file")
    sp.add_argument("graph")
    sp.add_argument("--k", type=_positive_int, default=5, help="number of eigenvalues")
    sp.add_argument("--method", choices=["secular", "closed-form", "oracle"], default="secular")
    sp.add_argument("--audit", action="store_true", help="cross-check counts with the FEM oracle")
    sp.add_argument("--format", choices=["text", "csv", "json"], default="text")
    numerics(sp)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("bounds", help="bound report for a graph file")
    sp.add_argument("graph")
    sp.add_argument("--k", type=_positive_int, default=10, help="largest bound index k")
    sp.add_argument("--method", choices=["secular", "closed-form", "oracle"], default="secular")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    numerics(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("verify", help="randomized verification campaign on trees")
    sp.add_argument("--trials", type=_positive_int, default=100)
    sp.add_argument("--max-edges", type=_positive_int, default=12)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--k", type=_positive_int, default=10)
    sp.add_argument("--format", choices=["text", "json"], default="text")
    numerics(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("example", help="named examples")
    sp.add_argument("name", choices=["star-limit", "loop", "gd-equality"])
    sp.add_argument("--n", type=_int_list, help="even n values for star-limit")
    sp.add_argument("--length", type=_positive_float, help="loop length")
    sp.add_argument("--graph", help="rational-length tree for gd-equality")
    numerics(sp)
    sp.set_defaults(func=cmd_example)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, GraphFormatError, InvalidGraphError, OSError, ValueError) as err:
        print(f"treespec: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except BoundViolation as err:
        print(f"treespec: theorem violation: {err}", file=sys.stderr)
        return EXIT_VIOLATION
    except (SolverError, OracleError, StructuralFailure) as err:
        print(f"treespec: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
