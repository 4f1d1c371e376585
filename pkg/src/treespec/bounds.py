"""Upper bounds for eigenvalues of the standard Laplacian on metric trees,
their equality cases, and reports comparing them with computed spectra.

Index convention: row ``k`` compares lambda_{k+1} with the k-th bound.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import gcd, lcm

from .closed_form import dirichlet_spectrum, neumann_decoupled_spectrum
from .exact import QSqrt2, rationally_dependent
from .graph import (MetricGraph, Spectrum, check_valid, diameter, is_equilateral_star,
                    is_path_graph, is_tree, subdivide_loops, total_length)

PI2 = math.pi ** 2
EQUALITY_RTOL = 1e-7

REPORT_COLUMNS = (
    "graph_id", "k", "lambda", "bound_avg", "bound_diam", "bound_lmax", "lambda_kD", "lambda_Nk1",
    "sat_avg", "sat_diam", "sat_lmax", "sat_dirichlet",
    "eq_avg", "eq_diam", "eq_lmax", "eq_dirichlet", "strict_expected",
    "bound_kkmm", "sat_kkmm", "eq_kkmm",
)


class BoundViolation(AssertionError):
    """A proved inequality failed numerically; points at a solver defect."""


def _positive(x, what):
    x = float(x)
    if not x > 0:
        raise ValueError(f"{what} must be positive")
    return x


def bound_average(k: int, edge_count: int, total_length) -> float:
    """k^2 |E|^2 pi^2 / (4 L(G)^2), valid for trees with |E| >= 2."""
    if edge_count < 2:
        raise ValueError("the average-length bound needs |E| >= 2")
    L = _positive(total_length, "total_length")
    return k * k * edge_count * edge_count * PI2 / (4.0 * L * L)


def bound_diameter(k: int, diam) -> float:
    d = _positive(diam, "diameter")
    return k * k * PI2 / (d * d)


def bound_lmax(k: int, longest_edge) -> float:
    L = _positive(longest_edge, "longest_edge")
    return k * k * PI2 / (L * L)


def bound_kkmm(edge_count: int, total_length) -> float:
    """|E|^2 pi^2 / L(G)^2 for the spectral gap of any connected graph."""
    if edge_count < 1:
        raise ValueError("edge_count must be >= 1")
    L = _positive(total_length, "total_length")
    return edge_count * edge_count * PI2 / (L * L)


def rationally_independent(a: QSqrt2, b: QSqrt2) -> bool:
    """True iff a / b is irrational."""
    if a.sign() <= 0 or b.sign() <= 0:
        raise ValueError("lengths must be positive")
    return not rationally_dependent(a, b)


def has_independent_pair(graph: MetricGraph) -> bool:
    ls = graph.lengths
    # dependence is an equivalence relation on nonzero lengths
    return any(rationally_independent(ls[0], l) for l in ls[1:])


@dataclass(frozen=True)
class EqualityIndex:
    x: Fraction
    k: int


def gd_equality_index(graph: MetricGraph) -> EqualityIndex:
    """Smallest x > 0 with x L(e) integral for all e, and k = x L(G).

    For a tree, lambda_{k+1} equals lambda_k^D at this k.
    """
    check_valid(graph)
    if not graph.edges:
        raise ValueError("graph has no edges")
    if any(not e.length.is_rational() for e in graph.edges):
        raise ValueError("all edge lengths must be rational")
    fr = [e.length.rational_part for e in graph.edges]
    den = lcm(*(f.denominator for f in fr))
    nums = [int(f * den) for f in fr]
    x = Fraction(den, gcd(*nums))
    k = x * total_length(graph).rational_part
    assert k.denominator == 1
    return EqualityIndex(x, int(k))


def equality_k(graph: MetricGraph) -> int:
    """k = x L(G) for pairwise commensurable lengths, any common irrational factor allowed."""
    if has_independent_pair(graph):
        raise ValueError("graph has rationally independent edge lengths")
    unit = graph.edges[0].length
    return gd_equality_index(graph.scaled(QSqrt2(1) / unit)).k


# reports -----------------------------------------------------------------

def _compare(lam: float, bound: float | None, rtol: float):
    """(satisfied, equal) flags; never both violated and equal."""
    if bound is None:
        return None, None
    margin = bound - lam
    tol = rtol * abs(bound)
    return margin >= -tol, abs(margin) <= tol


@dataclass
class BoundRow:
    k: int
    lam: float
    bound_avg: float | None
    bound_diam: float | None
    bound_lmax: float | None
    lambda_kD: float
    lambda_Nk1: float
    sat_avg: bool | None
    sat_diam: bool | None
    sat_lmax: bool | None
    sat_dirichlet: bool | None
    eq_avg: bool | None
    eq_diam: bool | None
    eq_lmax: bool | None
    eq_dirichlet: bool | None
    strict_expected: bool | None
    sat_neumann: bool
    bound_kkmm: float | None = None
    sat_kkmm: bool | None = None
    eq_kkmm: bool | None = None

    def margins(self) -> dict[str, float]:
        out = {}
        for name, b in (("avg", self.bound_avg), ("diam", self.bound_diam),
                        ("lmax", self.bound_lmax), ("kkmm", self.bound_kkmm)):
            if b is not None:
                out[name] = b - self.lam
        if self.sat_dirichlet is not None:
            out["dirichlet"] = self.lambda_kD - self.lam
        out["neumann"] = self.lam - self.lambda_Nk1
        return out

    def violations(self) -> list[str]:
        names = ("avg", "diam", "lmax", "dirichlet", "kkmm")
        bad = [n for n in names if getattr(self, f"sat_{n}") is False]
        if not self.sat_neumann:
            bad.append("neumann")
        return bad

    def record(self, graph_id: str) -> dict:
        d = asdict(self)
        d.pop("sat_neumann")
        d["lambda"] = d.pop("lam")
        d["graph_id"] = graph_id
        return {c: d[c] for c in REPORT_COLUMNS}


@dataclass
class BoundReport:
    graph_id: str
    tree: bool
    edge_count: int
    equilateral_star: bool
    strict_expected: bool | None
    # index k with lambda_{k+1} = lambda_k^D when all lengths are commensurable
    equality_k: int | None
    rows: list[BoundRow] = field(default_factory=list)

    def records(self) -> list[dict]:
        return [r.record(self.graph_id) for r in self.rows]

    def violations(self) -> list[tuple[int, str]]:
        return [(r.k, name) for r in self.rows for name in r.violations()]

    def row(self, k: int) -> BoundRow:
        return self.rows[k - 1]


def check_all(graph: MetricGraph, max_k: int, spectrum: Spectrum, graph_id: str = "G",
              rtol: float = EQUALITY_RTOL, strict: bool = True) -> BoundReport:
    """Compare lambda_{k+1} with every applicable bound for k = 1..max_k.

    Tree bounds are only evaluated on trees.  With ``strict`` a violated
    bound raises :class:`BoundViolation`; the theorems are proved, so a
    violation means the computed spectrum is wrong.
    """
    check_valid(graph)
    if max_k < 1:
        raise ValueError("max_k must be >= 1")
    if len(spectrum) < max_k + 1:
        raise ValueError(f"spectrum has {len(spectrum)} entries, need {max_k + 1}")
    tree = is_tree(graph)
    m = len(graph.edges)
    L = float(total_length(graph))
    dir_spec = dirichlet_spectrum(graph, max_k)
    neu_spec = neumann_decoupled_spectrum(graph, max_k + m)
    # lambda_k^D = lambda_{k+|E|}^N holds exactly: the Neumann multiset is
    # the Dirichlet one plus |E| zeros
    assert dir_spec.wavenumbers == neu_spec.wavenumbers[m:m + max_k]

    independent = has_independent_pair(graph)
    eq_k = equality_k(graph) if tree and not independent else None
    report = BoundReport(graph_id, tree, m, tree and is_equilateral_star(graph),
                         independent if tree else None, eq_k)

    diam = float(diameter(graph)) if tree else None
    lmax = float(graph.longest_edge())
    kkmm_graph = subdivide_loops(graph)
    for k in range(1, max_k + 1):
        lam = spectrum.nth(k + 1)
        b_avg = bound_average(k, m, L) if tree and m >= 2 else None
        b_diam = bound_diameter(k, diam) if tree else None
        b_lmax = bound_lmax(k, lmax) if tree else None
        lam_d = dir_spec.nth(k)
        lam_n = neu_spec.nth(k + 1)
        sat_avg, eq_avg = _compare(lam, b_avg, rtol)
        sat_diam, eq_diam = _compare(lam, b_diam, rtol)
        sat_lmax, eq_lmax = _compare(lam, b_lmax, rtol)
        sat_dir, eq_dir = _compare(lam, lam_d if tree else None, rtol)
        sat_neu = lam - lam_n >= -rtol * max(lam_n, 1.0)
        row = BoundRow(k, lam, b_avg, b_diam, b_lmax, lam_d, lam_n,
                       sat_avg, sat_diam, sat_lmax, sat_dir,
                       eq_avg, eq_diam, eq_lmax, eq_dir,
                       independent if tree else None, sat_neu)
        if k == 1:
            row.bound_kkmm = bound_kkmm(len(kkmm_graph.edges), L)
            row.sat_kkmm, row.eq_kkmm = _compare(lam, row.bound_kkmm, rtol)
        report.rows.append(row)

    if strict:
        bad = report.violations()
        if bad:
            details = "; ".join(
                f"k={k} {name} (lambda={report.row(k).lam!r}, margins={report.row(k).margins()})"
                for k, name in bad)
            raise BoundViolation(f"{graph_id}: {details}")
    return report


def report_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for rep in reports:
        for rec in rep.records():
            w.writerow(["" if rec[c] is None else _fmt(rec[c]) for c in REPORT_COLUMNS])
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


# domain monotonicity ---------------------------------------------------------

@dataclass
class MonotonicityRecord:
    ks: list[int]
    host: list[float]
    extended: list[float]
    strict_expected: bool

    @property
    def margins(self) -> list[float]:
        return [h - e for h, e in zip(self.host, self.extended)]


def strictness_expected(host: MetricGraph, extended: MetricGraph) -> bool:
    """Host is a path and one of its boundary vertices is interior in the extension."""
    if not is_path_graph(host):
        return False
    deg = extended.degrees()
    return any(deg.get(v, 0) >= 2 for v in host.boundary_vertices())


def monotonicity_check(host: MetricGraph, extended: MetricGraph, max_k: int,
                       host_spectrum: Spectrum | None = None,
                       extended_spectrum: Spectrum | None = None,
                       tol: float = 1e-8, strict_margin: float = 1e-8,
                       solver_tolerance: float = 1e-13) -> MonotonicityRecord:
    """lambda_k(extended) <= lambda_k(host) + tol for k = 1..max_k.

    ``tol`` is absolute, so spectra are computed at ``solver_tolerance``
    relative accuracy.  In the strict case (see
    :func:`strictness_expected`) the margin must exceed ``strict_margin``
    for k >= 2.
    """
    from .secular import eigenvalues

    hs = host_spectrum or eigenvalues(host, max_k, tolerance=solver_tolerance)
    es = extended_spectrum or eigenvalues(extended, max_k, tolerance=solver_tolerance)
    ks = list(range(1, max_k + 1))
    rec = MonotonicityRecord(ks, [hs.nth(k) for k in ks], [es.nth(k) for k in ks],
                             strictness_expected(host, extended))
    for k, margin in zip(ks, rec.margins):
        if margin < -tol:
            raise BoundViolation(f"monotonicity fails at k={k}: margin {margin!r}")
        if rec.strict_expected and k >= 2 and margin <= strict_margin:
            raise BoundViolation(f"strict monotonicity fails at k={k}: margin {margin!r}")
    return rec
