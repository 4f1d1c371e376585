"""Explicit spectra: paths, equilateral stars, loops, and the Dirichlet and
decoupled Neumann Laplacians of an arbitrary metric graph.

Every eigenvalue here has the form (w*pi)^2.  When the input lengths are
exact, the wavenumbers w are exact elements of Q(sqrt 2) and are kept on the
returned :class:`Spectrum`; float inputs give float values only.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Real

from .exact import QSqrt2
from .graph import MetricGraph, Spectrum, check_valid

_HALF = Fraction(1, 2)


def _split_length(x, what="length"):
    """(float value, exact value or None) of a positive length."""
    if isinstance(x, QSqrt2) or (isinstance(x, Real) and not isinstance(x, float)):
        exact = QSqrt2.coerce(x)
        if exact.sign() <= 0:
            raise ValueError(f"{what} must be positive")
        return float(exact), exact
    value = float(x)
    if not value > 0 or math.isinf(value):
        raise ValueError(f"{what} must be positive and finite")
    return value, None


def _spectrum(ws_exact, ws_float, provenance) -> Spectrum:
    values = [(w * math.pi) ** 2 for w in ws_float]
    return Spectrum(tuple(values), "closed-form",
                    wavenumbers=tuple(ws_exact) if ws_exact is not None else None,
                    provenance=provenance)


def _check_count(count: int) -> None:
    if count < 0:
        raise ValueError("count must be nonnegative")


def _scaled(multipliers, length, exact):
    """w = m / L for every multiplier m, exactly when possible."""
    fl = [float(m) / length for m in multipliers]
    ex = None if exact is None else [QSqrt2(m) / exact for m in multipliers]
    return ex, fl


def path_spectrum(total_length, count: int) -> Spectrum:
    """Neumann interval of the given length: lambda_{k+1} = k^2 pi^2 / L^2."""
    _check_count(count)
    L, exact = _split_length(total_length, "total_length")
    ex, fl = _scaled([Fraction(k) for k in range(count)], L, exact)
    return _spectrum(ex, fl, "path: k^2 pi^2 / L^2")


def equilateral_star_spectrum(edge_count: int, edge_length, count: int) -> Spectrum:
    """Star with ``edge_count`` edges of equal length.

    Eigenvalues j^2 pi^2/L^2 are simple; (j + 1/2)^2 pi^2/L^2 have
    multiplicity edge_count - 1.
    """
    if edge_count < 2:
        raise ValueError("a star needs at least two edges")
    _check_count(count)
    L, exact = _split_length(edge_length, "edge_length")
    mults: list[Fraction] = []
    j = 0
    while len(mults) < count:
        mults.append(Fraction(j))
        mults.extend([j + _HALF] * (edge_count - 1))
        j += 1
    ex, fl = _scaled(mults[:count], L, exact)
    return _spectrum(ex, fl, "equilateral star: j^2 pi^2/L^2 (simple), (j+1/2)^2 pi^2/L^2 (mult |E|-1)")


def loop_spectrum(circumference, count: int) -> Spectrum:
    """Circle of length L: 0, then 4 m^2 pi^2 / L^2 with multiplicity two."""
    _check_count(count)
    L, exact = _split_length(circumference, "circumference")
    mults: list[Fraction] = [Fraction(0)]
    m = 1
    while len(mults) < count:
        mults.extend([Fraction(2 * m)] * 2)
        m += 1
    ex, fl = _scaled(mults[:count], L, exact)
    return _spectrum(ex, fl, "loop: 4 m^2 pi^2 / L^2 (mult 2)")


def _edge_multiset(graph: MetricGraph, count: int, first_mode: int):
    check_valid(graph)
    _check_count(count)
    if not graph.edges:
        raise ValueError("graph has no edges")
    # m / L(e) for the `count` smallest m per edge covers the global `count` smallest
    cands = [(QSqrt2(m) / e.length, m, float(e.length))
             for e in graph.edges for m in range(first_mode, first_mode + count)]
    cands.sort(key=lambda c: c[0])
    chosen = cands[:count]
    return [c[0] for c in chosen], [c[1] / c[2] for c in chosen]


def dirichlet_spectrum(graph: MetricGraph, count: int) -> Spectrum:
    """Sorted multiset m^2 pi^2 / L(e)^2, m >= 1, over all edges."""
    ex, fl = _edge_multiset(graph, count, 1)
    return _spectrum(ex, fl, "dirichlet: m^2 pi^2 / L(e)^2, m >= 1")


def neumann_decoupled_spectrum(graph: MetricGraph, count: int) -> Spectrum:
    """Direct sum of Neumann intervals: m^2 pi^2 / L(e)^2, m >= 0."""
    ex, fl = _edge_multiset(graph, count, 0)
    return _spectrum(ex, fl, "decoupled neumann: m^2 pi^2 / L(e)^2, m >= 0")


def format_pi_squared(w: QSqrt2) -> str:
    """Render (w*pi)^2 as an exact multiple of pi^2."""
    sq = w * w
    if sq == 0:
        return "0"
    return f"({sq})·π²"
