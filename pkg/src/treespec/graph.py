"""Metric graphs with exact edge lengths.

A :class:`MetricGraph` is an immutable list of vertex identifiers plus an
ordered tuple of oriented edges, each carrying a length in Q(sqrt 2).  Edge
order is significant: it fixes the bond indexing of the secular solver and
is preserved by serialization.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .exact import QSqrt2

METHODS = ("closed-form", "secular", "variational-oracle")


class InvalidGraphError(ValueError):
    pass


def as_length(x) -> QSqrt2:
    """Coerce ints, Fractions, strings like ``"3/2"`` or QSqrt2 to a length."""
    if isinstance(x, float):
        raise TypeError("float lengths are not exact; pass a Fraction or QSqrt2")
    return QSqrt2.coerce(x)


@dataclass(frozen=True)
class Edge:
    origin: str
    terminus: str
    length: QSqrt2

    @property
    def is_loop(self) -> bool:
        return self.origin == self.terminus


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


@dataclass(frozen=True)
class MetricGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], vertices: Sequence[str] | None = None):
        """Build from ``(origin, terminus, length)`` triples.

        Vertices default to the endpoints in order of first appearance.
        """
        es = tuple(Edge(str(o), str(t), as_length(l)) for o, t, l in edges)
        if vertices is None:
            seen: dict[str, None] = {}
            for e in es:
                seen.setdefault(e.origin)
                seen.setdefault(e.terminus)
            vertices = tuple(seen)
        return cls(tuple(str(v) for v in vertices), es)

    @property
    def lengths(self) -> tuple[QSqrt2, ...]:
        return tuple(e.length for e in self.edges)

    def float_lengths(self) -> np.ndarray:
        return np.array([float(e.length) for e in self.edges], dtype=float)

    def degree(self, v: str) -> int:
        return sum((e.origin == v) + (e.terminus == v) for e in self.edges)

    def degrees(self) -> dict[str, int]:
        deg = dict.fromkeys(self.vertices, 0)
        for e in self.edges:
            deg[e.origin] = deg.get(e.origin, 0) + 1
            deg[e.terminus] = deg.get(e.terminus, 0) + 1
        return deg

    def boundary_vertices(self) -> list[str]:
        return [v for v, d in self.degrees().items() if d == 1]

    def longest_edge(self) -> QSqrt2:
        return max(self.lengths)

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for i, e in enumerate(self.edges):
            g.add_edge(e.origin, e.terminus, key=i, length=e.length)
        return g

    def scaled(self, factor) -> "MetricGraph":
        c = as_length(factor)
        if c.sign() <= 0:
            raise ValueError("scale factor must be positive")
        return MetricGraph(self.vertices,
                           tuple(Edge(e.origin, e.terminus, e.length * c) for e in self.edges))


@dataclass(frozen=True)
class Spectrum:
    """First eigenvalues of a Laplacian, repeated according to multiplicity.

    ``wavenumbers`` optionally holds exact values w with eigenvalue
    ``(w*pi)**2``; closed-form spectra fill it in.
    """

    values: tuple[float, ...]
    method: str
    wavenumbers: tuple[QSqrt2, ...] | None = None
    provenance: str | None = None
    diagnostics: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if any(b < a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("spectrum must be nondecreasing")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def nth(self, k: int) -> float:
        """lambda_k with the 1-based indexing used for eigenvalue bounds."""
        if k < 1:
            raise IndexError("eigenvalue indices start at 1")
        return self.values[k - 1]

    def array(self) -> np.ndarray:
        return np.asarray(self.values)

    def exact_squares(self) -> tuple[QSqrt2, ...] | None:
        """Exact lambda / pi^2 for each entry, when known."""
        if self.wavenumbers is None:
            return None
        return tuple(w * w for w in self.wavenumbers)

    def grouped(self, rtol: float = 1e-9) -> list[tuple[float, int]]:
        """Distinct eigenvalues with multiplicities."""
        out: list[list] = []
        for v in self.values:
            if out and abs(v - out[-1][0]) <= rtol * max(abs(v), 1.0):
                out[-1][1] += 1
            else:
                out.append([v, 1])
        return [(v, m) for v, m in out]


# construction helpers -----------------------------------------------------

def path_graph(lengths: Sequence) -> MetricGraph:
    return MetricGraph.from_edges(
        [(f"v{i}", f"v{i + 1}", l) for i, l in enumerate(lengths)])


def star_graph(lengths: Sequence) -> MetricGraph:
    return MetricGraph.from_edges(
        [("c", f"l{i}", l) for i, l in enumerate(lengths)],
        vertices=["c"] + [f"l{i}" for i in range(len(lengths))])


def loop_graph(length) -> MetricGraph:
    return MetricGraph.from_edges([("v", "v", length)])


def cycle_graph(lengths: Sequence) -> MetricGraph:
    n = len(lengths)
    return MetricGraph.from_edges(
        [(f"v{i}", f"v{(i + 1) % n}", l) for i, l in enumerate(lengths)],
        vertices=[f"v{i}" for i in range(n)])


# structural predicates ---------------------------------------------------

def validate(graph: MetricGraph) -> list[Violation]:
    """All structural problems of ``graph``; empty list means valid."""
    out: list[Violation] = []
    if not graph.vertices:
        out.append(Violation("empty", "graph has no vertices"))
        return out
    if len(set(graph.vertices)) != len(graph.vertices):
        dup = sorted({v for v in graph.vertices if graph.vertices.count(v) > 1})
        out.append(Violation("duplicate-vertex", ", ".join(dup)))
    known = set(graph.vertices)
    dangling = False
    for i, e in enumerate(graph.edges):
        for v in (e.origin, e.terminus):
            if v not in known:
                dangling = True
                out.append(Violation("dangling-vertex", f"edge {i} references unknown vertex {v!r}"))
        if e.length.sign() <= 0:
            out.append(Violation("nonpositive-length", f"edge {i} has length {e.length}"))
    if not dangling:
        if not nx.is_connected(graph.to_networkx()):
            n_comp = nx.number_connected_components(graph.to_networkx())
            out.append(Violation("disconnected", f"{n_comp} connected components"))
    return out


def check_valid(graph: MetricGraph) -> MetricGraph:
    problems = validate(graph)
    if problems:
        raise InvalidGraphError("; ".join(map(str, problems)))
    return graph


def is_tree(graph: MetricGraph) -> bool:
    check_valid(graph)
    return len(graph.vertices) == len(graph.edges) + 1


def is_path_graph(graph: MetricGraph) -> bool:
    return is_tree(graph) and len(graph.edges) >= 1 and max(graph.degrees().values()) <= 2


def total_length(graph: MetricGraph) -> QSqrt2:
    return sum(graph.lengths, QSqrt2(0))


def is_equilateral_star(graph: MetricGraph) -> bool:
    """A center incident to every edge, equal lengths, at least two edges."""
    check_valid(graph)
    if len(graph.edges) < 2 or not is_tree(graph):
        return False
    if len(set(graph.lengths)) != 1:
        return False
    m = len(graph.edges)
    return any(d == m for d in graph.degrees().values())


# distances -----------------------------------------------------------------

def vertex_distances(graph: MetricGraph) -> dict[str, dict[str, QSqrt2]]:
    """All-pairs shortest path lengths between vertices (exact)."""
    g = graph.to_networkx()
    dist = dict(nx.all_pairs_dijkstra_path_length(g, weight="length"))
    return {u: {v: QSqrt2.coerce(d) for v, d in row.items()} for u, row in dist.items()}


def _two_edge_max(l1, l2, d_uu, d_uv, d_vu, d_vv) -> QSqrt2:
    """max over x in edge 1, y in edge 2 of dist(x, y).

    Edge i is parametrized by s in [0, l_i] from its origin.  The distance
    is the minimum of four affine functions; the maximum of this concave
    piecewise-linear function sits at a vertex of the line arrangement
    below, so enumerating pairwise intersections inside the box suffices.
    """
    fs = [
        (1, 1, d_uu),
        (1, -1, d_uv + l2),
        (-1, 1, l1 + d_vu),
        (-1, -1, l1 + l2 + d_vv),
    ]
    # lines as (alpha, beta, c): alpha*s + beta*t = c
    lines = [(1, 0, QSqrt2(0)), (1, 0, l1), (0, 1, QSqrt2(0)), (0, 1, l2)]
    for (a1, b1, c1), (a2, b2, c2) in itertools.combinations(fs, 2):
        lines.append((a1 - a2, b1 - b2, c2 - c1))
    best = None
    for (a1, b1, c1), (a2, b2, c2) in itertools.combinations(lines, 2):
        det = a1 * b2 - a2 * b1
        if det == 0:
            continue
        s = (c1 * b2 - c2 * b1) / QSqrt2(det)
        t = (a1 * c2 - a2 * c1) / QSqrt2(det)
        if s < 0 or s > l1 or t < 0 or t > l2:
            continue
        val = min(a * s + b * t + c for a, b, c in fs)
        if best is None or val > best:
            best = val
    return best


def diameter(graph: MetricGraph) -> QSqrt2:
    """Supremum of distances between points of the metric graph.

    For a tree this is the longest boundary-to-boundary path.  Otherwise
    points in edge interiors are taken into account (a cycle of length L
    has diameter L/2).
    """
    check_valid(graph)
    if not graph.edges:
        return QSqrt2(0)
    dist = vertex_distances(graph)
    if is_tree(graph):
        leaves = graph.boundary_vertices()
        return max(dist[u][v] for u in leaves for v in leaves)
    best = QSqrt2(0)
    for e in graph.edges:
        d = dist[e.origin][e.terminus]
        best = max(best, min(e.length, (e.length + d) / 2))
    for e, f in itertools.combinations(graph.edges, 2):
        val = _two_edge_max(e.length, f.length,
                            dist[e.origin][f.origin], dist[e.origin][f.terminus],
                            dist[e.terminus][f.origin], dist[e.terminus][f.terminus])
        best = max(best, val)
    return best


# graph surgery -------------------------------------------------------------

def _fresh(name: str, taken: set[str]) -> str:
    cand = name
    while cand in taken:
        cand += "'"
    return cand


def attach_pendant(host: MetricGraph, at: str, pendant: MetricGraph, pendant_root: str) -> MetricGraph:
    """Glue ``pendant_root`` of ``pendant`` onto vertex ``at`` of ``host``.

    Host vertex names are kept; other pendant vertices are renamed
    ``"<at>/<name>"`` (primed if that is taken).
    """
    check_valid(host)
    check_valid(pendant)
    if at not in host.vertices:
        raise KeyError(f"host has no vertex {at!r}")
    if pendant_root not in pendant.vertices:
        raise KeyError(f"pendant has no vertex {pendant_root!r}")
    taken = set(host.vertices)
    rename = {pendant_root: at}
    for v in pendant.vertices:
        if v != pendant_root:
            rename[v] = _fresh(f"{at}/{v}", taken)
            taken.add(rename[v])
    vertices = host.vertices + tuple(rename[v] for v in pendant.vertices if v != pendant_root)
    edges = host.edges + tuple(Edge(rename[e.origin], rename[e.terminus], e.length)
                               for e in pendant.edges)
    return MetricGraph(vertices, edges)


def subdivide(graph: MetricGraph, edge_index: int, position, name: str | None = None) -> MetricGraph:
    """Insert a degree-2 vertex at distance ``position`` from the edge origin."""
    e = graph.edges[edge_index]
    pos = as_length(position)
    if not (0 < pos < e.length):
        raise ValueError("subdivision point must be interior to the edge")
    v = _fresh(name or f"{e.origin}~{e.terminus}#{edge_index}", set(graph.vertices))
    first = Edge(e.origin, v, pos)
    second = Edge(v, e.terminus, e.length - pos)
    edges = graph.edges[:edge_index] + (first, second) + graph.edges[edge_index + 1:]
    return MetricGraph(graph.vertices + (v,), edges)


def subdivide_loops(graph: MetricGraph) -> MetricGraph:
    """Split every loop edge at its midpoint."""
    g = graph
    i = 0
    while i < len(g.edges):
        e = g.edges[i]
        if e.is_loop:
            g = subdivide(g, i, e.length / 2)
            i += 2
        else:
            i += 1
    return g


# random trees ----------------------------------------------------------------

@dataclass(frozen=True)
class LengthModel:
    """Random edge lengths p/q (+ optionally (r/s)*sqrt 2).

    With ``with_sqrt2`` each length independently gets a sqrt 2 component
    with probability ``sqrt2_probability``.
    """

    max_numerator: int = 16
    max_denominator: int = 16
    with_sqrt2: bool = False
    sqrt2_probability: float = 0.25

    def __post_init__(self):
        if self.max_numerator < 1 or self.max_denominator < 1:
            raise ValueError("numerator and denominator bounds must be >= 1")
        if not 0.0 <= self.sqrt2_probability <= 1.0:
            raise ValueError("sqrt2_probability must lie in [0, 1]")

    def draw(self, rng: np.random.Generator) -> QSqrt2:
        p = int(rng.integers(1, self.max_numerator + 1))
        q = int(rng.integers(1, self.max_denominator + 1))
        if self.with_sqrt2 and rng.random() < self.sqrt2_probability:
            r = int(rng.integers(1, self.max_numerator + 1))
            s = int(rng.integers(1, self.max_denominator + 1))
            return QSqrt2(Fraction(p, q), Fraction(r, s))
        return QSqrt2(Fraction(p, q))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_tree(vertex_count: int, length_model: LengthModel | None = None, seed=None) -> MetricGraph:
    """Uniformly random labeled tree (Pruefer decoding) with random lengths."""
    if vertex_count < 2:
        raise ValueError("vertex_count must be >= 2")
    model = length_model or LengthModel()
    rng = _rng(seed)
    seq = [int(x) for x in rng.integers(0, vertex_count, size=vertex_count - 2)]
    t = nx.from_prufer_sequence(seq) if seq else nx.path_graph(2)
    pairs = sorted(tuple(sorted(uv)) for uv in t.edges())
    edges = [(f"v{u}", f"v{v}", model.draw(rng)) for u, v in pairs]
    return MetricGraph.from_edges(edges, vertices=[f"v{i}" for i in range(vertex_count)])
