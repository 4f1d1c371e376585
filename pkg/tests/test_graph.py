import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from treespec.exact import SQRT2, QSqrt2
from treespec.graph import (Edge, InvalidGraphError, LengthModel, MetricGraph, attach_pendant,
                            cycle_graph, diameter, is_equilateral_star, is_path_graph, is_tree,
                            loop_graph, path_graph, random_tree, star_graph, subdivide,
                            subdivide_loops, total_length, validate, Spectrum)
from treespec.graphio import GraphFormatError, dumps, loads


def kinds(g):
    return {v.kind for v in validate(g)}


def test_validation_kinds():
    assert kinds(MetricGraph((), ())) == {"empty"}
    assert "dangling-vertex" in kinds(MetricGraph(("a",), (Edge("a", "b", QSqrt2(1)),)))
    assert "duplicate-vertex" in kinds(MetricGraph(("a", "a", "b"), (Edge("a", "b", QSqrt2(1)),)))
    assert "nonpositive-length" in kinds(MetricGraph(("a", "b"), (Edge("a", "b", QSqrt2(0)),)))
    assert "disconnected" in kinds(MetricGraph(("a", "b", "c"), (Edge("a", "b", QSqrt2(1)),)))
    assert validate(star_graph([1, 1, 1])) == []


def test_invalid_graph_raises():
    with pytest.raises(InvalidGraphError):
        is_tree(MetricGraph(("a", "b"), ()))


def test_float_lengths_rejected():
    with pytest.raises(TypeError):
        path_graph([0.5])


def test_predicates():
    assert is_tree(star_graph([1, 2, 3]))
    assert not is_tree(loop_graph(1))
    assert not is_tree(cycle_graph([1, 1, 1]))
    assert is_path_graph(path_graph([1, 2]))
    assert not is_path_graph(star_graph([1, 1, 1]))
    assert is_equilateral_star(star_graph([2, 2, 2, 2]))
    assert is_equilateral_star(path_graph([1, 1]))
    assert not is_equilateral_star(path_graph([1, 2]))
    assert not is_equilateral_star(path_graph([1]))
    assert not is_equilateral_star(path_graph([1, 1, 1]))
    assert loop_graph(1).degrees() == {"v": 2}


def test_diameter_examples():
    assert diameter(star_graph([1, 2, 3])) == 5
    assert diameter(path_graph([Fraction(1, 2), Fraction(3, 2)])) == 2
    assert diameter(star_graph([1, 1, SQRT2])) == 1 + SQRT2
    assert diameter(loop_graph(2)) == 1
    assert diameter(cycle_graph([1, 1, 1])) == Fraction(3, 2)


def _sampled_diameter(g, per_edge=24):
    """Brute force over points at rational positions along each edge."""
    import networkx as nx

    nxg = g.to_networkx()
    d = dict(nx.all_pairs_dijkstra_path_length(nxg, weight="length"))
    pts = []
    for e in g.edges:
        L = float(e.length)
        for t in np.linspace(0, 1, per_edge + 1):
            pts.append((e, t * L, L))

    def dist(p, q):
        (e1, s, L1), (e2, t, L2) = p, q
        best = min(s + float(d[e1.origin][x]) + dx for x, dx in ((e2.origin, t), (e2.terminus, L2 - t)))
        best = min(best, min(L1 - s + float(d[e1.terminus][x]) + dx
                             for x, dx in ((e2.origin, t), (e2.terminus, L2 - t))))
        if e1 is e2:
            best = min(best, abs(s - t))
        return best

    return max(dist(p, q) for p, q in itertools.product(pts, repeat=2))


@pytest.mark.parametrize("g", [cycle_graph([1, 2, 3]), cycle_graph([1, 1]),
                               MetricGraph.from_edges([("a", "b", 1), ("b", "c", 2), ("c", "a", 2), ("c", "d", 1)]),
                               MetricGraph.from_edges([("a", "a", 2), ("a", "b", 1)])])
def test_diameter_against_sampling(g):
    # lengths are integers and 24 divides every breakpoint denominator here
    assert float(diameter(g)) == pytest.approx(_sampled_diameter(g), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2**32 - 1))
def test_tree_diameter_is_longest_leaf_path(n, seed):
    import networkx as nx

    g = random_tree(n, seed=seed)
    d = dict(nx.all_pairs_dijkstra_path_length(g.to_networkx(), weight="length"))
    assert float(diameter(g)) == pytest.approx(max(float(x) for r in d.values() for x in r.values()))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 14), st.integers(0, 2**32 - 1), st.booleans())
def test_random_tree_is_tree(n, seed, sqrt2):
    g = random_tree(n, LengthModel(with_sqrt2=sqrt2), seed)
    assert is_tree(g)
    assert len(g.edges) == n - 1
    assert all(l.sign() > 0 for l in g.lengths)


def test_random_tree_deterministic():
    a = random_tree(10, LengthModel(with_sqrt2=True), 42)
    b = random_tree(10, LengthModel(with_sqrt2=True), 42)
    assert a == b


def test_attach_pendant():
    host = path_graph([1, 1])
    ext = attach_pendant(host, "v2", path_graph([1, 2]), "v0")
    assert is_tree(ext)
    assert total_length(ext) == 5
    assert ext.degree("v2") == 2
    assert set(host.vertices) <= set(ext.vertices)
    with pytest.raises(KeyError):
        attach_pendant(host, "nope", path_graph([1]), "v0")


def test_subdivide():
    g = subdivide(path_graph([3]), 0, 1)
    assert [str(l) for l in g.lengths] == ["1", "2"]
    with pytest.raises(ValueError):
        subdivide(path_graph([3]), 0, 3)
    s = subdivide_loops(loop_graph(2))
    assert len(s.edges) == 2 and not any(e.is_loop for e in s.edges)


def test_spectrum_validation():
    with pytest.raises(ValueError):
        Spectrum((1.0, 0.5), "secular")
    with pytest.raises(ValueError):
        Spectrum((0.0,), "guess")
    sp = Spectrum((0.0, 1.0, 1.0), "secular")
    assert sp.nth(2) == 1.0
    assert sp.grouped() == [(0.0, 1), (1.0, 2)]


def test_json_roundtrip():
    g = star_graph([Fraction(1, 3), 1, QSqrt2(1, Fraction(1, 2))])
    assert loads(dumps(g)) == g


@pytest.mark.parametrize("text", [
    "not json",
    '{"vertices": ["a", "b"], "edges": [{"from": "a", "to": "b", "length": {"rat": [1, 0]}}]}',
    '{"vertices": ["a", "b"], "edges": [{"from": "a", "to": "b", "length": {"rat": [-1, 1]}}]}',
    '{"vertices": ["a", "b"], "edges": [{"from": "a", "to": "b", "length": 1.5}]}',
    '{"vertices": ["a", "b"], "edges": [{"from": "a", "to": "c", "length": {"rat": [1, 1]}}]}',
    '{"vertices": ["a", "b", "c"], "edges": [{"from": "a", "to": "b", "length": {"rat": [1, 1]}}]}',
])
def test_parse_errors(text):
    with pytest.raises((GraphFormatError, InvalidGraphError)):
        loads(text)
