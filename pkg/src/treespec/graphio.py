"""JSON graph files.

    {"vertices": ["c", "a"],
     "edges": [{"from": "c", "to": "a",
                "length": {"rat": [1, 1], "rad2": [0, 1]}}]}

``rat`` is p/q and ``rad2`` is r/s, the length being p/q + (r/s)*sqrt(2).
``rad2`` may be omitted.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .exact import QSqrt2
from .graph import Edge, MetricGraph, check_valid


class GraphFormatError(ValueError):
    pass


def _fraction(pair, what: str) -> Fraction:
    if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in pair)):
        raise GraphFormatError(f"{what} must be a pair of integers, got {pair!r}")
    p, q = pair
    if q <= 0:
        raise GraphFormatError(f"{what} has nonpositive denominator {q}")
    return Fraction(p, q)


def length_from_json(obj) -> QSqrt2:
    if not isinstance(obj, dict) or "rat" not in obj:
        raise GraphFormatError(f"length must be an object with a 'rat' entry, got {obj!r}")
    unknown = set(obj) - {"rat", "rad2"}
    if unknown:
        raise GraphFormatError(f"unknown length keys {sorted(unknown)}")
    value = QSqrt2(_fraction(obj["rat"], "rat"), _fraction(obj.get("rad2", [0, 1]), "rad2"))
    if value.sign() <= 0:
        raise GraphFormatError(f"length {value} is not positive")
    return value


def length_to_json(x: QSqrt2) -> dict:
    out = {"rat": [x.rational_part.numerator, x.rational_part.denominator]}
    if x.rad2_part:
        out["rad2"] = [x.rad2_part.numerator, x.rad2_part.denominator]
    return out


def from_dict(doc) -> MetricGraph:
    if not isinstance(doc, dict):
        raise GraphFormatError("top level must be an object")
    verts = doc.get("vertices")
    edges = doc.get("edges")
    if not isinstance(verts, list) or not all(isinstance(v, str) for v in verts):
        raise GraphFormatError("'vertices' must be a list of strings")
    if not isinstance(edges, list):
        raise GraphFormatError("'edges' must be a list")
    out = []
    for i, e in enumerate(edges):
        if not isinstance(e, dict) or not {"from", "to", "length"} <= set(e):
            raise GraphFormatError(f"edge {i} needs 'from', 'to' and 'length'")
        if not isinstance(e["from"], str) or not isinstance(e["to"], str):
            raise GraphFormatError(f"edge {i} endpoints must be strings")
        try:
            out.append(Edge(e["from"], e["to"], length_from_json(e["length"])))
        except GraphFormatError as err:
            raise GraphFormatError(f"edge {i}: {err}") from None
    return MetricGraph(tuple(verts), tuple(out))


def to_dict(graph: MetricGraph) -> dict:
    return {
        "vertices": list(graph.vertices),
        "edges": [{"from": e.origin, "to": e.terminus, "length": length_to_json(e.length)}
                  for e in graph.edges],
    }


def loads(text: str, validate: bool = True) -> MetricGraph:
    """Parse a graph; with ``validate`` structural problems raise InvalidGraphError."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise GraphFormatError(f"not valid JSON: {err}") from None
    graph = from_dict(doc)
    return check_valid(graph) if validate else graph


def dumps(graph: MetricGraph) -> str:
    return json.dumps(to_dict(graph), indent=2) + "\n"


def load_graph(path) -> MetricGraph:
    return loads(Path(path).read_text())


def save_graph(graph: MetricGraph, path) -> None:
    Path(path).write_text(dumps(graph))
