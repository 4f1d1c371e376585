"""Variational eigenvalue oracle: conforming P1 finite elements on a metric graph.

Vertices are shared degrees of freedom, so discrete functions are
continuous and the Kirchhoff condition holds in the natural (weak) sense.
The discrete space is a subspace of H^1(G); by min-max every discrete
eigenvalue is an upper bound for the exact one with error O(h^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from .closed_form import dirichlet_spectrum
from .graph import MetricGraph, Spectrum, check_valid

DEFAULT_RESOLUTION = 32


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class DiscreteEigenproblem:
    stiffness: np.ndarray
    mass: np.ndarray
    # per edge: global indices of its nodes from origin to terminus
    dof_map: tuple[np.ndarray, ...]
    elements: tuple[int, ...]
    mesh_sizes: tuple[float, ...]

    @property
    def dimension(self) -> int:
        return self.stiffness.shape[0]

    @property
    def h_max(self) -> float:
        return max(self.mesh_sizes)


def default_elements(graph: MetricGraph, mu_max: float, resolution: int = DEFAULT_RESOLUTION) -> list[int]:
    """max(8, ceil(resolution * L(e) * sqrt(mu_max) / pi)) elements per edge."""
    root = math.sqrt(max(mu_max, 0.0))
    return [max(8, math.ceil(resolution * L * root / math.pi)) for L in graph.float_lengths()]


def assemble(graph: MetricGraph, elements_per_edge: int | Sequence[int]) -> DiscreteEigenproblem:
    check_valid(graph)
    m = len(graph.edges)
    if isinstance(elements_per_edge, int):
        counts = [elements_per_edge] * m
    else:
        counts = [int(c) for c in elements_per_edge]
        if len(counts) != m:
            raise ValueError("need one element count per edge")
    if any(c < 1 for c in counts):
        raise ValueError("elements_per_edge must be >= 1")

    index = {v: i for i, v in enumerate(graph.vertices)}
    nxt = len(index)
    dofs = []
    for e, c in zip(graph.edges, counts):
        inner = np.arange(nxt, nxt + c - 1)
        nxt += c - 1
        dofs.append(np.concatenate(([index[e.origin]], inner, [index[e.terminus]])))
    n = nxt
    K = np.zeros((n, n))
    M = np.zeros((n, n))
    kloc = np.array([[1.0, -1.0], [-1.0, 1.0]])
    mloc = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
    sizes = []
    for nodes, c, L in zip(dofs, counts, graph.float_lengths()):
        h = L / c
        sizes.append(h)
        ends = (nodes[:-1], nodes[1:])
        for i in range(2):
            for j in range(2):
                np.add.at(K, (ends[i], ends[j]), kloc[i, j] / h)
                np.add.at(M, (ends[i], ends[j]), mloc[i, j] * h)
    return DiscreteEigenproblem(K, M, tuple(dofs), tuple(counts), tuple(sizes))


def _solve(problem: DiscreteEigenproblem, **subset) -> np.ndarray:
    try:
        vals = linalg.eigh(problem.stiffness, problem.mass, eigvals_only=True, **subset)
    except linalg.LinAlgError as err:
        raise OracleError(f"generalized eigensolver failed: {err}") from None
    # the constant vector is an exact kernel vector; clean its rounding
    scale = max(1.0, float(np.abs(vals).max(initial=0.0)))
    vals = np.where(np.abs(vals) < 1e-11 * scale, 0.0, vals)
    return np.sort(vals)


def eigenvalues_oracle(graph: MetricGraph, count: int,
                       elements_per_edge: int | Sequence[int] | None = None,
                       resolution: int = DEFAULT_RESOLUTION) -> Spectrum:
    """Smallest ``count`` discrete eigenvalues (upper bounds for the exact ones)."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    if elements_per_edge is None:
        mu_max = dirichlet_spectrum(graph, max(count, 1)).values[-1]
        elements_per_edge = default_elements(graph, mu_max, resolution)
    problem = assemble(graph, elements_per_edge)
    if count > problem.dimension:
        raise ValueError(f"count {count} exceeds discrete dimension {problem.dimension}")
    if count == 0:
        return Spectrum((), "variational-oracle")
    vals = _solve(problem, subset_by_index=[0, count - 1])
    return Spectrum(tuple(vals), "variational-oracle",
                    diagnostics={"elements": problem.elements, "h_max": problem.h_max})


def error_band(lam_h: float, h_max: float) -> float:
    """Width of the interval [lam_h - band, lam_h] that holds the exact value.

    Twice the leading P1 error term lam^2 h^2 / 12.
    """
    return lam_h * lam_h * h_max * h_max / 6.0


@dataclass(frozen=True)
class OracleCount:
    count: int
    certified: bool
    elements: tuple[int, ...]


def _discrete_count(problem: DiscreteEigenproblem, mu: float):
    vals = _solve(problem, subset_by_value=(-1.0, mu))
    return len(vals)


def _uncertain_near(problem: DiscreteEigenproblem, mu: float) -> bool:
    """Some discrete eigenvalue above mu might belong to an exact one below it."""
    h = problem.h_max
    # lam_h - band(lam_h) is increasing for the relevant range; a generous window
    upper = mu * 2.0 + 1.0
    vals = _solve(problem, subset_by_value=(mu, upper))
    return bool(np.any(vals - np.array([error_band(v, h) for v in vals]) <= mu))


def count_oracle(graph: MetricGraph, mu: float,
                 elements_per_edge: int | Sequence[int] | None = None,
                 resolution: int = DEFAULT_RESOLUTION,
                 max_refinements: int = 5) -> OracleCount:
    """N([0, mu]) from discrete eigenvalues.

    Certified once two successive uniform refinements agree and no discrete
    eigenvalue just above mu could come from an exact eigenvalue at or below
    it.  Otherwise the finest count is returned uncertified.
    """
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    if elements_per_edge is None:
        counts = default_elements(graph, mu, resolution)
    elif isinstance(elements_per_edge, int):
        counts = [elements_per_edge] * len(graph.edges)
    else:
        counts = list(elements_per_edge)
    previous = None
    for _ in range(max_refinements + 1):
        problem = assemble(graph, counts)
        current = _discrete_count(problem, mu)
        if previous == current and not _uncertain_near(problem, mu):
            return OracleCount(current, True, tuple(counts))
        previous = current
        counts = [2 * c for c in counts]
    return OracleCount(previous, False, tuple(c // 2 for c in counts))
