"""Spectra of the standard Laplacian on metric graphs and eigenvalue bounds for trees."""
from .exact import QSqrt2, SQRT2
from .graph import (Edge, InvalidGraphError, MetricGraph, Spectrum, attach_pendant, cycle_graph,
                    diameter, is_equilateral_star, is_tree, loop_graph, path_graph, random_tree,
                    star_graph, total_length, validate)
from .graphio import load_graph, save_graph
from .secular import eigenvalues, count_up_to, solve_interessant
from .oracle import eigenvalues_oracle, count_oracle
from .bounds import check_all, monotonicity_check, gd_equality_index

__version__ = "0.1.0"
