"""Sampling and approximate counting of sink-free orientations of multigraphs."""

__version__ = "0.1.0"

from .counting import (CountEstimate, count_deterministic, count_fpras, count_fpras_median,
                       count_oracle)
from .fastsampler import InvariantError, sample_sfo_exact_sequential, sample_sfo_fast
from .graph import (Graph, GraphError, GraphFormatError, MinDegreeError, Orientation,
                    complete_bipartite, complete_graph, cycle_graph, hypercube, is_sink,
                    omega_empty, parse_graph, path_graph, read_graph, serialize_graph, wheel_graph)
from .local import (TruncationPolicy, enumerate_vertex_estimator, sample_edge, sample_vertex,
                    truncation_threshold, vertex_tree_value)
from .oracle import count_sfo_bruteforce, marginal_bruteforce, q_poly
from .prs import EmptySupportError, prs_sample
from .table import DEFAULT_SEED, ResamplingTable

__all__ = [
    "CountEstimate", "DEFAULT_SEED", "EmptySupportError", "Graph", "GraphError",
    "GraphFormatError", "InvariantError", "MinDegreeError", "Orientation", "ResamplingTable",
    "TruncationPolicy", "complete_bipartite", "complete_graph", "count_deterministic",
    "count_fpras", "count_fpras_median", "count_oracle", "count_sfo_bruteforce", "cycle_graph",
    "enumerate_vertex_estimator", "hypercube", "is_sink", "marginal_bruteforce", "omega_empty",
    "parse_graph", "path_graph", "prs_sample", "q_poly", "read_graph", "sample_edge",
    "sample_sfo_exact_sequential", "sample_sfo_fast", "sample_vertex", "serialize_graph",
    "truncation_threshold", "vertex_tree_value", "wheel_graph", "__version__",
]
