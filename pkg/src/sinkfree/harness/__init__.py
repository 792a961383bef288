"""Statistical checks, workload generators and timing for the samplers."""

from .audit import MalformedTrace, audit_trace, check_bookkeeping, synthetic_trace
from .bench import BenchReport, BenchRow, bench_fast, fit_slope
from .generators import (canonical_form, min3_multigraphs, multigraphs, random_multigraph,
                         random_regular_graph)
from .stats import EmpiricalDistribution, GofResult, chi_square_gof, tv_distance

__all__ = [
    "BenchReport", "BenchRow", "EmpiricalDistribution", "GofResult", "MalformedTrace",
    "audit_trace", "bench_fast", "canonical_form", "check_bookkeeping", "chi_square_gof",
    "fit_slope", "min3_multigraphs", "multigraphs", "random_multigraph", "random_regular_graph",
    "synthetic_trace", "tv_distance",
]
