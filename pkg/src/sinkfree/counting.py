"""Approximate counting of sink-free orientations by telescoping.

|Omega_V| = 2^m * prod_i mu_{V_{i-1}}(v_i not a sink), and each factor is
estimated with the truncated vertex sampler: exactly, by evaluating its coin
tree (deterministic counter), or by averaging samples (randomized counter).
"""

from __future__ import annotations

import math
import statistics
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import Graph, GraphError, require_min_degree
from .local import BudgetExceeded, truncation_threshold, vertex_tree_value
from .table import TAG_FPRAS, derive_seed

DET_BUDGET = 10**7


@dataclass
class CountEstimate:
    method: str
    n: int
    m: int
    eps: float | None
    log2_value: float
    exact_value: Fraction | None = None
    factors: list = field(default_factory=list)
    seed: int | None = None
    budget_hit: bool = False
    info: dict = field(default_factory=dict)

    @property
    def value(self) -> float:
        return 2.0 ** self.log2_value if self.log2_value != -math.inf else 0.0

    def _count_field(self):
        x = self.exact_value
        if x is not None and x.denominator == 1:
            return str(x.numerator)
        return self.value

    def to_json(self) -> dict:
        out = {
            "method": self.method,
            "n": self.n,
            "m": self.m,
            "eps": self.eps,
            "log2_count": self.log2_value,
            "count": self._count_field(),
            "factors": [float(f) for f in self.factors],
            "seed": self.seed,
            "budget_hit": self.budget_hit,
        }
        out.update(self.info)
        return out


def log2_fraction(x: Fraction) -> float:
    if x <= 0:
        return -math.inf if x == 0 else math.nan
    return math.log2(x.numerator) - math.log2(x.denominator)


def _check_eps(eps):
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")


def _check_degree(G: Graph):
    require_min_degree(G, 3)


def telescoping_order(G: Graph, override=None) -> list[int]:
    """Vertex order for the telescoping product: input order unless overridden."""
    if override is None:
        return list(range(G.n))
    order = [int(u) for u in override]
    if sorted(order) != list(range(G.n)):
        raise GraphError(f"order must be a permutation of 0..{G.n - 1}")
    return order


def det_depth(n: int, eps: float) -> int:
    """ceil(72 ln(292 n / eps)): coin depth for each factor of the deterministic counter."""
    return truncation_threshold(eps / (4 * n))


def count_deterministic(G: Graph, eps: float, order=None, budget: int = DET_BUDGET,
                        force: bool = False) -> CountEstimate:
    """Deterministic (1 +- eps)-approximation of |Omega_V|.

    Each factor is the exact expectation of the truncated vertex sampler. If
    a factor needs more than ``budget`` state expansions this raises
    BudgetExceeded, unless ``force`` is set, in which case the factor is taken
    at the deepest truncation that fits and ``budget_hit`` is reported.
    """
    _check_eps(eps)
    _check_degree(G)
    order = telescoping_order(G, order)
    T = det_depth(G.n, eps)
    value = Fraction(1 << G.m)
    factors, masses, depths = [], [], []
    hit = False
    for i, v in enumerate(order):
        tv = vertex_tree_value(G, order[:i], v, T, budget=budget,
                               on_budget="truncate" if force else "raise")
        if tv.depth < T and tv.truncated_mass > 0:
            hit = True
        factors.append(tv.value)
        masses.append(tv.truncated_mass)
        depths.append(tv.depth)
        value *= tv.value
    return CountEstimate(
        "det", G.n, G.m, eps, log2_fraction(value), value, factors, None, hit,
        {"depth": T, "truncated_mass": [float(x) for x in masses], "depths": depths},
    )


def fpras_depth(n: int, eps: float) -> int:
    """ceil(72 ln(73 * 12 n / eps)): coin budget per sample in the randomized counter."""
    return truncation_threshold(eps / (12 * n))


def fpras_replicas(eps: float) -> int:
    """N = ceil(36 * 54 / eps^2), computed on the decimal value of eps."""
    e = Fraction(repr(float(eps)))
    return math.ceil(Fraction(36 * 54) / (e * e))


def count_fpras(G: Graph, eps: float, seed: int, order=None, inner: int | None = None,
                replicas: int | None = None) -> CountEstimate:
    """Randomized eps-approximation of |Omega_V|, correct with probability >= 3/4.

    Replica r estimates each factor i by the mean of ``inner`` (default n)
    truncated vertex samples and multiplies the factors; the result is 2^m
    times the mean over N replicas, kept as an exact rational.
    """
    from .kernels import fpras_counts

    _check_eps(eps)
    _check_degree(G)
    order = telescoping_order(G, order)
    n = G.n
    inner = n if inner is None else int(inner)
    N = fpras_replicas(eps) if replicas is None else int(replicas)
    if inner < 1 or N < 1:
        raise ValueError("inner and replicas must be positive")
    T = fpras_depth(n, eps)
    counts = fpras_counts(G, order, derive_seed(seed, TAG_FPRAS), N, inner, T)
    total = 0
    for row in counts.tolist():
        p = 1
        for k in row:
            p *= k
        total += p
    value = Fraction(total * (1 << G.m), N * inner ** n)
    if value == 0:
        warnings.warn("every replica hit a zero factor; the estimate is 0", RuntimeWarning)
    means = (counts.sum(axis=0) / (N * inner)).tolist()
    return CountEstimate(
        "fpras", n, G.m, eps, log2_fraction(value), None, means, seed, False,
        {"depth": T, "replicas": N, "inner": inner, "rational": str(value)},
    )


def fpras_replica_products(G: Graph, eps: float, seed: int, replicas: int, order=None):
    """Per-replica products of factor estimates (for variance checks), as floats."""
    from .kernels import fpras_counts

    _check_eps(eps)
    order = telescoping_order(G, order)
    counts = fpras_counts(G, order, derive_seed(seed, TAG_FPRAS), replicas, G.n,
                          fpras_depth(G.n, eps))
    return (counts / G.n).prod(axis=1)


def count_fpras_median(G: Graph, eps: float, seed: int, trials: int, **kw) -> CountEstimate:
    """Median of ``trials`` independent runs of count_fpras."""
    if trials < 1:
        raise ValueError("trials must be positive")
    runs = [count_fpras(G, eps, derive_seed(seed, TAG_FPRAS, 1 << 20, t), **kw) for t in range(trials)]
    runs.sort(key=lambda r: r.log2_value)
    med = runs[(trials - 1) // 2] if trials % 2 else None
    log2v = med.log2_value if med else math.log2(statistics.median(r.value for r in runs))
    out = CountEstimate("fpras", G.n, G.m, eps, log2v, None, med.factors if med else [], seed)
    out.info = {"trials": trials, "trial_log2": [r.log2_value for r in runs]}
    return out


def count_oracle(G: Graph) -> CountEstimate:
    from .oracle import count_sfo_bruteforce

    c = count_sfo_bruteforce(G, range(G.n))
    return CountEstimate("oracle", G.n, G.m, None, log2_fraction(Fraction(c)), Fraction(c))


__all__ = [
    "BudgetExceeded", "CountEstimate", "count_deterministic", "count_fpras",
    "count_fpras_median", "count_oracle", "det_depth", "fpras_depth",
    "fpras_replica_products", "fpras_replicas", "telescoping_order",
]
