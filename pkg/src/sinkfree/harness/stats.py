"""Distances and goodness-of-fit for sampler output."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from scipy.stats import chi2


@dataclass
class EmpiricalDistribution:
    """Counts keyed by canonical orientation code (or any hashable outcome)."""

    counts: Counter = field(default_factory=Counter)
    total: int = 0

    @classmethod
    def from_samples(cls, samples: Iterable) -> "EmpiricalDistribution":
        c = Counter(int(x) if hasattr(x, "__index__") else x for x in samples)
        return cls(c, sum(c.values()))

    def add(self, x, k: int = 1):
        self.counts[x] += k
        self.total += k

    def freq(self, x) -> float:
        return self.counts.get(x, 0) / self.total


def _check_exact(exact: Mapping):
    s = sum(exact.values())
    if any(p < 0 for p in exact.values()) or abs(float(s) - 1.0) > 1e-9:
        raise ValueError("exact must be a probability distribution")


def tv_distance(emp: EmpiricalDistribution, exact: Mapping) -> float:
    """Half the L1 distance between empirical frequencies and ``exact``."""
    if emp.total == 0:
        raise ValueError("empirical distribution is empty")
    _check_exact(exact)
    keys = set(emp.counts) | set(exact)
    # exact Fractions stay exact until the final division
    num = sum(abs(Fraction(emp.counts.get(k, 0)) - Fraction(exact.get(k, 0)) * emp.total) for k in keys)
    return float(num / (2 * emp.total))


@dataclass
class GofResult:
    statistic: float
    dof: int
    p_value: float
    outside_support: int


def chi_square_gof(emp: EmpiricalDistribution, exact: Mapping, min_expected: float = 5.0) -> GofResult:
    """Pearson chi-square test of ``emp`` against ``exact``; mass outside the support gives p = 0."""
    if emp.total == 0:
        raise ValueError("empirical distribution is empty")
    _check_exact(exact)
    if any(p <= 0 for p in exact.values()):
        raise ValueError("every exact cell needs positive probability")
    expected = {k: float(p) * emp.total for k, p in exact.items()}
    if min(expected.values()) < min_expected:
        raise ValueError(f"expected count below {min_expected} in some cell; draw more samples")
    outside = sum(c for k, c in emp.counts.items() if k not in exact)
    stat = sum((emp.counts.get(k, 0) - e) ** 2 / e for k, e in expected.items())
    dof = len(exact) - 1
    if outside:
        return GofResult(float("inf"), dof, 0.0, outside)
    p = float(chi2.sf(stat, dof)) if dof > 0 else 1.0
    return GofResult(stat, dof, p, 0)
