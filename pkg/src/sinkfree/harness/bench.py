"""Timing harness for the fast sampler."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..fastsampler import edge_budget
from ..kernels import Workspace, fast_single
from ..table import TAG_FAST, derive_seed
from .generators import random_regular_graph


@dataclass
class BenchRow:
    n: int
    m: int
    eps: float
    seconds: float       # mean wall time per draw
    draws: int
    coin_steps: float    # mean per draw
    edge_samples: float  # mean per draw


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    slope: float = math.nan
    total_seconds: float = 0.0
    envelope: float = math.nan  # max / min of seconds per unit of m log(m/eps)

    def rows_dict(self):
        return [r.__dict__ for r in self.rows]

    def csv(self, suite: str = "scaling") -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["suite", "n", "m", "eps", "seconds", "result"])
        for r in self.rows:
            w.writerow([suite, r.n, r.m, r.eps, f"{r.seconds:.6g}", f"coins={r.coin_steps:.1f}"])
        return buf.getvalue()


def fit_slope(xs, ys) -> float:
    """Least-squares slope of log y against log x."""
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    return float(np.polyfit(lx, ly, 1)[0])


def bench_fast(sizes, eps: float, seed: int, d: int = 3, min_seconds: float = 1.0) -> BenchReport:
    """Time fast-sampler draws on random d-regular graphs; sizes must increase."""
    sizes = list(sizes)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    rep = BenchReport()
    t_all = time.perf_counter()
    # compile outside the timed region
    warm = random_regular_graph(4, 3, seed)
    fast_single(warm, 0, edge_budget(warm.m, eps))
    for n in sizes:
        G = random_regular_graph(n, d, seed)
        _ = G.csr
        ws = Workspace(G)
        budget = edge_budget(G.m, eps)
        draws, spent, coins, samples = 0, 0.0, 0, 0
        while spent < min_seconds or draws < 3:
            t = time.perf_counter()
            _, st = fast_single(G, derive_seed(seed, TAG_FAST, n, draws), budget, ws)
            spent += time.perf_counter() - t
            draws += 1
            coins += int(st[4])
            samples += int(st[2])
        rep.rows.append(BenchRow(n, G.m, eps, spent / draws, draws, coins / draws, samples / draws))
    rep.total_seconds = time.perf_counter() - t_all
    work = [r.m * math.log(r.m / eps) for r in rep.rows]
    rep.slope = fit_slope(work, [r.seconds for r in rep.rows]) if len(rep.rows) > 1 else math.nan
    per = [r.seconds / w for r, w in zip(rep.rows, work)]
    rep.envelope = max(per) / min(per)
    return rep
