"""Approximate uniform sink-free orientations by sequential edge conditioning.

Edges are fixed one at a time with the truncated edge sampler run on the
residual graph: removed edges are gone, and a vertex stays constrained (in
S_live) until it has received an out-edge. Sampling stays at one focus vertex
until the focus gets an out-edge or has one live edge left, which is then
forced outward. The next focus is the head of the last committed edge when
that vertex is still constrained, else the lowest constrained vertex. Once
nothing is constrained the remaining edges are fair coins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, Orientation, require_min_degree
from .local import EdgeWalk, TruncationPolicy, _run
from .table import TAG_FAST, ResamplingTable, derive_seed

DEFAULT_C = 288.0


class InvariantError(RuntimeError):
    """The focus schedule broke its degree-2 invariant."""


def edge_budget(m: int, eps: float, C: float = DEFAULT_C) -> int:
    """ceil(C ln(m/eps)) coin steps per truncated edge sample."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if m < 1:
        raise ValueError("graph has no edges")
    return max(1, math.ceil(C * math.log(m / eps) - 1e-9))


def _check(G: Graph, eps: float):
    require_min_degree(G, 3)
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")


@dataclass
class ResidualState:
    live: set
    S_live: set
    resdeg: list
    head: list
    focus: int | None = None
    deg2: set = field(default_factory=set)  # members of S_live with residual degree 2

    @classmethod
    def start(cls, G: Graph) -> "ResidualState":
        deg = list(G.degrees)
        return cls(set(range(G.m)), set(range(G.n)), deg, [None] * G.m,
                   deg2={u for u in range(G.n) if deg[u] == 2})

    def d2_ok(self, edge_ends) -> bool:
        return len(self.deg2) == 0 or (len(self.deg2) == 1 and next(iter(self.deg2)) in edge_ends)

    def commit(self, G: Graph, e: int, h: int) -> int:
        """Orient e towards h, remove it, and drop its tail from S_live; returns the tail."""
        t = G.other(e, h)
        self.head[e] = h
        self.live.discard(e)
        for x in G.edges[e]:
            self.resdeg[x] -= 1
            if x in self.S_live and self.resdeg[x] == 2:
                self.deg2.add(x)
            else:
                self.deg2.discard(x)
        self.S_live.discard(t)
        self.deg2.discard(t)
        return t


@dataclass
class FocusEvent:
    focus: int
    edge: int
    tail: int
    head: int
    forced: bool
    truncated: bool = False
    coin_steps: int = 0


def _fast_reference(G: Graph, table: ResamplingTable, budget: int | None, log: list | None):
    """Pure-Python run; mirrors the compiled kernel bit for bit. Returns (heads, stats)."""
    st = ResidualState.start(G)
    stats = {"d2_violations": 0, "truncations": 0, "edge_samples": 0, "forced": 0, "coin_steps": 0}
    policy = TruncationPolicy(budget)
    last_head = None
    while st.S_live:
        if last_head is not None and last_head in st.S_live:
            focus = last_head
        else:
            focus = min(st.S_live)
        st.focus = focus
        while True:
            if st.resdeg[focus] == 0:
                stats["d2_violations"] += 1
                st.S_live.discard(focus)
                st.deg2.discard(focus)
                last_head = None
                break
            e = next(f for f, _ in G.adj[focus] if f in st.live)
            if st.resdeg[focus] == 1:
                h = G.other(e, focus)
                forced, cut, steps = True, False, 0
                stats["forced"] += 1
            else:
                if not st.d2_ok(G.edges[e]):
                    stats["d2_violations"] += 1
                walk = EdgeWalk(G, frozenset(st.S_live), e, live=st.live)
                h, ps, cut = _run(G, walk, table, policy)
                forced, steps = False, ps.coin_steps
                stats["edge_samples"] += 1
                stats["coin_steps"] += steps
                stats["truncations"] += int(cut)
            t = st.commit(G, e, h)
            if log is not None:
                log.append(FocusEvent(focus, e, t, h, forced, cut, steps))
            if t == focus:
                last_head = h
                break
    for e in sorted(st.live):
        a, b = G.edges[e]
        st.head[e] = b if table.draw(e) else a
    return st.head, stats


def _table_seed(seed: int) -> int:
    return derive_seed(seed, TAG_FAST)


def sample_sfo_fast(G: Graph, eps: float, seed: int, C: float = DEFAULT_C,
                    backend: str = "numba", return_stats: bool = False):
    """Orientation whose law is within eps (total variation) of uniform on sink-free orientations."""
    _check(G, eps)
    budget = edge_budget(G.m, eps, C)
    if backend == "python":
        heads, stats = _fast_reference(G, ResamplingTable(_table_seed(seed)), budget, None)
    elif backend == "numba":
        from .kernels import fast_single

        out, arr = fast_single(G, _table_seed(seed), budget)
        heads = out.tolist()
        stats = dict(zip(("d2_violations", "truncations", "edge_samples", "forced", "coin_steps"),
                         (int(x) for x in arr)))
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if stats["d2_violations"]:
        raise InvariantError(f"degree-2 invariant violated {stats['d2_violations']} time(s)")
    sigma = Orientation(tuple(heads))
    return (sigma, stats) if return_stats else sigma


def sample_sfo_exact_sequential(G: Graph, seed: int) -> Orientation:
    """The same schedule with untruncated edge samples (exact, Python only)."""
    require_min_degree(G, 3)
    heads, stats = _fast_reference(G, ResamplingTable(_table_seed(seed)), None, None)
    if stats["d2_violations"]:
        raise InvariantError("degree-2 invariant violated")
    return Orientation(tuple(heads))


def focus_schedule_trace(G: Graph, eps: float, seed: int, C: float = DEFAULT_C):
    """Event log of one run: (focus, edge, tail, head, forced, truncated, coin steps) per commit."""
    _check(G, eps)
    log: list[FocusEvent] = []
    heads, stats = _fast_reference(G, ResamplingTable(_table_seed(seed)), edge_budget(G.m, eps, C), log)
    if stats["d2_violations"]:
        raise InvariantError("degree-2 invariant violated")
    return log


def fast_batch_codes(G: Graph, eps: float, seed: int, count: int, C: float = DEFAULT_C):
    """``count`` draws as orientation codes (m <= 62); draw r matches sample_sfo_fast with
    table seed derive_seed(seed, TAG_FAST, r). Returns (codes, stats dict)."""
    from .kernels import fast_batch

    _check(G, eps)
    codes, arr = fast_batch(G, _table_seed(seed), count, edge_budget(G.m, eps, C))
    stats = dict(zip(("d2_violations", "truncations", "edge_samples", "forced", "coin_steps"),
                     (int(x) for x in arr)))
    return np.asarray(codes), stats


__all__ = [
    "DEFAULT_C", "FocusEvent", "InvariantError", "ResidualState", "edge_budget",
    "fast_batch_codes", "focus_schedule_trace", "sample_sfo_exact_sequential", "sample_sfo_fast",
]
