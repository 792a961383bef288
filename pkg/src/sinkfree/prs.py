"""Sink popping: partial rejection sampling for S-sink-free orientations."""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graph import Graph, GraphError, Orientation, omega_empty, vertex_set
from .table import TAG_PROFILE, ResamplingTable, derive_seed


class EmptySupportError(GraphError):
    """No orientation satisfies the sink constraints."""


@dataclass
class RunStats:
    resample_events: int = 0
    bits_consumed: int = 0


def _require_support(G: Graph, S) -> None:
    if omega_empty(G, S):
        raise EmptySupportError("no S-sink-free orientation exists (a component inside S is a tree)")


def prs_sample(G: Graph, S: Iterable[int], table: ResamplingTable, rule: str = "lowest"):
    """Draw from the uniform distribution on S-sink-free orientations.

    Every edge takes its next table entry; then, while some vertex of S is a
    sink, one such sink is picked by ``rule`` ("lowest" or "highest" id) and
    each incident edge, in edge-id order, takes its next table entry. For a
    fixed table the output does not depend on ``rule``.
    """
    S = vertex_set(G, S)
    _require_support(G, S)
    if rule not in ("lowest", "highest"):
        raise ValueError(f"unknown sink rule {rule!r}")
    start = table.bits_consumed
    head = [b if table.draw(e) else a for e, (a, b) in enumerate(G.edges)]
    events = pop_sinks(G, S, head, table, rule)
    stats = RunStats(events, table.bits_consumed - start)
    return Orientation(tuple(head)), stats


def pop_sinks(G: Graph, S, head: list, table: ResamplingTable, rule: str = "lowest") -> int:
    """Resample sinks in S (in place on ``head``) until none is left; returns the pop count."""
    outdeg = [0] * G.n
    for e, (a, b) in enumerate(G.edges):
        outdeg[b if head[e] == a else a] += 1
    bad = {u for u in S if outdeg[u] == 0}
    events = 0
    pick = min if rule == "lowest" else max
    while bad:
        u = pick(bad)
        events += 1
        for e, _ in G.adj[u]:
            a, b = G.edges[e]
            old_tail = b if head[e] == a else a
            head[e] = b if table.draw(e) else a
            new_tail = b if head[e] == a else a
            if new_tail != old_tail:
                outdeg[old_tail] -= 1
                outdeg[new_tail] += 1
                if outdeg[old_tail] == 0 and old_tail in S:
                    bad.add(old_tail)
                bad.discard(new_tail)
    return events


def pop_count_profile(G: Graph, S: Iterable[int], trials: int, seed: int) -> dict:
    """Summary of resample events over ``trials`` independent tables."""
    from .kernels import prs_batch

    S = vertex_set(G, S)
    _require_support(G, S)
    if trials < 1:
        raise ValueError("trials must be positive")
    _, events = prs_batch(G, S, derive_seed(seed, TAG_PROFILE), trials)
    ev = events.astype(float)
    return {
        "trials": trials,
        "seed": seed,
        "mean": float(ev.mean()),
        "std": float(ev.std(ddof=1)) if trials > 1 else 0.0,
        "min": int(events.min()),
        "median": float(statistics.median(events.tolist())),
        "max": int(events.max()),
        "zero_fraction": float(np.mean(events == 0)),
    }
