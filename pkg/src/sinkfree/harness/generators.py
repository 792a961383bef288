"""Graph workloads: configuration-model regular graphs and small multigraph families."""

from __future__ import annotations

from itertools import combinations, combinations_with_replacement

import numpy as np

from ..graph import Graph, GraphError, components
from ..table import TAG_GRAPH, derive_seed

MAX_PAIRING_TRIES = 1000


def _rng(seed, *parts):
    return np.random.default_rng(derive_seed(seed, TAG_GRAPH, *parts))


def random_regular_graph(n: int, d: int, seed: int) -> Graph:
    """d-regular multigraph from a uniform pairing of half-edges.

    Pairings containing a self-loop are redrawn in full; parallel edges stay.
    """
    if n < 1 or d < 1:
        raise GraphError("need n >= 1 and d >= 1")
    if (n * d) % 2:
        raise GraphError(f"n*d = {n * d} is odd")
    if d >= n and n < 3:
        raise GraphError("no loop-free pairing exists")
    rng = _rng(seed, n, d)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(MAX_PAIRING_TRIES):
        perm = rng.permutation(stubs)
        a, b = perm[0::2], perm[1::2]
        if not np.any(a == b):
            return Graph.from_edges(n, zip(a.tolist(), b.tolist()))
    raise GraphError("could not draw a loop-free pairing")


def random_multigraph(n: int, m: int, rng: np.random.Generator, min_deg: int = 3,
                      connected: bool = True, tries: int = 10000) -> Graph:
    """Uniform loop-free multigraph on n vertices with m edges, redrawn until the
    degree (and optionally connectivity) condition holds."""
    if n < 2:
        raise GraphError("need at least two vertices")
    pairs = list(combinations(range(n), 2))
    for _ in range(tries):
        idx = rng.integers(0, len(pairs), size=m)
        G = Graph.from_edges(n, [pairs[i] for i in sorted(idx.tolist())])
        if min(G.degrees) >= min_deg and (not connected or len(components(G)) == 1):
            return G
    raise GraphError(f"no multigraph with n={n}, m={m}, min degree {min_deg} found")


def multigraphs(n: int, m_max: int, m_min: int = 0, simple: bool = False):
    """Every loop-free multigraph on n labelled vertices with m_min..m_max edges,
    edges listed in sorted order (so each edge multiset appears once)."""
    pairs = list(combinations(range(n), 2))
    for m in range(m_min, m_max + 1):
        gen = combinations(pairs, m) if simple else combinations_with_replacement(pairs, m)
        for es in gen:
            yield Graph.from_edges(n, es)


def canonical_form(G: Graph):
    """Lexicographically least sorted edge list over all vertex relabellings (small n only)."""
    from itertools import permutations

    best = None
    for perm in permutations(range(G.n)):
        es = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in G.edges))
        if best is None or es < best:
            best = es
    return best


def min3_multigraphs(n: int, m_max: int, connected: bool = True, dedupe: bool = True):
    """Connected multigraphs with minimum degree >= 3, one per isomorphism class when ``dedupe``."""
    seen = set()
    for G in multigraphs(n, m_max, m_min=(3 * n + 1) // 2):
        if min(G.degrees) < 3 or (connected and len(components(G)) != 1):
            continue
        if dedupe:
            key = canonical_form(G)
            if key in seen:
                continue
            seen.add(key)
        yield G
