import itertools
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from sinkfree.graph import (Graph, complete_bipartite, complete_graph, cycle_graph, hypercube,
                            wheel_graph)

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def naive_orientations(G):
    """Every orientation as a head tuple, by plain itertools (no bit tricks)."""
    for choice in itertools.product((0, 1), repeat=G.m):
        yield tuple(G.edges[e][c] for e, c in enumerate(choice))


def naive_sinks(G, heads):
    out = set()
    for u in range(G.n):
        if all(heads[e] == u for e, _ in G.adj[u]):
            out.add(u)
    return out


def naive_count(G, S):
    S = set(S)
    return sum(1 for h in naive_orientations(G) if not (naive_sinks(G, h) & S))


def naive_marginal(G, S, v):
    return Fraction(naive_count(G, set(S) | {v}), naive_count(G, S))


K4 = complete_graph(4)
C3 = cycle_graph(3)
Q3 = hypercube(3)
K33 = complete_bipartite(3, 3)
W4 = wheel_graph(4)


@pytest.fixture(scope="session")
def small_graphs():
    return {
        "K4": K4, "K33": K33, "Q3": Q3, "W4": W4, "K5": complete_graph(5),
        "multi": Graph.from_edges(3, [(0, 1), (0, 1), (1, 2), (1, 2), (0, 2), (0, 2)]),
    }
