import itertools
from fractions import Fraction

import numpy as np
import pytest

from conftest import C3, K4, K33, Q3, W4, naive_count, naive_marginal
from sinkfree.graph import Graph, GraphError, Orientation, complete_graph, cycle_graph, path_graph, wheel_graph
from sinkfree.oracle import (CapExceeded, EmptySupport, count_sfo_bruteforce, count_table,
                             distribution_bruteforce, edge_marginal_bruteforce, marginal_bruteforce,
                             orientation_distribution, q_poly, q_poly_direct, sfo_weights,
                             shearer_membership, sink_histogram, telescoping_product, verify_pj_qj)
from sinkfree.harness.generators import min3_multigraphs


# -- counts ------------------------------------------------------------------------

def test_count_examples():
    assert count_sfo_bruteforce(C3, range(3)) == 2
    assert count_sfo_bruteforce(K4, []) == 64
    assert count_sfo_bruteforce(K4, range(4)) == 32


def test_k4_count_by_inclusion_exclusion():
    # sinks in K4 are pairwise exclusive (two sinks would need the edge between
    # them to point both ways), so |Omega_V| = 2^6 - 4 * 2^3
    assert count_sfo_bruteforce(K4, range(4)) == 64 - 4 * 8


@pytest.mark.parametrize("G", [K4, C3, W4, Graph.from_edges(3, [(0, 1), (0, 1), (1, 2)])])
def test_counts_match_naive_enumeration(G):
    for mask in range(1 << G.n):
        S = [u for u in range(G.n) if mask >> u & 1]
        assert count_sfo_bruteforce(G, S) == naive_count(G, S)


def test_count_table_matches_direct_counts():
    table = count_table(W4)
    for mask in range(1 << W4.n):
        S = [u for u in range(W4.n) if mask >> u & 1]
        assert table[mask] == count_sfo_bruteforce(W4, S)


def test_sink_histogram_totals():
    h = sink_histogram(Q3)
    assert h.sum() == 1 << Q3.m
    assert h[0] == count_sfo_bruteforce(Q3, range(Q3.n))


def test_q3_count():
    assert count_sfo_bruteforce(Q3, range(8)) == naive_count(Q3, range(8))


def test_cap_enforced():
    big = complete_graph(8)  # 28 edges
    with pytest.raises(CapExceeded):
        count_sfo_bruteforce(big, range(8))
    assert count_sfo_bruteforce(K4, range(4), cap=6) == 32
    with pytest.raises(CapExceeded):
        count_sfo_bruteforce(K4, range(4), cap=5)


# -- marginals -------------------------------------------------------------------

def test_marginal_examples():
    for v in range(4):
        assert marginal_bruteforce(K4, [], v) == Fraction(7, 8)
        assert marginal_bruteforce(K4, set(range(4)) - {v}, v) == Fraction(4, 5)
    assert marginal_bruteforce(C3, [], 0) == Fraction(3, 4)


def test_marginal_errors():
    with pytest.raises(GraphError):
        marginal_bruteforce(K4, [0, 1], 1)
    # the edge {0, 1} alone cannot give both ends an out-edge
    with pytest.raises(EmptySupport):
        marginal_bruteforce(Graph.from_edges(3, [(0, 1)]), [0, 1], 2)


def test_marginals_match_naive():
    for S in ([], [1], [1, 2], [1, 2, 3], [2, 4]):
        for v in range(W4.n):
            if v not in S:
                assert marginal_bruteforce(W4, S, v) == naive_marginal(W4, S, v)


def test_edge_marginal_examples():
    for e in range(K4.m):
        assert edge_marginal_bruteforce(K4, range(4), e) == Fraction(1, 2)
    for e in range(3):
        assert edge_marginal_bruteforce(C3, range(3), e) == Fraction(1, 2)


def test_edge_marginal_asymmetric_s_matches_naive():
    S = [0, 1]
    for e in range(K4.m):
        a, b = K4.edges[e]
        good = [h for h in itertools.product(*[(x, y) for x, y in K4.edges])
                if not any(all(h[f] == u for f, _ in K4.adj[u]) for u in S)]
        want = Fraction(sum(h[e] == b for h in good), len(good))
        assert edge_marginal_bruteforce(K4, S, e) == want
    # not all edges are balanced once S breaks the symmetry
    assert len({edge_marginal_bruteforce(K4, S, e) for e in range(K4.m)}) > 1


# -- distributions -----------------------------------------------------------------

def test_distribution_examples():
    d = orientation_distribution(C3, range(3))
    assert set(d) == {Orientation((1, 2, 0)), Orientation((0, 1, 2))}
    assert all(p == Fraction(1, 2) for p in d.values())
    d = distribution_bruteforce(K4, [])
    assert len(d) == 64 and set(d.values()) == {Fraction(1, 64)}
    d = distribution_bruteforce(K4, range(4))
    assert len(d) == 32 and sum(d.values()) == 1


def test_distribution_empty_support():
    with pytest.raises(EmptySupport):
        distribution_bruteforce(path_graph(3), range(3))


# -- independence polynomial -----------------------------------------------------

def test_q_examples():
    C4 = cycle_graph(4)
    assert q_poly(C4, [Fraction(1, 4)] * 4) == Fraction(1, 8)
    assert q_poly(K4, [Fraction(1, 3)] * 4, []) == 1
    assert q_poly(K4, sfo_weights(K4)) == Fraction(1, 2)


def test_q_recurrence_matches_direct_sum():
    rng = np.random.default_rng(3)
    graphs = [K4, K33, Q3, W4, wheel_graph(6), cycle_graph(7), complete_graph(5)]
    for G in graphs:
        w = [Fraction(int(rng.integers(1, 9)), 16) for _ in range(G.n)]
        for _ in range(5):
            J = [u for u in range(G.n) if rng.random() < 0.6]
            assert q_poly(G, w, J) == q_poly_direct(G, w, J)


def test_q_weight_validation():
    with pytest.raises(ValueError):
        q_poly(K4, [Fraction(1, 2)] * 3)
    with pytest.raises(ValueError):
        q_poly(K4, [Fraction(3, 2)] * 4)


def test_cycle_identity():
    for n in range(3, 13):
        assert q_poly(cycle_graph(n), [Fraction(1, 4)] * n) == Fraction(1, 2 ** (n - 1))


def test_wheel_slack_is_zero():
    for k in range(4, 11):
        W = wheel_graph(k)
        assert q_poly(W, [2 * p for p in sfo_weights(W)]) == 0


def test_shearer_examples():
    assert shearer_membership(K4, sfo_weights(K4))
    assert not shearer_membership(W4, [2 * p for p in sfo_weights(W4)])
    assert shearer_membership(Q3, [0] * 8)
    with pytest.raises(CapExceeded):
        shearer_membership(cycle_graph(25), [0] * 25)


def test_pj_equals_qj_examples():
    assert verify_pj_qj(K4, range(4))
    assert verify_pj_qj(K4, [])
    rng = np.random.default_rng(8)
    for _ in range(10):
        J = [u for u in range(8) if rng.random() < 0.5]
        assert verify_pj_qj(Q3, J)


def test_pj_equals_qj_on_small_multigraphs():
    for G in min3_multigraphs(4, 8):
        p = sfo_weights(G)
        table = count_table(G)
        for J in range(1 << G.n):
            members = [u for u in range(G.n) if J >> u & 1]
            assert Fraction(int(table[J]), 1 << G.m) == q_poly(G, p, members)


# -- telescoping ---------------------------------------------------------------------

@pytest.mark.parametrize("G", [K4, K33, W4, Q3])
def test_telescoping_product_any_order(G):
    total = count_sfo_bruteforce(G, range(G.n))
    rng = np.random.default_rng(G.m)
    orders = [list(range(G.n)), list(range(G.n))[::-1]] + [list(rng.permutation(G.n)) for _ in range(3)]
    for order in orders:
        assert telescoping_product(G, order) == total
        # the same product from marginal_bruteforce directly
        prod = Fraction(1 << G.m)
        for i, v in enumerate(order):
            prod *= marginal_bruteforce(G, order[:i], v)
        assert prod == total
