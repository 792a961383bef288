import math

import pytest

from conftest import C3, K4, K33, Q3
from sinkfree import kernels
from sinkfree.fastsampler import (InvariantError, _fast_reference, edge_budget, fast_batch_codes,
                                  focus_schedule_trace, sample_sfo_exact_sequential,
                                  sample_sfo_fast)
from sinkfree.graph import MinDegreeError, check_orientation, complete_graph, sinks
from sinkfree.harness.stats import EmpiricalDistribution, chi_square_gof
from sinkfree.oracle import distribution_bruteforce
from sinkfree.table import TAG_FAST, ResamplingTable, derive_seed


def test_budget_examples():
    assert edge_budget(6, 0.05) == 1379
    assert edge_budget(6, 0.05) == math.ceil(288 * math.log(120))
    with pytest.raises(ValueError):
        edge_budget(6, 0)
    with pytest.raises(ValueError):
        edge_budget(0, 0.1)


def test_rejects_low_degree_and_bad_eps():
    with pytest.raises(MinDegreeError):
        sample_sfo_fast(C3, 0.1, 0)
    with pytest.raises(ValueError):
        sample_sfo_fast(K4, 1.2, 0)
    with pytest.raises(ValueError):
        sample_sfo_fast(K4, 0.1, 0, backend="gpu")


def test_first_focus_is_vertex_zero():
    for seed in range(20):
        log = focus_schedule_trace(K4, 0.1, seed)
        assert log[0].focus == 0


def test_forced_events_happen_at_residual_degree_one():
    for G in (K4, Q3, K33):
        for seed in range(30):
            log = focus_schedule_trace(G, 0.1, seed)
            removed = set()
            for ev in log:
                live_at_focus = [e for e, _ in G.adj[ev.focus] if e not in removed]
                if ev.forced:
                    assert live_at_focus == [ev.edge] and ev.tail == ev.focus
                else:
                    assert len(live_at_focus) >= 2
                removed.add(ev.edge)


@pytest.mark.parametrize("G", [K4, Q3])
def test_no_degree_two_violations(G):
    _, stats = fast_batch_codes(G, 0.1, 3, 10_000)
    assert stats["d2_violations"] == 0


@pytest.mark.parametrize("G", [K4, Q3, K33, complete_graph(6)])
def test_outputs_are_sink_free(G):
    fails = 0
    for seed in range(200):
        sigma, stats = sample_sfo_fast(G, 0.1, seed, return_stats=True)
        check_orientation(G, sigma)
        fails += bool(sinks(G, sigma))
    # truncation can leave a sink, but only with small probability
    assert fails <= 10


def test_untruncated_schedule_is_uniform_on_k4():
    # a huge constant keeps every edge sample below its budget
    codes, stats = fast_batch_codes(K4, 0.5, 21, 100_000, C=1e6)
    assert stats["truncations"] == 0
    res = chi_square_gof(EmpiricalDistribution.from_samples(codes), distribution_bruteforce(K4, range(4)))
    assert res.outside_support == 0
    assert res.p_value > 1e-4


def test_exact_sequential_is_sink_free():
    for seed in range(100):
        sigma = sample_sfo_exact_sequential(Q3, seed)
        assert not sinks(Q3, sigma)


@pytest.mark.parametrize("G", [K4, Q3, K33])
def test_python_backend_matches_numba(G):
    for seed in range(100):
        a, sa = sample_sfo_fast(G, 0.05, seed, backend="python", return_stats=True)
        b, sb = sample_sfo_fast(G, 0.05, seed, backend="numba", return_stats=True)
        assert a == b and sa == sb


def test_batch_matches_single_runs():
    codes, _ = fast_batch_codes(K4, 0.05, 9, 200)
    for r in range(200):
        heads, _ = _fast_reference(K4, ResamplingTable(derive_seed(9, TAG_FAST, r)), 1379, None)
        code = sum(1 << e for e, h in enumerate(heads) if h == K4.edges[e][1])
        assert code == codes[r]
