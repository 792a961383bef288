import numpy as np
import pytest

from conftest import C3, K4, Q3
from sinkfree import kernels
from sinkfree.graph import Orientation, path_graph, sinks
from sinkfree.oracle import distribution_bruteforce
from sinkfree.harness.stats import EmpiricalDistribution, chi_square_gof
from sinkfree.prs import EmptySupportError, pop_count_profile, prs_sample
from sinkfree.table import TAG_PRS, ResamplingTable, derive_seed


def test_empty_s_reads_first_bits():
    for seed in range(20):
        t = ResamplingTable(seed)
        sigma, st = prs_sample(K4, [], t)
        want = tuple(b if t.bit(e, 0) else a for e, (a, b) in enumerate(K4.edges))
        assert sigma.head == want
        assert st.resample_events == 0
        assert st.bits_consumed == K4.m


def test_triangle_gives_cyclic_orientations():
    seen = set()
    for seed in range(200):
        sigma, _ = prs_sample(C3, range(3), ResamplingTable(seed))
        seen.add(sigma)
    assert seen == {Orientation((1, 2, 0)), Orientation((0, 1, 2))}


@pytest.mark.parametrize("G", [K4, Q3])
def test_output_has_no_sink_in_s(G):
    rng = np.random.default_rng(1)
    for seed in range(300):
        S = {u for u in range(G.n) if rng.random() < 0.7}
        sigma, st = prs_sample(G, S, ResamplingTable(seed))
        assert not sinks(G, sigma) & S
        assert st.bits_consumed >= G.m


def test_rejects_empty_support():
    with pytest.raises(EmptySupportError):
        prs_sample(path_graph(3), range(3), ResamplingTable(0))


def test_unknown_rule():
    with pytest.raises(ValueError):
        prs_sample(K4, range(4), ResamplingTable(0), rule="random")


@pytest.mark.parametrize("G", [K4, Q3])
def test_sink_rule_does_not_change_output(G):
    S = range(G.n)
    lo, _ = kernels.prs_batch(G, S, derive_seed(3, TAG_PRS), 10_000, "lowest")
    hi, _ = kernels.prs_batch(G, S, derive_seed(3, TAG_PRS), 10_000, "highest")
    assert (lo == hi).all()
    for seed in range(200):
        a, _ = prs_sample(G, S, ResamplingTable(seed), "lowest")
        b, _ = prs_sample(G, S, ResamplingTable(seed), "highest")
        assert a == b


def test_k4_uniform_chi_square():
    codes, _ = kernels.prs_batch(K4, range(4), derive_seed(17, TAG_PRS), 200_000)
    res = chi_square_gof(EmpiricalDistribution.from_samples(codes), distribution_bruteforce(K4, range(4)))
    assert res.outside_support == 0
    assert res.p_value > 1e-4


def test_pop_profile_examples():
    assert pop_count_profile(K4, [], 500, 1)["max"] == 0
    assert pop_count_profile(C3, range(3), 500, 1)["mean"] > 0
    a = pop_count_profile(K4, range(4), 2000, 9)
    b = pop_count_profile(K4, range(4), 2000, 9)
    assert a == b


def test_kernel_matches_reference():
    base = derive_seed(7, TAG_PRS)
    for G in (K4, Q3):
        codes, events = kernels.prs_batch(G, range(G.n), base, 300)
        for r in range(300):
            sigma, st = prs_sample(G, range(G.n), ResamplingTable(derive_seed(7, TAG_PRS, r)))
            assert sigma.code(G) == codes[r]
            assert st.resample_events == events[r]
