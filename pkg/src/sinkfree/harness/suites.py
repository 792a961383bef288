"""Named verification suites (also used by ``sinkfree verify``).

Each suite takes a seed and a ``scale`` multiplier on its sample counts
(1.0 = full size) and returns a SuiteResult. Randomness is always derived
from the seed, so reruns are identical.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .. import kernels
from ..counting import count_deterministic, count_fpras, det_depth
from ..fastsampler import edge_budget, fast_batch_codes
from ..graph import (Graph, complete_bipartite, complete_graph, cycle_graph, hypercube,
                     omega_empty, wheel_graph)
from ..local import sample_vertex, coupled_completion_check, vertex_tree_value
from ..oracle import (count_sfo_bruteforce, count_table, distribution_bruteforce,
                      marginal_bruteforce, q_poly, sfo_weights, verify_pj_qj)
from ..table import (TAG_COUPLING, TAG_GRAPH, TAG_PRS, TAG_VERTEX, ResamplingTable,
                     derive_seed)
from .audit import audit_trace
from .generators import min3_multigraphs, multigraphs, random_multigraph, random_regular_graph
from .stats import EmpiricalDistribution, chi_square_gof, tv_distance

ALPHA = 1e-4


@dataclass
class SuiteResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.details.get('summary', '')}"


def named_graphs() -> dict[str, Graph]:
    return {"K4": complete_graph(4), "Q3": hypercube(3), "K33": complete_bipartite(3, 3)}


def _n(x, scale, lo=1):
    return max(lo, int(round(x * scale)))


def _rng(seed, *parts):
    return np.random.default_rng(derive_seed(seed, *parts))


# 1 -------------------------------------------------------------------------------

def prs_exactness(seed: int, scale: float = 1.0) -> dict:
    draws = _n(200_000, scale, 10_000)
    out, ok = {}, True
    for k, (name, G) in enumerate(named_graphs().items()):
        S = range(G.n)
        codes, _ = kernels.prs_batch(G, S, derive_seed(seed, TAG_PRS, k), draws)
        res = chi_square_gof(EmpiricalDistribution.from_samples(codes), distribution_bruteforce(G, S))
        out[name] = {"p": res.p_value, "chi2": res.statistic, "dof": res.dof}
        ok &= res.p_value > ALPHA
    out["summary"] = ", ".join(f"{k} p={v['p']:.3g}" for k, v in out.items()) + f" ({draws} draws each)"
    return ok, out


# 2 -------------------------------------------------------------------------------

def local_marginals(seed: int, scale: float = 1.0) -> dict:
    draws = _n(100_000, scale, 10_000)
    worst, ok, rows = 0.0, True, []
    graphs = {"K4": complete_graph(4), "Q3": hypercube(3)}
    for gi, (name, G) in enumerate(graphs.items()):
        ws = kernels.Workspace(G)
        for v in range(G.n):
            for kind, S in (("empty", set()), ("rest", set(range(G.n)) - {v})):
                xs, _ = kernels.vertex_batch(G, S, v, derive_seed(seed, TAG_VERTEX, gi, v, len(S)), draws, ws=ws)
                exact = marginal_bruteforce(G, S, v)
                err = abs(float(xs.mean()) - float(exact))
                worst = max(worst, err)
                ok &= err <= 0.01
                rows.append((name, v, kind, float(xs.mean()), str(exact)))
    return ok, {"summary": f"max |mean - exact| = {worst:.4f} over {len(rows)} pairs", "rows": rows}


# 3 -------------------------------------------------------------------------------

def coupling(seed: int, scale: float = 1.0) -> dict:
    seeds = _n(10_000, scale, 200)
    fails, total = 0, 0
    for gi, G in enumerate((complete_graph(4), hypercube(3))):
        rng = _rng(seed, TAG_COUPLING, gi)
        for k in range(seeds):
            v = int(rng.integers(G.n))
            S = {u for u in range(G.n) if u != v and rng.random() < 0.5}
            table = ResamplingTable(derive_seed(seed, TAG_COUPLING, gi, k))
            total += 1
            fails += not coupled_completion_check(G, S, v, table)
    return fails == 0, {"summary": f"{fails} failures in {total} coupled runs", "failures": fails}


# 4 -------------------------------------------------------------------------------

def trace_drift(seed: int, scale: float = 1.0) -> dict:
    runs = _n(10_000, scale, 200)
    out, bad = {}, 0
    for gi, (name, G) in enumerate(named_graphs().items()):
        S = set(range(1, G.n))
        viol = 0
        for k in range(runs):
            _, tr = sample_vertex(G, S, 0, ResamplingTable(derive_seed(seed, TAG_VERTEX, 99, gi, k)))
            viol += not audit_trace(tr)
        out[name] = viol
        bad += viol
    out["summary"] = (f"runs with a drift violation: {', '.join(f'{k} {v}/{runs}' for k, v in out.items())}")
    return bad == 0, out


# 5 -------------------------------------------------------------------------------

def half_bound_graphs(seed: int, random_count: int = 1000):
    """Exhaustive small classes plus random connected min-degree-3 multigraphs."""
    for n in (2, 3, 4):
        yield from min3_multigraphs(n, 12)
    yield from min3_multigraphs(5, 10)
    rng = _rng(seed, TAG_GRAPH, 41)
    for _ in range(random_count):
        n = int(rng.choice([5, 6]))
        m = int(rng.integers(math.ceil(3 * n / 2), 13))
        yield random_multigraph(n, m, rng)


def half_bound(seed: int, scale: float = 1.0) -> dict:
    count, worst, worst_case = 0, Fraction(1), None
    for G in half_bound_graphs(seed, _n(1000, scale, 50)):
        table = count_table(G)
        full = (1 << G.n) - 1
        for S in range(full + 1):
            base = int(table[S])
            for v in range(G.n):
                if S >> v & 1:
                    continue
                r = Fraction(int(table[S | 1 << v]), base)
                if r < worst:
                    worst, worst_case = r, (G.n, G.edges, S, v)
        count += 1
    ok = worst > Fraction(1, 2)
    return ok, {"summary": f"{count} graphs, min marginal {worst} ({float(worst):.4f})",
                "graphs": count, "min": str(worst), "argmin": repr(worst_case)}


# 6 -------------------------------------------------------------------------------

def identity_graphs():
    gs = {"K4": complete_graph(4), "K5": complete_graph(5), "K33": complete_bipartite(3, 3),
          "Q3": hypercube(3), "K34": complete_bipartite(3, 4)}
    for k in range(3, 8):
        gs[f"W{k}"] = wheel_graph(k)
    gs["dK2x3"] = Graph.from_edges(2, [(0, 1)] * 3)
    gs["theta"] = Graph.from_edges(4, [(0, 1), (0, 1), (1, 2), (2, 3), (2, 3), (3, 0), (0, 2), (1, 3)])
    return {k: G for k, G in gs.items() if G.m <= 14}


def pj_qj(seed: int, scale: float = 1.0) -> dict:
    fails = []
    checked = 0
    for name, G in identity_graphs().items():
        p = sfo_weights(G)
        table = count_table(G)
        for J in range(1 << G.n):
            members = [u for u in range(G.n) if J >> u & 1]
            if Fraction(int(table[J]), 1 << G.m) != q_poly(G, p, members):
                fails.append((name, J))
            checked += 1
        if count_sfo_bruteforce(G, range(G.n)) != (1 << G.m) * q_poly(G, p):
            fails.append((name, "Omega_V"))
    for n in range(3, 13):
        if q_poly(cycle_graph(n), [Fraction(1, 4)] * n) != Fraction(1, 2 ** (n - 1)):
            fails.append((f"C{n}", "cycle"))
    return not fails, {"summary": f"{checked} (G, J) pairs + cycles C3..C12, {len(fails)} mismatches",
                       "mismatches": fails}


def wheel_slack(seed: int, scale: float = 1.0) -> dict:
    vals = {}
    for k in range(4, 11):
        W = wheel_graph(k)
        vals[k] = q_poly(W, [2 * x for x in sfo_weights(W)])
    ok = all(v == 0 for v in vals.values())
    return ok, {"summary": "q_W(-2p) = " + ", ".join(f"W{k}:{v}" for k, v in vals.items())}


# 7 -------------------------------------------------------------------------------

def det_count(seed: int, scale: float = 1.0) -> dict:
    rows, ok = [], True
    for name, G in named_graphs().items():
        truth = count_sfo_bruteforce(G, range(G.n))
        a = count_deterministic(G, 0.5)
        b = count_deterministic(G, 0.5)
        same = a.exact_value == b.exact_value and a.factors == b.factors
        ratio = float(a.exact_value / truth)
        T = det_depth(G.n, 0.5)
        bounds = True
        for i, f in enumerate(a.factors):
            tv = vertex_tree_value(G, range(i), i, T)
            exact = marginal_bruteforce(G, range(i), i)
            bounds &= abs(f - exact) <= tv.truncated_mass
        good = same and 0.5 <= ratio <= 1.5 and bounds
        ok &= good
        rows.append(f"{name} {float(a.exact_value):.6g}/{truth} ratio {ratio:.6f}"
                    f"{'' if same else ' NONDETERMINISTIC'}{'' if bounds else ' BOUND'}")
    return ok, {"summary": "; ".join(rows)}


# 8 -------------------------------------------------------------------------------

def fpras(seed: int, scale: float = 1.0) -> dict:
    trials = 20
    need = 14
    rows, ok = [], True
    for gi, (name, G) in enumerate((("K4", complete_graph(4)), ("Q3", hypercube(3)))):
        truth = count_sfo_bruteforce(G, range(G.n))
        hits = 0
        for t in range(trials):
            r = count_fpras(G, 0.3, derive_seed(seed, 5000 + gi, t))
            hits += 0.7 * truth <= r.value <= 1.3 * truth
        ok &= hits >= need
        rows.append(f"{name} {hits}/{trials} within 30% of {truth}")
    return ok, {"summary": "; ".join(rows)}


# 9 -------------------------------------------------------------------------------

def fast_tv(seed: int, scale: float = 1.0) -> dict:
    draws = _n(1_000_000, scale, 20_000)
    G = complete_graph(4)
    codes, stats = fast_batch_codes(G, 0.05, seed, draws)
    tv = tv_distance(EmpiricalDistribution.from_samples(codes), distribution_bruteforce(G, range(4)))
    ok = tv <= 0.07 and stats["d2_violations"] == 0
    return ok, {"summary": f"TV {tv:.4f} over {draws} draws, degree-2 violations {stats['d2_violations']}, "
                           f"truncations {stats['truncations']}", "tv": tv, **stats}


# 10 ------------------------------------------------------------------------------

def scaling(seed: int, scale: float = 1.0, sizes=(1000, 10_000, 100_000), eps: float = 0.1) -> dict:
    from .bench import bench_fast

    rep = bench_fast(sizes, eps, seed, min_seconds=max(0.2, 1.0 * scale))
    ok = 0.8 <= rep.slope <= 1.2 and rep.total_seconds < 300
    return ok, {"summary": f"slope {rep.slope:.3f}, total {rep.total_seconds:.1f}s, "
                           f"per-work time spread {rep.envelope:.2f}x",
                "slope": rep.slope, "envelope": rep.envelope, "rows": rep.rows_dict()}


# 11 ------------------------------------------------------------------------------

def degenerate_graphs():
    for n in range(1, 5):
        yield from multigraphs(n, 8)
    for n in (5, 6):
        yield from multigraphs(n, 8, simple=True)


def degenerate(seed: int, scale: float = 1.0) -> dict:
    checked, bad = 0, []
    for G in degenerate_graphs():
        if G.m == 0:
            table = np.zeros(1 << G.n, dtype=np.int64)
            table[0] = 1
        else:
            table = count_table(G)
        for S in range(1 << G.n):
            members = [u for u in range(G.n) if S >> u & 1]
            if omega_empty(G, members) != (int(table[S]) == 0):
                bad.append((G.n, G.edges, S))
            checked += 1
    rejected, gated = degree_gate_rejections()
    return not bad and rejected == gated, {
        "summary": f"{checked} (G, S) pairs, {len(bad)} mismatches; "
                   f"{rejected}/{gated} gated CLI calls on C3 and a degree-2 graph exit 1 with min_degree",
        "mismatches": bad[:10]}


GATED_COMMANDS = (
    ["count", "--method", "det"],
    ["count", "--method", "fpras", "--eps", "0.5"],
    ["sample", "--method", "fast"],
)


def degree_gate_rejections():
    """Run the min-degree-gated CLI commands on C3 and on K4 with one edge subdivided."""
    import io
    import json
    import os
    import tempfile

    from ..cli import run
    from ..graph import serialize_graph

    low = {"C3": cycle_graph(3),
           "K4sub": Graph.from_edges(5, [(0, 4), (4, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])}
    ok = total = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name, G in low.items():
            path = os.path.join(tmp, f"{name}.txt")
            with open(path, "w") as fh:
                fh.write(serialize_graph(G))
            for cmd in GATED_COMMANDS:
                buf = io.StringIO()
                code = run(cmd + [path], stdout=buf)
                total += 1
                ok += code == 1 and json.loads(buf.getvalue()).get("error") == "min_degree"
    return ok, total


SUITES = {
    "prs-exactness": prs_exactness,
    "local-marginals": local_marginals,
    "coupling": coupling,
    "trace-drift": trace_drift,
    "lemma41": half_bound,
    "pj-qj": pj_qj,
    "wheel-slack": wheel_slack,
    "det-count": det_count,
    "fpras": fpras,
    "fast-tv": fast_tv,
    "scaling": scaling,
    "degenerate": degenerate,
}


def run_suite(name: str, seed: int, scale: float = 1.0) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    t = time.perf_counter()
    ok, details = SUITES[name](seed, scale)
    return SuiteResult(name, bool(ok), details, time.perf_counter() - t)
