"""Command-line interface: ``sinkfree <command> ...`` or ``python -m sinkfree``.

Every command prints one JSON object on stdout (``sample --format text`` and
``bench`` print plain lines instead). Exit status is 0 on success, 1 when the
input violates a precondition (the JSON then carries an ``error`` code) and 2
on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from fractions import Fraction

from . import __version__
from .counting import (BudgetExceeded, count_deterministic, count_fpras, count_fpras_median,
                       count_oracle)
from .fastsampler import DEFAULT_C, InvariantError, edge_budget, focus_schedule_trace, sample_sfo_fast
from .graph import Graph, GraphError, GraphFormatError, MinDegreeError, parse_graph, vertex_set
from .local import TruncationPolicy, sample_vertex, vertex_tree_value
from .oracle import (CapExceeded, count_sfo_bruteforce, edge_marginal_bruteforce,
                     marginal_bruteforce, q_poly, sfo_weights, shearer_membership)
from .prs import EmptySupportError, _require_support, prs_sample
from .table import DEFAULT_SEED, TAG_EDGE, TAG_PRS, TAG_VERTEX, ResamplingTable, derive_seed

JOBS_ENV = "SINKFREE_JOBS"

# most specific first
_ERROR_CODES = [
    (GraphFormatError, "parse_error"),
    (MinDegreeError, "min_degree"),
    (EmptySupportError, "omega_empty"),
    (CapExceeded, "cap_exceeded"),
    (BudgetExceeded, "budget_exceeded"),
    (InvariantError, "invariant_violation"),
    (GraphError, "invalid_graph_input"),
    (OSError, "io_error"),
    (ValueError, "invalid_value"),
]


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: error: {message}")


def rational(x) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def parse_sset(text: str):
    """'all', 'none' or a comma list of vertex ids; returns 'all' or a tuple."""
    t = text.strip().lower()
    if t == "all":
        return "all"
    if t in ("none", ""):
        return ()
    try:
        return tuple(int(x) for x in t.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad S-set {text!r}: use all, none or a comma list") from None


def _resolve_s(G: Graph, which) -> frozenset:
    return frozenset(range(G.n)) if which == "all" else vertex_set(G, which)


def _order(text):
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad order {text!r}") from None


def _sizes(text):
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None


def _load(path: str) -> Graph:
    if path == "-":
        return parse_graph(sys.stdin.read())
    with open(path, "rb") as fh:
        return parse_graph(fh.read())


def _eps(x: float, required: bool = True):
    if x is None and not required:
        return None
    if x is None or not 0 < x < 1:
        raise ValueError(f"eps must lie in (0, 1), got {x}")
    return x


def _echo(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func",) and not callable(v)}


def _header(args) -> dict:
    return {"version": __version__, "seed": args.seed, "config": _echo(args)}


@contextmanager
def _trace_sink(path):
    if path is None:
        yield None
    elif path == "-":
        yield sys.stderr
    else:
        with open(path, "w") as fh:
            yield fh


# -- commands -------------------------------------------------------------------------

def cmd_count(args):
    G = _load(args.graph)
    if args.method == "oracle":
        est = count_oracle(G)
    elif args.method == "det":
        est = count_deterministic(G, _eps(args.eps), order=args.order, budget=args.budget,
                                  force=args.force)
    elif args.trials > 1:
        est = count_fpras_median(G, _eps(args.eps), args.seed, args.trials, order=args.order)
    else:
        est = count_fpras(G, _eps(args.eps), args.seed, order=args.order)
    out = est.to_json()
    if est.exact_value is not None:
        out["count_rational"] = rational(est.exact_value)
    out["seed"] = args.seed
    return out


def cmd_sample(args):
    G = _load(args.graph)
    stats = {}
    if args.method == "prs":
        S = _resolve_s(G, args.s)
        sigma, st = prs_sample(G, S, ResamplingTable(derive_seed(args.seed, TAG_PRS)))
        stats = {"resample_events": st.resample_events, "bits_consumed": st.bits_consumed}
    else:
        eps = _eps(args.eps)
        if args.trace:
            # the Python reference draws the same orientation as the compiled kernel
            log = focus_schedule_trace(G, eps, args.seed, args.trunc_c)
            with _trace_sink(args.trace) as fh:
                for i, ev in enumerate(log):
                    fh.write(json.dumps({"step": i, **ev.__dict__}) + "\n")
            sigma = sample_sfo_fast(G, eps, args.seed, args.trunc_c, backend="python")
        else:
            sigma, stats = sample_sfo_fast(G, eps, args.seed, args.trunc_c, return_stats=True)
        stats["edge_budget"] = edge_budget(G.m, eps, args.trunc_c)
    pairs = [(G.other(e, h), h) for e, h in enumerate(sigma.head)]
    if args.format == "text":
        return "\n".join(f"e {t} {h}" for t, h in pairs)
    return {"orientation": [list(p) for p in pairs], "stats": stats}


def _policy(args):
    if args.depth is not None:
        if args.depth < 1:
            raise ValueError("--depth must be positive")
        return TruncationPolicy(args.depth)
    if args.eps is not None:
        return TruncationPolicy.from_eps(_eps(args.eps))
    return TruncationPolicy()


def _vertex_mc(G, S, v, args, policy):
    base = derive_seed(args.seed, TAG_VERTEX)
    if args.trace:
        ones = 0
        with _trace_sink(args.trace) as fh:
            for r in range(args.draws):
                x, tr = sample_vertex(G, S, v, ResamplingTable(derive_seed(args.seed, TAG_VERTEX, r)),
                                      policy)
                ones += x
                for row in tr.rows():
                    fh.write(json.dumps({"draw": r, **row}) + "\n")
        return ones
    from .kernels import vertex_batch

    if not 0 <= v < G.n:
        raise GraphError(f"vertex {v} out of range")
    if v in S:
        raise GraphError(f"query vertex {v} lies in S")
    if not policy.bounded:
        _require_support(G, S)
    xs, _ = vertex_batch(G, S, v, base, args.draws,
                         policy.max_coin_steps if policy.bounded else -1)
    return int(xs.sum())


def cmd_marginal(args):
    G = _load(args.graph)
    S = _resolve_s(G, args.s)
    if (args.v is None) == (args.e is None):
        raise _Usage("marginal: give exactly one of --v or --e")
    if args.draws < 1:
        raise ValueError("--draws must be positive")
    out = {"target": {"v": args.v} if args.v is not None else {"e": args.e}, "method": args.method}
    if args.e is not None:
        if not 0 <= args.e < G.m:
            raise GraphError(f"edge {args.e} out of range")
        out["event"] = f"edge {args.e} points to {G.edges[args.e][1]}"
        if args.method == "oracle":
            val = edge_marginal_bruteforce(G, S, args.e)
        elif args.method == "mc":
            from .kernels import edge_batch

            policy = _policy(args)
            if not policy.bounded:
                _require_support(G, S)
            heads, _ = edge_batch(G, S, args.e, derive_seed(args.seed, TAG_EDGE), args.draws,
                                  policy.max_coin_steps if policy.bounded else -1)
            val = Fraction(int((heads == G.edges[args.e][1]).sum()), args.draws)
        else:
            raise _Usage("marginal: --method enum needs --v")
    else:
        out["event"] = f"vertex {args.v} is not a sink"
        if args.method == "oracle":
            val = marginal_bruteforce(G, S, args.v)
        elif args.method == "enum":
            if args.depth is None:
                raise _Usage("marginal: --method enum needs --depth")
            tv = vertex_tree_value(G, S, args.v, args.depth, budget=args.budget)
            val = tv.value
            out["truncated_mass"] = rational(tv.truncated_mass)
        else:
            val = Fraction(_vertex_mc(G, S, args.v, args, _policy(args)), args.draws)
    out.update(rational(val))
    out["value"] = float(val)
    if args.method == "mc":
        out["draws"] = args.draws
        out["stderr"] = (float(val) * (1 - float(val)) / args.draws) ** 0.5
    return out


def cmd_oracle(args):
    G = _load(args.graph)
    S = _resolve_s(G, args.s)
    out = {"query": args.query, "n": G.n, "m": G.m}
    if args.query == "count":
        out["count"] = str(count_sfo_bruteforce(G, S))
    elif args.query == "marginal":
        if args.v is None:
            raise _Usage("oracle marginal needs --v")
        out.update(rational(marginal_bruteforce(G, S, args.v)))
    elif args.query == "edge":
        if args.e is None:
            raise _Usage("oracle edge needs --e")
        out.update(rational(edge_marginal_bruteforce(G, S, args.e)))
    elif args.query == "q":
        out.update(rational(q_poly(G, sfo_weights(G), S)))
    else:
        out["in_region"] = shearer_membership(G, sfo_weights(G))
    return out


def _run_one(name, seed, scale):
    from .harness.suites import run_suite

    r = run_suite(name, seed, scale)
    return {"name": r.name, "passed": r.passed, "seconds": round(r.seconds, 3),
            "summary": r.details.get("summary", ""), "line": r.line()}


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def cmd_verify(args):
    from .harness.suites import SUITES

    names = args.suites or list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise _Usage(f"verify: unknown suite(s) {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    jobs = min(_jobs(args), len(names))
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_run_one, names, [args.seed] * len(names), [args.scale] * len(names)))
    else:
        results = [_run_one(n, args.seed, args.scale) for n in names]
    for r in results:
        print(r.pop("line"), file=sys.stderr)
    ok = all(r["passed"] for r in results)
    return {"passed": ok, "suites": results}, (0 if ok else 1)


def cmd_bench(args):
    if args.suite == "fast":
        from .harness.bench import bench_fast

        rep = bench_fast(args.sizes, _eps(args.eps), args.seed, min_seconds=args.min_seconds)
        text = rep.csv("fast").rstrip("\n")
        return text + f"\n# slope={rep.slope:.4f} envelope={rep.envelope:.3f} total_seconds={rep.total_seconds:.2f}"
    from .harness.suites import named_graphs
    from .prs import pop_count_profile

    lines = ["suite,n,m,eps,seconds,result"]
    for name, G in named_graphs().items():
        t = time.perf_counter()
        prof = pop_count_profile(G, range(G.n), args.trials, args.seed)
        dt = time.perf_counter() - t
        lines.append(f"prs-pops,{G.n},{G.m},,{dt:.6g},{name} mean_events={prof['mean']:.4f}")
    return "\n".join(lines)


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sinkfree", description="Sample and count sink-free orientations.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, graph=True):
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        if graph:
            sp.add_argument("graph", help="edge-list file, or - for stdin")

    c = sub.add_parser("count", help="approximate or exact |Omega_V|")
    common(c)
    c.add_argument("--method", choices=["det", "fpras", "oracle"], default="det")
    c.add_argument("--eps", type=float, default=0.5)
    c.add_argument("--order", type=_order, default=None, help="telescoping order, comma list")
    c.add_argument("--budget", type=int, default=10**7, help="state budget per factor (det)")
    c.add_argument("--force", action="store_true", help="det: truncate instead of failing on budget")
    c.add_argument("--trials", type=int, default=1, help="fpras: median of this many runs")
    c.set_defaults(func=cmd_count)

    s = sub.add_parser("sample", help="draw one orientation")
    common(s)
    s.add_argument("--method", choices=["prs", "fast"], default="prs")
    s.add_argument("--s", type=parse_sset, default="all", help="prs: all | none | comma list")
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--trunc-c", type=float, default=DEFAULT_C, dest="trunc_c")
    s.add_argument("--trace", default=None, metavar="PATH", help="fast: write the focus schedule as JSON lines")
    s.add_argument("--format", choices=["json", "text"], default="json")
    s.set_defaults(func=cmd_sample)

    m = sub.add_parser("marginal", help="vertex or edge marginal")
    common(m)
    m.add_argument("--method", choices=["mc", "enum", "oracle"], default="mc")
    m.add_argument("--v", type=int, default=None)
    m.add_argument("--e", type=int, default=None)
    m.add_argument("--s", type=parse_sset, default="none")
    m.add_argument("--depth", type=int, default=None, help="coin-step truncation")
    m.add_argument("--eps", type=float, default=None, help="mc: truncate at the depth for this eps")
    m.add_argument("--draws", type=int, default=10_000)
    m.add_argument("--budget", type=int, default=10**7, help="enum: state budget")
    m.add_argument("--trace", default=None, metavar="PATH",
                   help="mc: write (step, X, Y, c) records as JSON lines")
    m.set_defaults(func=cmd_marginal)

    o = sub.add_parser("oracle", help="exact brute-force answers on small graphs")
    common(o)
    o.add_argument("--query", choices=["count", "marginal", "edge", "q", "shearer"], default="count")
    o.add_argument("--s", type=parse_sset, default="all")
    o.add_argument("--v", type=int, default=None)
    o.add_argument("--e", type=int, default=None)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="run named verification suites")
    common(v, graph=False)
    v.add_argument("suites", nargs="*")
    v.add_argument("--scale", type=float, default=1.0)
    v.add_argument("--jobs", type=int, default=None, help=f"worker processes (default ${JOBS_ENV} or 1)")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="timing table as CSV")
    common(b, graph=False)
    b.add_argument("--suite", choices=["fast", "prs"], default="fast")
    b.add_argument("--sizes", type=_sizes, default=[1000, 10_000, 100_000])
    b.add_argument("--eps", type=float, default=0.1)
    b.add_argument("--min-seconds", type=float, default=1.0, dest="min_seconds")
    b.add_argument("--trials", type=int, default=10_000, help="prs: draws per graph")
    b.set_defaults(func=cmd_bench)
    return p


def _error_code(exc) -> str:
    for cls, code in _ERROR_CODES:
        if isinstance(exc, cls):
            return code
    return "error"


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _Usage as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    status = 0
    try:
        out = args.func(args)
        if isinstance(out, tuple):
            out, status = out
    except _Usage as exc:
        print(exc, file=sys.stderr)
        return 2
    except (GraphError, BudgetExceeded, InvariantError, OSError, ValueError) as exc:
        err = {"error": _error_code(exc), "message": str(exc), **_header(args)}
        print(json.dumps(err), file=stdout)
        return 1
    if isinstance(out, str):
        print(out, file=stdout)
    else:
        print(json.dumps({**out, **_header(args)}), file=stdout)
    return status


def main() -> None:
    sys.exit(run())


__all__ = ["build_parser", "main", "parse_sset", "rational", "run"]
