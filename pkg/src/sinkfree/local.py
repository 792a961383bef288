"""Local samplers for one vertex or one edge, and exact evaluation of their coin trees.

The vertex sampler walks a directed path P out of the query vertex v. At the
last vertex u it reveals the first unvisited incident edge. If the edge points
away from u the path grows, unless the new vertex is already on P or has a
revealed edge into P; then a cycle is closed and v is certainly not a sink.
If every edge at u is visited and all point into u, u is a sink of S and gets
"popped": all its edges go back to unvisited and will be redrawn from fresh
table entries. The run stops when

* P is empty: v itself was popped, so v is a sink (returns 0);
* P has two or more vertices and its last vertex is outside S (returns 1);
* a cycle is closed as above (returns 1).

The edge sampler is the same walk started from the query edge e0, whose
orientation gives P = (tail, head). Whenever pops shrink P to a single vertex,
e0 is redrawn and the walk restarts from the new P; the run ends the moment
one of the exits above fires, returning the head of e0 as it then stands.

Both read the same (edge, index) table entries that sink popping would, which
is what makes the coupling checks in the test suite possible.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .graph import Graph, GraphError, Orientation, is_sink, vertex_set
from .prs import EmptySupportError, _require_support, pop_sinks, prs_sample
from .table import ResamplingTable

HALF = Fraction(1, 2)


class BudgetExceeded(RuntimeError):
    """Exact enumeration would exceed its work budget."""


def truncation_threshold(eps: float) -> int:
    """Coin budget ceil(72 ln(73/eps)) after which a truncated run outputs 1."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    x = 72.0 * math.log(73.0 / eps)
    # guard against 5256.000000001 when ln(73/eps) is an integer in exact arithmetic
    return math.ceil(x - 1e-9)


@dataclass(frozen=True)
class TruncationPolicy:
    max_coin_steps: int | None = None

    def __post_init__(self):
        if self.max_coin_steps is not None and self.max_coin_steps < 1:
            raise ValueError("max_coin_steps must be >= 1")

    @property
    def bounded(self) -> bool:
        return self.max_coin_steps is not None

    @classmethod
    def from_eps(cls, eps: float) -> "TruncationPolicy":
        return cls(truncation_threshold(eps))


UNBOUNDED = TruncationPolicy()


@dataclass
class TraceRecord:
    """X[i]: path length after coin i; Y[i] = X[i] - sum(c[:i]); c[i-1] is 1/2 or 0."""

    X: list[int] = field(default_factory=list)
    Y: list[Fraction] = field(default_factory=list)
    c: list[Fraction] = field(default_factory=list)

    def drift_ok(self) -> bool:
        return all(self.X[i] - self.Y[i] >= Fraction(i, 4) for i in range(len(self.X)))

    def first_drift_violation(self):
        for i in range(len(self.X)):
            if self.X[i] - self.Y[i] < Fraction(i, 4):
                return i
        return None

    def rows(self):
        for i in range(len(self.X)):
            yield {"step": i, "X": self.X[i], "Y": str(self.Y[i]), "c": str(self.c[i - 1]) if i else "0"}


@dataclass
class PathState:
    P: list = field(default_factory=list)
    path_edges: list = field(default_factory=list)
    visited: dict = field(default_factory=dict)  # edge -> revealed head
    coin_steps: int = 0
    pending: tuple | None = None  # (edge, u, w, only_unvisited) awaiting a coin
    last: int | None = None       # last revealed head of the query edge
    retained: dict | None = None  # orientation around a popped origin

    def copy(self) -> "PathState":
        return PathState(list(self.P), list(self.path_edges), dict(self.visited),
                         self.coin_steps, self.pending, self.last, self.retained)

    def key(self):
        return tuple(self.P), tuple(sorted(self.visited.items()))


class _Walk:
    def __init__(self, G: Graph, S: frozenset, adj=None, live=None):
        self.G = G
        self.S = S
        self.adj = adj if adj is not None else G.adj
        self.live = live

    def _is_live(self, e):
        return self.live is None or e in self.live

    def _scan(self, u, st):
        # first unvisited edge at u, and whether it is the only one
        first = None
        for e, w in self.adj[u]:
            if e in st.visited or not self._is_live(e):
                continue
            if first is not None:
                return first + (False,)
            first = (e, u, w)
        return None if first is None else first + (True,)

    def _pop(self, st, u):
        for e, _ in self.adj[u]:
            st.visited.pop(e, None)
        st.P.pop()
        if st.path_edges:
            st.path_edges.pop()

    def apply(self, st, head):
        """Record the coin outcome for the pending edge; returns 1 on a closed cycle."""
        e, u, w, _ = st.pending
        st.pending = None
        st.visited[e] = head
        st.coin_steps += 1
        if head != w:
            return None
        onP = set(st.P)
        if w in onP:
            return self.closed_value(st)
        for f, x in self.adj[w]:
            if f in st.visited and st.visited[f] != w and x in onP and self._is_live(f):
                return self.closed_value(st)
        st.P.append(w)
        st.path_edges.append(e)
        return None


class VertexWalk(_Walk):
    def __init__(self, G, S, v, adj=None):
        super().__init__(G, S, adj)
        self.v = v

    def initial(self):
        return PathState(P=[self.v])

    def closed_value(self, st):
        return 1

    def truncated_value(self, st):
        return 1

    def settle(self, st):
        """Pop sinks until a coin is needed (returns None) or the run exits (returns x)."""
        while st.P:
            u = st.P[-1]
            if len(st.P) >= 2 and u not in self.S:
                return 1
            pend = self._scan(u, st)
            if pend is None:
                if len(st.P) == 1:
                    st.retained = {e: st.visited[e] for e, _ in self.adj[u]}
                self._pop(st, u)
                continue
            st.pending = pend
            return None
        return 0


class EdgeWalk(_Walk):
    def __init__(self, G, S, e0, adj=None, live=None):
        super().__init__(G, S, adj, live)
        self.e0 = e0

    def initial(self):
        return PathState()

    def closed_value(self, st):
        return st.P[1]

    def truncated_value(self, st):
        return st.P[1] if st.P else st.last

    def settle(self, st):
        while True:
            if not st.P:
                st.pending = (self.e0, None, None, False)
                return None
            u = st.P[-1]
            if u not in self.S:
                return st.P[1]
            pend = self._scan(u, st)
            if pend is None:
                self._pop(st, u)
                if len(st.P) == 1:
                    st.P.clear()
                    st.path_edges.clear()
                continue
            st.pending = pend
            return None

    def apply(self, st, head):
        e = st.pending[0]
        if st.P:
            return super().apply(st, head)
        st.pending = None
        st.visited[e] = head
        st.coin_steps += 1
        st.last = head
        st.P[:] = [self.G.other(e, head), head]
        st.path_edges[:] = [e]
        return None


def check_path_shape(G: Graph, st: PathState) -> None:
    """P is a simple directed path along revealed edges; other visited edges point into P."""
    P = st.P
    if len(set(P)) != len(P):
        raise AssertionError(f"path repeats a vertex: {P}")
    if len(st.path_edges) != max(len(P) - 1, 0):
        raise AssertionError("path edge list out of step with P")
    onP = set(P)
    on_path = set(st.path_edges)
    for k, e in enumerate(st.path_edges):
        if set(G.edges[e]) != {P[k], P[k + 1]} or st.visited.get(e) != P[k + 1]:
            raise AssertionError(f"edge {e} is not revealed along the path")
    for e, h in st.visited.items():
        if e not in on_path and h not in onP:
            raise AssertionError(f"visited edge {e} points to {h}, off the path")


def _draw_head(G, table, e):
    a, b = G.edges[e]
    return b if table.draw(e) else a


def _run(G, walk, table, policy, st=None, trace=None, check=False):
    st = st or walk.initial()
    out = walk.settle(st)
    while out is None:
        if check:
            check_path_shape(G, st)
        if policy.bounded and st.coin_steps >= policy.max_coin_steps:
            return walk.truncated_value(st), st, True
        only = st.pending[3]
        out = walk.apply(st, _draw_head(G, table, st.pending[0]))
        closed = out is not None
        if out is None:
            out = walk.settle(st)
        if trace is not None:
            x = trace.X[-1] + 1 if closed else len(st.P)
            c = Fraction(0) if only else HALF
            trace.c.append(c)
            trace.X.append(x)
            trace.Y.append(trace.Y[-1] + (x - trace.X[-2]) - c)
    return out, st, False


def _vertex_pre(G, S, v, policy):
    S = vertex_set(G, S)
    if not 0 <= v < G.n:
        raise GraphError(f"vertex {v} out of range")
    if v in S:
        raise GraphError(f"query vertex {v} lies in S")
    if not policy.bounded:
        _require_support(G, S)
    return S


def sample_vertex(G: Graph, S: Iterable[int], v: int, table: ResamplingTable,
                  policy: TruncationPolicy = UNBOUNDED, check_invariants: bool = False):
    """Return (x, trace) where x = 1 iff v ends up with an out-edge.

    Unbounded, Pr[x = 1] is the probability that v is not a sink under the
    uniform S-sink-free orientation. With a coin budget T, a run that would
    need coin T + 1 outputs 1 instead.
    """
    S = _vertex_pre(G, S, v, policy)
    tr = TraceRecord([1], [Fraction(1)], [])
    x, _, _ = _run(G, VertexWalk(G, S, v), table, policy, trace=tr, check=check_invariants)
    return x, tr


def run_vertex(G, S, v, table, policy=UNBOUNDED):
    """Like sample_vertex but returns (x, final PathState, truncated)."""
    S = _vertex_pre(G, S, v, policy)
    return _run(G, VertexWalk(G, S, v), table, policy)


def sample_edge(G: Graph, S: Iterable[int], e: int, table: ResamplingTable,
                policy: TruncationPolicy = UNBOUNDED, adj=None, live=None,
                check_invariants: bool = False):
    """Return (tail, head) for edge e, distributed as its orientation under the
    uniform S-sink-free orientation (exactly, when unbounded).

    ``adj``/``live`` restrict the walk to a residual graph; the fast sampler
    uses them.
    """
    S = vertex_set(G, S)
    if not 0 <= e < G.m:
        raise GraphError(f"edge {e} out of range")
    if not policy.bounded and adj is None:
        _require_support(G, S)
    h, _, _ = _run(G, EdgeWalk(G, S, e, adj, live), table, policy, check=check_invariants)
    return G.other(e, h), h


def run_edge(G, S, e, table, policy=UNBOUNDED, adj=None, live=None):
    """Returns (head, final PathState, truncated)."""
    S = vertex_set(G, S)
    return _run(G, EdgeWalk(G, S, e, adj, live), table, policy)


# -- coupling with sink popping ---------------------------------------------------------

def complete_orientation(G: Graph, S, st: PathState, table: ResamplingTable) -> Orientation:
    """Finish a local run into a full sink popping run on the same table.

    Visited edges keep their revealed heads, edges around a popped origin keep
    the heads they had when it was popped, every other edge takes its next
    table entry; then sinks of S are popped as usual.
    """
    S = vertex_set(G, S)
    head = [None] * G.m
    for e in range(G.m):
        if e in st.visited:
            head[e] = st.visited[e]
        elif st.retained is not None and e in st.retained:
            head[e] = st.retained[e]
        else:
            head[e] = _draw_head(G, table, e)
    pop_sinks(G, S, head, table)
    return Orientation(tuple(head))


def coupled_completion_check(G: Graph, S, v: int, table: ResamplingTable) -> bool:
    """(x = 1) iff v is not a sink in sink popping's output on the same table.

    ``table`` should be unconsumed; it is only read through fresh copies.
    """
    x, _ = sample_vertex(G, S, v, table.fresh())
    sigma, _ = prs_sample(G, S, table.fresh())
    return (x == 1) == (not is_sink(G, sigma, v))


def coupled_completion_full(G: Graph, S, v: int, table: ResamplingTable) -> bool:
    """The completed run reproduces sink popping's output orientation exactly."""
    t1 = table.fresh()
    x, st, _ = run_vertex(G, S, v, t1)
    sigma_local = complete_orientation(G, S, st, t1)
    sigma, _ = prs_sample(G, S, table.fresh())
    return sigma_local == sigma and (x == 1) == (not is_sink(G, sigma, v))


def coupled_edge_check(G: Graph, S, e: int, table: ResamplingTable) -> bool:
    """The edge sampler's head equals sink popping's head for e on the same table."""
    _, h = sample_edge(G, S, e, table.fresh())
    sigma, _ = prs_sample(G, S, table.fresh())
    return sigma.head[e] == h


# -- exact evaluation of the coin tree ------------------------------------------------------

def _children(G, walk, st):
    """The two coin outcomes of a settled state: each an exit value or a new state."""
    e = st.pending[0]
    a, b = G.edges[e]
    w = st.pending[2]
    # extending branch first
    heads = (w, G.other(e, w)) if w is not None else (b, a)
    outs = []
    for h in heads:
        s2 = st.copy()
        out = walk.apply(s2, h)
        if out is None:
            out = walk.settle(s2)
        outs.append(out if out is not None else s2)
    return outs


@dataclass
class TreeValue:
    value: Fraction           # E[x'] with unfinished branches counted as 1
    truncated_mass: Fraction  # probability of needing more than T coins
    work: int                 # states (layered) or nodes (tree walk) expanded
    depth: int = 0            # coin depth actually evaluated


def vertex_tree_value(G: Graph, S, v: int, T: int, method: str = "layered",
                      budget: int = 10**7, on_budget: str = "raise") -> TreeValue:
    """Exact expectation of the T-truncated vertex sampler.

    ``layered`` merges identical states at equal depth, so it costs the number
    of distinct states rather than tree leaves; ``tree`` walks the coin tree
    depth first and is kept as a cross-check. With ``on_budget="truncate"``
    the layered walk stops at the deepest layer that fits the budget and
    returns that shallower truncation; ``depth`` records where it stopped.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    S = _vertex_pre(G, S, v, TruncationPolicy(T))
    walk = VertexWalk(G, S, v)
    st0 = walk.initial()
    out = walk.settle(st0)
    if out is not None:
        return TreeValue(Fraction(out), Fraction(0), 0, 0)
    if method == "layered":
        return _layered(G, walk, st0, T, budget, on_budget == "truncate")
    if method == "tree":
        return _tree(G, walk, st0, T, budget)
    raise ValueError(f"unknown method {method!r}")


def _layered(G, walk, st0, T, budget, soft=False):
    # masses are integers scaled by 2**t at layer t
    layer = {st0.key(): 1}
    states = {st0.key(): st0}
    acc = 0
    work = 0
    t = 0
    while layer and t < T:
        if soft and work + len(layer) > budget:
            break
        t += 1
        nxt = defaultdict(int)
        nstates = {}
        ones = 0
        for k, mass in layer.items():
            work += 1
            if work > budget:
                raise BudgetExceeded(f"more than {budget} states at depth {t}")
            for o in _children(G, walk, states[k]):
                if isinstance(o, PathState):
                    k2 = o.key()
                    nxt[k2] += mass
                    nstates.setdefault(k2, o)
                else:
                    ones += mass * o
        acc = 2 * acc + ones
        layer, states = nxt, nstates
    alive = sum(layer.values())
    scale = 1 << t
    return TreeValue(Fraction(acc + alive, scale), Fraction(alive, scale), work, t)


def _tree(G, walk, st0, T, budget):
    total = Fraction(0)
    cut = Fraction(0)
    work = 0
    stack = [(st0, 0)]
    while stack:
        st, d = stack.pop()
        work += 1
        if work > budget:
            raise BudgetExceeded(f"more than {budget} tree nodes")
        w = Fraction(1, 1 << (d + 1))
        for o in reversed(_children(G, walk, st)):
            if not isinstance(o, PathState):
                total += w * o
            elif d + 1 >= T:
                total += w
                cut += w
            else:
                stack.append((o, d + 1))
    return TreeValue(total, cut, work, T)


def enumerate_vertex_estimator(G: Graph, S, v: int, T: int, budget: int = 10**7,
                               method: str = "layered") -> Fraction:
    """E[x'] for the T-truncated vertex sampler, as an exact dyadic rational."""
    return vertex_tree_value(G, S, v, T, method, budget).value


def _absorption(G, walk, max_states):
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    st0 = walk.initial()
    out = walk.settle(st0)
    if out is not None:
        return {out: Fraction(1)}
    index = {st0.key(): 0}
    order = [st0]
    rows = []
    exits = set()
    i = 0
    while i < len(order):
        row = []
        for o in _children(G, walk, order[i]):
            if isinstance(o, PathState):
                k = o.key()
                if k not in index:
                    if len(order) >= max_states:
                        raise BudgetExceeded(f"more than {max_states} states")
                    index[k] = len(order)
                    order.append(o)
                row.append(("s", index[k]))
            else:
                row.append(("x", o))
                exits.add(o)
        rows.append(row)
        i += 1
    N = len(order)
    A = defaultdict(dict)
    for r, row in enumerate(rows):
        A[r][r] = A[r].get(r, QQ(0)) + QQ(1)
        for kind, j in row:
            if kind == "s":
                A[r][j] = A[r].get(j, QQ(0)) - QQ(1, 2)
    M = DomainMatrix(dict(A), (N, N), QQ)
    res = {}
    for val in sorted(exits):
        rhs = {r: {0: QQ(sum(1 for kind, x in row if kind == "x" and x == val), 2)}
               for r, row in enumerate(rows)}
        rhs = {r: d for r, d in rhs.items() if d[0] != 0}
        b = DomainMatrix(rhs, (N, 1), QQ)
        sol = M.lu_solve(b)
        p = sol.to_dok().get((0, 0), QQ(0))
        res[val] = Fraction(int(p.numerator), int(p.denominator))
    return res


def vertex_absorption(G: Graph, S, v: int, max_states: int = 200000) -> Fraction:
    """Exact Pr[x = 1] of the untruncated vertex sampler (Markov chain solve)."""
    S = _vertex_pre(G, S, v, UNBOUNDED)
    return _absorption(G, VertexWalk(G, S, v), max_states).get(1, Fraction(0))


def edge_absorption(G: Graph, S, e: int, max_states: int = 200000) -> dict:
    """Exact distribution of the edge sampler's output head, keyed by vertex."""
    S = vertex_set(G, S)
    _require_support(G, S)
    return _absorption(G, EdgeWalk(G, S, e), max_states)


__all__ = [
    "BudgetExceeded", "EmptySupportError", "PathState", "TraceRecord", "TreeValue",
    "TruncationPolicy", "UNBOUNDED", "check_path_shape", "complete_orientation",
    "coupled_completion_check", "coupled_completion_full", "coupled_edge_check",
    "edge_absorption", "enumerate_vertex_estimator", "run_edge", "run_vertex",
    "sample_edge", "sample_vertex", "truncation_threshold", "vertex_absorption",
    "vertex_tree_value",
]
