"""Multigraphs, orientations and the edge-list file format.

Vertices are dense 0-based ints. An edge's id is its position in the input
list; that order also fixes the per-vertex adjacency order that the local
samplers walk ("first unvisited edge").
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    pass


class MinDegreeError(GraphError):
    pass


class GraphFormatError(GraphError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    adj: tuple[tuple[tuple[int, int], ...], ...] = field(repr=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        n = int(n)
        if n < 0:
            raise GraphError("negative vertex count")
        es = tuple((int(a), int(b)) for a, b in edges)
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for e, (a, b) in enumerate(es):
            if not (0 <= a < n and 0 <= b < n):
                raise GraphError(f"edge {e} = ({a}, {b}) has endpoint outside 0..{n - 1}")
            if a == b:
                raise GraphError(f"edge {e} is a self-loop at vertex {a}")
            adj[a].append((e, b))
            adj[b].append((e, a))
        return cls(n, es, tuple(tuple(x) for x in adj))

    @property
    def m(self) -> int:
        return len(self.edges)

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def other(self, e: int, u: int) -> int:
        a, b = self.edges[e]
        return b if u == a else a

    def neighbours(self, u: int) -> set[int]:
        return {w for _, w in self.adj[u]}

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adj)

    @cached_property
    def csr(self):
        """Flat arrays (ptr, adj_edge, adj_other, tail_a, head_b) for the compiled kernels."""
        ptr = np.zeros(self.n + 1, dtype=np.int64)
        for u in range(self.n):
            ptr[u + 1] = ptr[u] + len(self.adj[u])
        adj_e = np.fromiter((e for row in self.adj for e, _ in row), dtype=np.int64, count=2 * self.m)
        adj_o = np.fromiter((w for row in self.adj for _, w in row), dtype=np.int64, count=2 * self.m)
        ea = np.fromiter((a for a, _ in self.edges), dtype=np.int64, count=self.m)
        eb = np.fromiter((b for _, b in self.edges), dtype=np.int64, count=self.m)
        return ptr, adj_e, adj_o, ea, eb


@dataclass(frozen=True)
class Orientation:
    """head[e] is the vertex edge e points to; None marks an unoriented edge."""

    head: tuple[int | None, ...]

    @classmethod
    def from_code(cls, G: Graph, code: int) -> "Orientation":
        return cls(tuple(b if (code >> e) & 1 else a for e, (a, b) in enumerate(G.edges)))

    def code(self, G: Graph) -> int:
        """Canonical encoding: bit e is set iff edge e points to its second endpoint."""
        c = 0
        for e, h in enumerate(self.head):
            if h is None:
                raise GraphError(f"edge {e} is unoriented")
            if h == G.edges[e][1]:
                c |= 1 << e
        return c

    def is_total(self) -> bool:
        return all(h is not None for h in self.head)

    def tail(self, G: Graph, e: int) -> int:
        return G.other(e, self.head[e])


def check_orientation(G: Graph, sigma: Orientation) -> None:
    if len(sigma.head) != G.m:
        raise GraphError("orientation length does not match edge count")
    for e, h in enumerate(sigma.head):
        if h is not None and h not in G.edges[e]:
            raise GraphError(f"head of edge {e} is not one of its endpoints")


def _vertex(G: Graph, u: int) -> int:
    if not 0 <= u < G.n:
        raise GraphError(f"vertex {u} out of range 0..{G.n - 1}")
    return u


def degree(G: Graph, u: int) -> int:
    return len(G.adj[_vertex(G, u)])


def min_degree(G: Graph) -> int:
    if G.n == 0:
        raise GraphError("empty graph has no minimum degree")
    return min(G.degrees)


def require_min_degree(G: Graph, k: int = 3) -> None:
    if G.n == 0:
        raise MinDegreeError("graph has no vertices")
    d = min(G.degrees)
    if d < k:
        raise MinDegreeError(f"minimum degree is {d}; need at least {k}")


def is_sink(G: Graph, sigma: Orientation, u: int) -> bool:
    # an isolated vertex is a sink (empty conjunction)
    for e, _ in G.adj[_vertex(G, u)]:
        h = sigma.head[e]
        if h is None:
            raise GraphError(f"edge {e} incident to {u} is unoriented")
        if h != u:
            return False
    return True


def sinks(G: Graph, sigma: Orientation) -> set[int]:
    return {u for u in range(G.n) if is_sink(G, sigma, u)}


def vertex_set(G: Graph, S: Iterable[int]) -> frozenset[int]:
    out = frozenset(int(u) for u in S)
    for u in out:
        _vertex(G, u)
    return out


def components(G: Graph) -> list[list[int]]:
    seen = [False] * G.n
    comps = []
    for s in range(G.n):
        if seen[s]:
            continue
        seen[s] = True
        stack, comp = [s], []
        while stack:
            u = stack.pop()
            comp.append(u)
            for _, w in G.adj[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(comp)
    return comps


def omega_empty(G: Graph, S: Iterable[int]) -> bool:
    """True iff no orientation leaves every vertex of S with an out-edge.

    That happens exactly when some connected component lies inside S and is a
    tree: a tree on k vertices has k-1 edges, one short of giving each vertex
    an out-edge, while any component containing a cycle or a vertex outside S
    can be oriented towards the cycle or that vertex.
    """
    S = vertex_set(G, S)
    for comp in components(G):
        if all(u in S for u in comp):
            m_comp = sum(len(G.adj[u]) for u in comp) // 2
            if m_comp == len(comp) - 1:
                return True
    return False


# -- edge-list text format ----------------------------------------------------

def parse_graph(text: str | bytes) -> Graph:
    if isinstance(text, bytes):
        text = text.decode()
    n = m = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise GraphFormatError(lineno, "duplicate header")
            if len(parts) != 3:
                raise GraphFormatError(lineno, "header must be 'p <n> <m>'")
            try:
                n, m = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphFormatError(lineno, "non-integer header field") from None
            if n < 0 or m < 0:
                raise GraphFormatError(lineno, "negative header field")
        elif parts[0] == "e":
            if n is None:
                raise GraphFormatError(lineno, "edge before header")
            if len(parts) != 3:
                raise GraphFormatError(lineno, "edge must be 'e <u> <v>'")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphFormatError(lineno, "non-integer vertex id") from None
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(lineno, f"vertex id out of range 0..{n - 1}")
            if u == v:
                raise GraphFormatError(lineno, f"self-loop at vertex {u}")
            if len(edges) == m:
                raise GraphFormatError(lineno, f"more than {m} edges")
            edges.append((u, v))
        else:
            raise GraphFormatError(lineno, f"unknown record type {parts[0]!r}")
    if n is None:
        raise GraphFormatError(0, "missing header")
    if len(edges) != m:
        raise GraphFormatError(0, f"header declares {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def serialize_graph(G: Graph) -> str:
    lines = [f"p {G.n} {G.m}"]
    lines += [f"e {a} {b}" for a, b in G.edges]
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    with open(path, "rb") as fh:
        return parse_graph(fh.read())


# -- named families -------------------------------------------------------------

def complete_graph(k: int) -> Graph:
    return Graph.from_edges(k, [(i, j) for i in range(k) for j in range(i + 1, k)])


def cycle_graph(k: int) -> Graph:
    return Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)])


def path_graph(k: int) -> Graph:
    return Graph.from_edges(k, [(i, i + 1) for i in range(k - 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def hypercube(d: int) -> Graph:
    n = 1 << d
    return Graph.from_edges(n, [(u, u ^ (1 << k)) for u in range(n) for k in range(d) if u < u ^ (1 << k)])


def wheel_graph(k: int) -> Graph:
    """Rim cycle on vertices 0..k-1 plus hub k joined to every rim vertex."""
    rim = [(i, (i + 1) % k) for i in range(k)]
    return Graph.from_edges(k + 1, rim + [(i, k) for i in range(k)])
