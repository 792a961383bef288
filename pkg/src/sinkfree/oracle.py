"""Exhaustive reference answers: counts, marginals and the independence polynomial.

Everything here is exact (ints and Fractions) and exponential in m or n, so
the caps are arguments rather than constants.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable

import numpy as np

from .graph import Graph, GraphError, Orientation, vertex_set
from .prs import EmptySupportError

BRUTE_CAP = 25
SHEARER_CAP = 20
_CHUNK = 1 << 20


class CapExceeded(GraphError):
    pass


EmptySupport = EmptySupportError


def _check_cap(G: Graph, cap: int):
    if G.m > cap:
        raise CapExceeded(f"m = {G.m} exceeds the brute-force cap {cap}")


def _vertex_masks(G: Graph):
    # u is a sink iff every edge with u as second endpoint has its bit set and
    # every edge with u as first endpoint has it clear
    amask = [0] * G.n
    bmask = [0] * G.n
    for e, (a, b) in enumerate(G.edges):
        amask[a] |= 1 << e
        bmask[b] |= 1 << e
    return amask, bmask


def _chunks(m: int):
    total = 1 << m
    for start in range(0, total, _CHUNK):
        yield np.arange(start, min(total, start + _CHUNK), dtype=np.int64)


def _sink_masks(G: Graph, codes: np.ndarray) -> np.ndarray:
    """Bitmask over vertices of the sinks of each orientation code."""
    amask, bmask = _vertex_masks(G)
    out = np.zeros(codes.shape, dtype=np.int64)
    for u in range(G.n):
        sink = ((codes & amask[u]) == 0) & ((codes & bmask[u]) == bmask[u])
        out |= sink.astype(np.int64) << u
    return out


def _smask(S) -> int:
    return sum(1 << u for u in S)


def sink_histogram(G: Graph, cap: int = BRUTE_CAP) -> np.ndarray:
    """hist[X] = number of orientations whose sink set is exactly X."""
    _check_cap(G, cap)
    if G.n > 24:
        raise CapExceeded("sink histogram needs n <= 24")
    hist = np.zeros(1 << G.n, dtype=np.int64)
    for codes in _chunks(G.m):
        hist += np.bincount(_sink_masks(G, codes), minlength=1 << G.n)
    return hist


def count_table(G: Graph, cap: int = BRUTE_CAP) -> np.ndarray:
    """table[S] = |Omega_S| for every vertex subset S (as a bitmask)."""
    hist = sink_histogram(G, cap)
    # |Omega_S| = sum over sink sets X disjoint from S = subset sums over the complement
    f = hist.copy()
    for u in range(G.n):
        bit = 1 << u
        idx = np.arange(1 << G.n)
        sel = (idx & bit) != 0
        f[sel] += f[idx[sel] ^ bit]
    full = (1 << G.n) - 1
    return f[full ^ np.arange(1 << G.n)]


def count_sfo_bruteforce(G: Graph, S: Iterable[int], cap: int = BRUTE_CAP) -> int:
    """Number of orientations with no sink in S."""
    S = vertex_set(G, S)
    _check_cap(G, cap)
    sm = _smask(S)
    total = 0
    for codes in _chunks(G.m):
        total += int(np.count_nonzero((_sink_masks(G, codes) & sm) == 0))
    return total


def _require_nonempty(count, S):
    if count == 0:
        raise EmptySupport(f"no orientation avoids sinks in S = {sorted(S)}")


def marginal_bruteforce(G: Graph, S: Iterable[int], v: int, cap: int = BRUTE_CAP) -> Fraction:
    """Probability that v is not a sink under the uniform S-sink-free orientation."""
    S = vertex_set(G, S)
    if v in S:
        raise GraphError(f"vertex {v} lies in S")
    base = count_sfo_bruteforce(G, S, cap)
    _require_nonempty(base, S)
    return Fraction(count_sfo_bruteforce(G, S | {v}, cap), base)


def edge_marginal_bruteforce(G: Graph, S: Iterable[int], e: int, cap: int = BRUTE_CAP) -> Fraction:
    """Probability that edge e points from its first endpoint to its second."""
    S = vertex_set(G, S)
    _check_cap(G, cap)
    if not 0 <= e < G.m:
        raise GraphError(f"edge {e} out of range")
    sm = _smask(S)
    tot = fwd = 0
    for codes in _chunks(G.m):
        ok = (_sink_masks(G, codes) & sm) == 0
        tot += int(np.count_nonzero(ok))
        fwd += int(np.count_nonzero(ok & (((codes >> e) & 1) == 1)))
    _require_nonempty(tot, S)
    return Fraction(fwd, tot)


def sfo_codes(G: Graph, S: Iterable[int], cap: int = 22) -> np.ndarray:
    """Sorted codes of all S-sink-free orientations."""
    S = vertex_set(G, S)
    _check_cap(G, cap)
    sm = _smask(S)
    parts = [codes[(_sink_masks(G, codes) & sm) == 0] for codes in _chunks(G.m)]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def distribution_bruteforce(G: Graph, S: Iterable[int], cap: int = 22) -> dict:
    """Uniform distribution on S-sink-free orientations, keyed by orientation code."""
    codes = sfo_codes(G, S, cap)
    _require_nonempty(len(codes), vertex_set(G, S))
    p = Fraction(1, len(codes))
    return {int(c): p for c in codes}


def orientation_distribution(G: Graph, S: Iterable[int], cap: int = 22) -> dict:
    return {Orientation.from_code(G, c): p for c, p in distribution_bruteforce(G, S, cap).items()}


# -- independence polynomial -------------------------------------------------------------

def sfo_weights(G: Graph) -> list[Fraction]:
    """p_u = 2^-d(u): probability that u is a sink when every edge is a fair coin."""
    return [Fraction(1, 1 << d) for d in G.degrees]


def _closed_nbr_masks(G: Graph) -> list[int]:
    return [(1 << u) | _smask(G.neighbours(u)) for u in range(G.n)]


def _check_weights(w, n):
    if len(w) != n:
        raise ValueError("weight vector length must equal n")
    w = [Fraction(x) for x in w]
    if any(x < 0 or x > 1 for x in w):
        raise ValueError("weights must lie in [0, 1]")
    return w


def _q_solver(G: Graph, w):
    nbr = _closed_nbr_masks(G)

    @lru_cache(maxsize=None)
    def q(J: int) -> Fraction:
        if J == 0:
            return Fraction(1)
        u = (J & -J).bit_length() - 1  # lowest vertex of J
        return q(J & ~(1 << u)) - w[u] * q(J & ~nbr[u])

    return q


def q_poly(G: Graph, w, J: Iterable[int] | None = None) -> Fraction:
    """Sum over independent I inside J of (-1)^|I| prod w_u, by the deletion recurrence."""
    w = _check_weights(w, G.n)
    J = range(G.n) if J is None else vertex_set(G, J)
    return _q_solver(G, w)(_smask(J))


def q_poly_direct(G: Graph, w, J: Iterable[int] | None = None) -> Fraction:
    """Same value by listing independent sets; for cross-checks on small graphs."""
    w = _check_weights(w, G.n)
    J = sorted(range(G.n) if J is None else vertex_set(G, J))
    nbr = [G.neighbours(u) for u in range(G.n)]
    total = Fraction(0)
    for k in range(len(J) + 1):
        for I in combinations(J, k):
            if any(b in nbr[a] for a, b in combinations(I, 2)):
                continue
            term = Fraction((-1) ** k)
            for u in I:
                term *= w[u]
            total += term
    return total


def shearer_membership(G: Graph, w, cap: int = SHEARER_CAP) -> bool:
    """True iff q_J(-w) > 0 for every subset J of V."""
    if G.n > cap:
        raise CapExceeded(f"n = {G.n} exceeds the subset cap {cap}")
    w = _check_weights(w, G.n)
    q = _q_solver(G, w)
    return all(q(J) > 0 for J in range(1 << G.n))


def verify_pj_qj(G: Graph, J: Iterable[int], cap: int = BRUTE_CAP) -> bool:
    """|Omega_J| / 2^m equals q_J(-p) with p_u = 2^-d(u)."""
    J = vertex_set(G, J)
    lhs = Fraction(count_sfo_bruteforce(G, J, cap), 1 << G.m)
    return lhs == q_poly(G, sfo_weights(G), J)


def telescoping_product(G: Graph, order=None, cap: int = BRUTE_CAP) -> Fraction:
    """2^m times the product of exact marginals along ``order``."""
    order = list(range(G.n)) if order is None else list(order)
    table = count_table(G, cap)
    out = Fraction(1 << G.m)
    S = 0
    for v in order:
        out *= Fraction(int(table[S | (1 << v)]), int(table[S]))
        S |= 1 << v
    return out


__all__ = [
    "BRUTE_CAP", "CapExceeded", "EmptySupport", "count_sfo_bruteforce", "count_table",
    "distribution_bruteforce", "edge_marginal_bruteforce", "marginal_bruteforce",
    "orientation_distribution", "q_poly", "q_poly_direct", "sfo_codes", "sfo_weights",
    "shearer_membership", "sink_histogram", "telescoping_product", "verify_pj_qj",
]
