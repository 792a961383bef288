"""Compiled hot loops.

Each kernel is a line-for-line port of a reference implementation in
:mod:`sinkfree.prs`, :mod:`sinkfree.local` or :mod:`sinkfree.fastsampler`
and consumes the same ``(seed, edge, index)`` table bits, so for a given seed
it returns exactly what the reference returns. The test suite holds them to
that.

State is packed per edge and per vertex into 32-byte int32 rows,
because the walks touch edges and vertices at random and on large graphs the
cost is dominated by cache misses. Per-call marks (visited, on-path, table
counters) are stamped with a call id instead of being cleared, which keeps a
local run's cost proportional to the edges it touches.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .table import BLOCK_MUL, EDGE_MUL, GOLDEN

_G = np.uint64(GOLDEN)
_EM = np.uint64(EDGE_MUL)
_BM = np.uint64(BLOCK_MUL)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_ONE = np.uint64(1)

# edge row columns
VIS, HEAD, IDX, TAG, LIVE, EA, EB = 0, 1, 2, 3, 4, 5, 6
# vertex row columns
INP, INS, RDEG, CUR, P0, P1, OUTD = 0, 1, 2, 3, 4, 5, 6
STAMP_LIMIT = 2**31 - 1


@njit(cache=True)
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _C1
    z = (z ^ (z >> np.uint64(27))) * _C2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _key(seed):
    return _mix(seed ^ _G)


@njit(cache=True)
def _child(h, p):
    return _mix(h + np.uint64(p + 1) * _EM)


@njit(cache=True)
def _bit(key, e, i):
    h = _mix(key + np.uint64(e + 1) * _EM)
    h = _mix(h + np.uint64((i >> 6) + 1) * _BM)
    return np.int64((h >> np.uint64(i & 63)) & _ONE)


@njit(cache=True)
def _draw(key, tid, es, e):
    # table counters are reset lazily when a new table id shows up
    if es[e, TAG] != tid:
        es[e, TAG] = tid
        es[e, IDX] = 0
    i = es[e, IDX]
    es[e, IDX] = i + 1
    return _bit(key, e, i)


@njit(cache=True)
def _reveal(key, tid, es, e):
    return es[e, EB] if _draw(key, tid, es, e) == 1 else es[e, EA]


class Workspace:
    """Packed graph plus scratch state; reusable across runs on the same graph.

    All rows live in one int32 buffer, cut at 64-byte boundaries, so that on
    large graphs the allocation is big enough to be backed by huge pages.
    """

    def __init__(self, G):
        ptr, adj_e, adj_o, ea, eb = G.csr
        self.n, self.m = G.n, G.m
        me, nv = max(G.m, 1), max(G.n, 1)
        sizes = [me * 8, nv * 8, 4 * me, G.n + 2]
        spans = [(k + 15) // 16 * 16 for k in sizes]
        buf = np.zeros(sum(spans) + 16, dtype=np.int32)
        pos = (-(buf.ctypes.data // 4)) % 16
        parts = []
        for k, span in zip(sizes, spans):
            parts.append(buf[pos:pos + k])
            pos += span
        self._buf = buf
        self.es = parts[0].reshape(me, 8)
        self.vs = parts[1].reshape(nv, 8)
        self.adj = parts[2].reshape(2 * me, 2)
        self.P = parts[3]
        self.es[:G.m, EA] = ea
        self.es[:G.m, EB] = eb
        self.es[:, LIVE] = 1
        self.vs[:G.n, P0] = ptr[:-1]
        self.vs[:G.n, P1] = ptr[1:]
        self.adj[:2 * G.m, 0] = adj_e
        self.adj[:2 * G.m, 1] = adj_o
        # [call stamp, table id]
        self.ctr = np.zeros(2, dtype=np.int64)

    def reserve(self, calls):
        """Make room for ``calls`` more stamps in the int32 state; clears marks if needed."""
        if self.ctr.max() + calls >= STAMP_LIMIT:
            if calls >= STAMP_LIMIT:
                raise ValueError("too many runs for one kernel call; split the batch")
            self.es[:, [VIS, IDX, TAG]] = 0
            self.vs[:, INP] = 0
            self.ctr[:] = 0

    def set_S(self, S):
        self.vs[:, INS] = 0
        for u in S:
            self.vs[u, INS] = 1

    def args(self):
        return self.es, self.vs, self.adj, self.P, self.ctr


# -- sink popping ----------------------------------------------------------------

@njit(cache=True)
def _prs_run(es, vs, adj, n, m, key, tid, highest):
    for e in range(m):
        es[e, HEAD] = _reveal(key, tid, es, e)
    for u in range(n):
        vs[u, OUTD] = 0
    for e in range(m):
        t = es[e, EB] if es[e, HEAD] == es[e, EA] else es[e, EA]
        vs[t, OUTD] += 1
    events = 0
    while True:
        u = -1
        if highest:
            for x in range(n - 1, -1, -1):
                if vs[x, INS] == 1 and vs[x, OUTD] == 0:
                    u = x
                    break
        else:
            for x in range(n):
                if vs[x, INS] == 1 and vs[x, OUTD] == 0:
                    u = x
                    break
        if u < 0:
            return events
        events += 1
        for k in range(vs[u, P0], vs[u, P1]):
            e = adj[k, 0]
            old_t = es[e, EB] if es[e, HEAD] == es[e, EA] else es[e, EA]
            es[e, HEAD] = _reveal(key, tid, es, e)
            new_t = es[e, EB] if es[e, HEAD] == es[e, EA] else es[e, EA]
            vs[old_t, OUTD] -= 1
            vs[new_t, OUTD] += 1


@njit(cache=True)
def _prs_batch(es, vs, adj, P, ctr, n, m, base, count, highest, codes, events):
    for r in range(count):
        ctr[1] += 1
        key = _key(_child(base, r))
        events[r] = _prs_run(es, vs, adj, n, m, key, ctr[1], highest)
        c = np.int64(0)
        for e in range(m):
            if es[e, HEAD] == es[e, EB]:
                c |= np.int64(1) << e
        codes[r] = c


def prs_batch(G, S, base, count, rule="lowest", ws=None):
    """Run ``count`` sink-popping draws; run r uses table seed derive(base, r).

    Returns (orientation codes, resample event counts). Needs m <= 62.
    """
    if G.m > 62:
        raise ValueError("batch codes need m <= 62")
    ws = ws or Workspace(G)
    ws.reserve(count)
    ws.set_S(S)
    codes = np.zeros(count, dtype=np.int64)
    events = np.zeros(count, dtype=np.int64)
    _prs_batch(*ws.args(), G.n, G.m, np.uint64(base), count, rule == "highest", codes, events)
    return codes, events


# -- local vertex sampler ------------------------------------------------------------

@njit(cache=True)
def _vertex_run(es, vs, adj, P, v, key, tid, max_steps, stamp):
    plen = 1
    P[0] = v
    vs[v, INP] = stamp
    steps = 0
    while plen >= 1:
        u = P[plen - 1]
        if plen >= 2 and vs[u, INS] == 0:
            return 1, steps
        first = -1
        for k in range(vs[u, P0], vs[u, P1]):
            if es[adj[k, 0], VIS] != stamp:
                first = k
                break
        if first < 0:
            for k in range(vs[u, P0], vs[u, P1]):
                es[adj[k, 0], VIS] = 0
            vs[u, INP] = 0
            plen -= 1
            continue
        if max_steps >= 0 and steps >= max_steps:
            return 1, steps
        e = adj[first, 0]
        w = adj[first, 1]
        es[e, VIS] = stamp
        h = _reveal(key, tid, es, e)
        es[e, HEAD] = h
        steps += 1
        if h == w:
            if vs[w, INP] == stamp:
                return 1, steps
            for k in range(vs[w, P0], vs[w, P1]):
                f = adj[k, 0]
                if es[f, VIS] == stamp and es[f, HEAD] != w and vs[adj[k, 1], INP] == stamp:
                    return 1, steps
            P[plen] = w
            vs[w, INP] = stamp
            plen += 1
    return 0, steps


@njit(cache=True)
def _vertex_batch(es, vs, adj, P, ctr, v, base, count, max_steps, xs, steps):
    for r in range(count):
        ctr[0] += 1
        ctr[1] += 1
        key = _key(_child(base, r))
        x, s = _vertex_run(es, vs, adj, P, v, key, ctr[1], max_steps, ctr[0])
        xs[r] = x
        steps[r] = s


def vertex_batch(G, S, v, base, count, max_steps=-1, ws=None):
    """``count`` local vertex samples; run r uses table seed derive(base, r).

    ``max_steps < 0`` means no truncation. Returns (x array, coin-step array).
    """
    ws = ws or Workspace(G)
    ws.reserve(count)
    ws.set_S(S)
    xs = np.zeros(count, dtype=np.int8)
    steps = np.zeros(count, dtype=np.int64)
    _vertex_batch(*ws.args(), v, np.uint64(base), count, max_steps, xs, steps)
    return xs, steps


# -- local edge sampler ------------------------------------------------------------

@njit(cache=True)
def _edge_run(es, vs, adj, P, e0, key, tid, max_steps, stamp):
    a0 = es[e0, EA]
    b0 = es[e0, EB]
    steps = 0
    plen = 0
    last = b0
    while True:
        if plen == 0:
            if max_steps >= 0 and steps >= max_steps:
                return last, steps, True
            h = _reveal(key, tid, es, e0)
            t = a0 if h == b0 else b0
            es[e0, VIS] = stamp
            es[e0, HEAD] = h
            last = h
            P[0] = t
            P[1] = h
            vs[t, INP] = stamp
            vs[h, INP] = stamp
            plen = 2
            steps += 1
        u = P[plen - 1]
        if vs[u, INS] == 0:
            return P[1], steps, False
        first = -1
        for k in range(vs[u, P0], vs[u, P1]):
            f = adj[k, 0]
            if es[f, LIVE] == 1 and es[f, VIS] != stamp:
                first = k
                break
        if first < 0:
            for k in range(vs[u, P0], vs[u, P1]):
                es[adj[k, 0], VIS] = 0
            vs[u, INP] = 0
            plen -= 1
            if plen == 1:
                vs[P[0], INP] = 0
                plen = 0
            continue
        if max_steps >= 0 and steps >= max_steps:
            return P[1], steps, True
        e = adj[first, 0]
        w = adj[first, 1]
        es[e, VIS] = stamp
        h = _reveal(key, tid, es, e)
        es[e, HEAD] = h
        steps += 1
        if h == w:
            if vs[w, INP] == stamp:
                return P[1], steps, False
            for k in range(vs[w, P0], vs[w, P1]):
                f = adj[k, 0]
                if (es[f, LIVE] == 1 and es[f, VIS] == stamp and es[f, HEAD] != w
                        and vs[adj[k, 1], INP] == stamp):
                    return P[1], steps, False
            P[plen] = w
            vs[w, INP] = stamp
            plen += 1


@njit(cache=True)
def _edge_batch(es, vs, adj, P, ctr, e0, base, count, max_steps, out, steps):
    for r in range(count):
        ctr[0] += 1
        ctr[1] += 1
        key = _key(_child(base, r))
        h, s, _ = _edge_run(es, vs, adj, P, e0, key, ctr[1], max_steps, ctr[0])
        out[r] = h
        steps[r] = s


def edge_batch(G, S, e0, base, count, max_steps=-1, ws=None):
    """``count`` local edge samples; returns (head vertex array, coin-step array)."""
    ws = ws or Workspace(G)
    ws.reserve(count)
    ws.set_S(S)
    ws.es[:, LIVE] = 1
    out = np.zeros(count, dtype=np.int64)
    steps = np.zeros(count, dtype=np.int64)
    _edge_batch(*ws.args(), e0, np.uint64(base), count, max_steps, out, steps)
    return out, steps


# -- sequential fast sampler -----------------------------------------------------------

@njit(cache=True)
def _fast_run(es, vs, adj, P, ctr, n, m, key, tid, budget, out_head, stats):
    """stats: [d2 violations, truncations, edge samples, forced edges, coin steps]."""
    for e in range(m):
        es[e, LIVE] = 1
    deg2_count = 0
    deg2_sum = 0
    for u in range(n):
        vs[u, INS] = 1
        vs[u, RDEG] = vs[u, P1] - vs[u, P0]
        vs[u, CUR] = vs[u, P0]
        if vs[u, RDEG] == 2:
            deg2_count += 1
            deg2_sum += u
    n_live_S = n
    lowest = 0
    focus = -1
    last_head = -1
    while n_live_S > 0:
        if last_head >= 0 and vs[last_head, INS] == 1:
            focus = last_head
        else:
            while vs[lowest, INS] == 0:
                lowest += 1
            focus = lowest
        while True:
            if vs[focus, RDEG] == 0:
                # unreachable when min degree >= 3
                stats[0] += 1
                vs[focus, INS] = 0
                n_live_S -= 1
                last_head = -1
                break
            # lowest live edge at the focus
            while es[adj[vs[focus, CUR], 0], LIVE] == 0:
                vs[focus, CUR] += 1
            e = adj[vs[focus, CUR], 0]
            a = es[e, EA]
            b = es[e, EB]
            if vs[focus, RDEG] == 1:
                h = adj[vs[focus, CUR], 1]
                stats[3] += 1
            else:
                if deg2_count > 1 or (deg2_count == 1 and deg2_sum != a and deg2_sum != b):
                    stats[0] += 1
                ctr[0] += 1
                h, s, cut = _edge_run(es, vs, adj, P, e, key, tid, budget, ctr[0])
                stats[2] += 1
                stats[4] += s
                if cut:
                    stats[1] += 1
            t = a if h == b else b
            out_head[e] = h
            es[e, LIVE] = 0
            for x in (a, b):
                if vs[x, INS] == 1 and vs[x, RDEG] == 2:
                    deg2_count -= 1
                    deg2_sum -= x
                vs[x, RDEG] -= 1
                if vs[x, INS] == 1 and vs[x, RDEG] == 2:
                    deg2_count += 1
                    deg2_sum += x
            if vs[t, INS] == 1:
                vs[t, INS] = 0
                n_live_S -= 1
                if vs[t, RDEG] == 2:
                    deg2_count -= 1
                    deg2_sum -= t
            if t == focus:
                last_head = h
                break
    for e in range(m):
        if es[e, LIVE] == 1:
            out_head[e] = _reveal(key, tid, es, e)


@njit(cache=True)
def _fast_batch(es, vs, adj, P, ctr, n, m, base, count, budget, codes, stats):
    out_head = np.zeros(m, dtype=np.int64)
    for r in range(count):
        ctr[1] += 1
        key = _key(_child(base, r))
        _fast_run(es, vs, adj, P, ctr, n, m, key, ctr[1], budget, out_head, stats)
        c = np.int64(0)
        for e in range(m):
            if out_head[e] == es[e, EB]:
                c |= np.int64(1) << e
        codes[r] = c


def fast_single(G, seed, budget, ws=None):
    """One fast-sampler run with table seed ``seed``; returns (heads, stats)."""
    from .table import table_key

    ws = ws or Workspace(G)
    ws.reserve(G.m + 1)
    out_head = np.zeros(G.m, dtype=np.int64)
    stats = np.zeros(5, dtype=np.int64)
    ws.ctr[1] += 1
    _fast_run(*ws.args(), G.n, G.m, np.uint64(table_key(seed)), ws.ctr[1], budget, out_head, stats)
    return out_head, stats


def fast_batch(G, base, count, budget, ws=None):
    """``count`` fast-sampler draws; returns (orientation codes, summed stats)."""
    if G.m > 62:
        raise ValueError("batch codes need m <= 62")
    ws = ws or Workspace(G)
    ws.reserve(count * (G.m + 1))
    codes = np.zeros(count, dtype=np.int64)
    stats = np.zeros(5, dtype=np.int64)
    _fast_batch(*ws.args(), G.n, G.m, np.uint64(base), count, budget, codes, stats)
    return codes, stats


# -- product estimator -------------------------------------------------------------

@njit(cache=True)
def _fpras_counts(es, vs, adj, P, ctr, n, order, base, replicas, inner, max_steps, counts):
    for r in range(replicas):
        hr = _child(base, r)
        for u in range(n):
            vs[u, INS] = 0
        for i in range(n):
            v = order[i]
            hi = _child(hr, i)
            k = 0
            for t in range(inner):
                ctr[0] += 1
                ctr[1] += 1
                key = _key(_child(hi, t))
                x, s = _vertex_run(es, vs, adj, P, v, key, ctr[1], max_steps, ctr[0])
                k += x
            counts[r, i] = k
            vs[v, INS] = 1


def fpras_counts(G, order, base, replicas, inner, max_steps, ws=None):
    """counts[r, i] = number of 1s among ``inner`` truncated samples for vertex order[i]
    under S = order[:i], replica r; sample t uses table seed derive(base, r, i, t)."""
    ws = ws or Workspace(G)
    ws.reserve(replicas * G.n * inner)
    counts = np.zeros((replicas, G.n), dtype=np.int64)
    _fpras_counts(*ws.args(), G.n, np.asarray(order, dtype=np.int64),
                  np.uint64(base), replicas, inner, max_steps, counts)
    return counts
