"""Checks on vertex-sampler traces."""

from __future__ import annotations

from fractions import Fraction

from ..local import TraceRecord

_C_VALUES = (Fraction(0), Fraction(1, 2))


class MalformedTrace(ValueError):
    pass


def check_bookkeeping(tr: TraceRecord) -> None:
    """Y_0 = X_0 and Y_i = X_i - X_{i-1} + Y_{i-1} - c_i with c_i in {0, 1/2}."""
    if not tr.X:
        return
    if len(tr.Y) != len(tr.X) or len(tr.c) != len(tr.X) - 1:
        raise MalformedTrace("X, Y, c lengths disagree")
    if tr.Y[0] != tr.X[0]:
        raise MalformedTrace("Y_0 differs from X_0")
    for i in range(1, len(tr.X)):
        if tr.c[i - 1] not in _C_VALUES:
            raise MalformedTrace(f"c_{i} = {tr.c[i - 1]} is not 0 or 1/2")
        if tr.Y[i] != tr.X[i] - tr.X[i - 1] + tr.Y[i - 1] - tr.c[i - 1]:
            raise MalformedTrace(f"Y_{i} does not follow the update rule")


def audit_trace(tr: TraceRecord) -> bool:
    """True iff the bookkeeping is consistent and X_i - Y_i >= i/4 at every step."""
    check_bookkeeping(tr)
    return tr.drift_ok()


def synthetic_trace(c_values) -> TraceRecord:
    """A trace with the given c sequence and a path that only grows."""
    tr = TraceRecord([1], [Fraction(1)], [])
    for c in c_values:
        c = Fraction(c)
        x = tr.X[-1] + 1
        tr.c.append(c)
        tr.Y.append(x - tr.X[-1] + tr.Y[-1] - c)
        tr.X.append(x)
    return tr
