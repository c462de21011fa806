"""Exact two-phase simplex over Fractions (Bland's rule, so it never cycles).

Solves ``max c.z  s.t.  A z <= b, z >= 0`` for small dense systems.  Only the
feasibility machinery in :mod:`advpac.geometry` uses it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def _pivot(rows, rhs, basis, r, col):
    piv = rows[r][col]
    rows[r] = [v / piv for v in rows[r]]
    rhs[r] = rhs[r] / piv
    prow = rows[r]
    for i in range(len(rows)):
        if i == r:
            continue
        f = rows[i][col]
        if f:
            rows[i] = [a - f * p for a, p in zip(rows[i], prow)]
            rhs[i] -= f * rhs[r]
    basis[r] = col


def _optimize(rows, rhs, basis, cost, allowed):
    while True:
        entering = None
        for j in range(len(cost)):
            if not allowed[j] or j in basis:
                continue
            reduced = cost[j] - sum(cost[basis[i]] * rows[i][j] for i in range(len(rows)))
            if reduced > 0:
                entering = j
                break
        if entering is None:
            return OPTIMAL
        best = None
        for i, row in enumerate(rows):
            a = row[entering]
            if a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return UNBOUNDED
        _pivot(rows, rhs, basis, best[1], entering)


def maximize(c: Sequence, A: Sequence[Sequence], b: Sequence):
    """Return ``(status, value, z)``; ``value``/``z`` are None unless optimal."""
    m, n = len(A), len(c)
    zero, one = Fraction(0), Fraction(1)
    # columns: originals 0..n-1, slacks n..n+m-1, auxiliary n+m
    width = n + m + 1
    rows = [
        [Fraction(v) for v in A[i]] + [one if k == i else zero for k in range(m)] + [-one]
        for i in range(m)
    ]
    rhs = [Fraction(v) for v in b]
    basis = [n + i for i in range(m)]
    allowed = [True] * width
    aux = n + m

    if m and min(rhs) < 0:
        r = min(range(m), key=lambda i: (rhs[i], i))
        _pivot(rows, rhs, basis, r, aux)
        phase1 = [zero] * width
        phase1[aux] = -one
        _optimize(rows, rhs, basis, phase1, allowed)
        aux_value = next((rhs[i] for i in range(m) if basis[i] == aux), zero)
        if aux_value > 0:
            return INFEASIBLE, None, None
        if aux in basis:
            r = basis.index(aux)
            col = next((j for j in range(width - 1) if rows[r][j] != 0 and j not in basis), None)
            if col is not None:
                _pivot(rows, rhs, basis, r, col)
    allowed[aux] = False
    for i in range(m):
        rows[i][aux] = zero

    cost = [Fraction(v) for v in c] + [zero] * (m + 1)
    status = _optimize(rows, rhs, basis, cost, allowed)
    if status != OPTIMAL:
        return status, None, None
    z = [zero] * width
    for i, j in enumerate(basis):
        z[j] = rhs[i]
    value = sum((cost[j] * z[j] for j in range(n)), zero)
    return OPTIMAL, value, z[:n]
