"""Finite halfspace families that realise every corrupted labelling of a point set.

For a direction ``u`` the corrupted label of point ``x_i`` under ``(u, b)`` only
depends on where ``b`` sits relative to the breakpoints ``-u.x_i -/+ eps*||u||_q``.
Sweeping ``b`` across the sorted breakpoints therefore visits every pattern
available in that direction.  The order of the breakpoints changes only where
``u.(x_j - x_i)`` equals ``0`` or ``+/-2 eps ||u||_q``; every pattern is cut out
by strict inequalities, so it survives on an open arc of directions, and one
direction strictly inside each arc between consecutive critical angles is
enough (d <= 2).  With ``eps = 0`` the same sweep yields the classic
dichotomies.

Arithmetic is done on integers after clearing denominators; directions come
from Pythagorean triples so that ``||u||_2`` stays an integer.
"""

from __future__ import annotations

import itertools
import math
import warnings
from fractions import Fraction
from functools import reduce

import numpy as np

from .geometry import INF, dual_exponent

TWO_PI = 2.0 * math.pi
_MERGE = 1e-12


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def integerize(points, epsilon):
    """Scale points and epsilon by a common denominator ``D``; returns ``(X, E, D)``."""
    dens = [c.denominator for x in points for c in x] + [Fraction(epsilon).denominator]
    D = reduce(_lcm, dens, 1)
    X = [tuple(int(c * D) for c in x) for x in points]
    return X, int(Fraction(epsilon) * D), D


def _int_norm(u, qexp) -> int:
    if qexp == 1:
        return sum(abs(v) for v in u)
    if qexp == INF:
        return max(abs(v) for v in u)
    sq = sum(v * v for v in u)
    root = math.isqrt(sq)
    if root * root != sq:
        raise ValueError("direction norm is not an integer")
    return root


def _pieces(qexp):
    """Angular pieces on which ``||(cos t, sin t)||_q`` is a linear form ``s1 cos + s2 sin``."""
    h = math.pi / 2
    if qexp == 1:
        return [(k * h, (k + 1) * h, (1 if k in (0, 3) else -1, 1 if k in (0, 1) else -1))
                for k in range(4)]
    if qexp == INF:
        quarter = math.pi / 4
        return [
            (-quarter, quarter, (1, 0)),
            (quarter, 3 * quarter, (0, 1)),
            (3 * quarter, 5 * quarter, (-1, 0)),
            (5 * quarter, 7 * quarter, (0, -1)),
        ]
    return None


def _wrap(theta):
    return theta % TWO_PI


def critical_angles(points, epsilon, p) -> list[float]:
    """Angles where two breakpoints of some pair of points coincide (planar points)."""
    qexp = dual_exponent(p)
    eps2 = 2.0 * float(epsilon)
    offsets = [0.0] if eps2 == 0 else [0.0, eps2, -eps2]
    pts = [(float(x[0]), float(x[1])) for x in points]
    pieces = _pieces(qexp)
    angles = []
    if pieces:
        angles.extend(_wrap(lo) for lo, _, _ in pieces)
    for (x1, y1), (x2, y2) in itertools.combinations(pts, 2):
        dx, dy = x2 - x1, y2 - y1
        if dx == 0 and dy == 0:
            continue
        for c in offsets:
            if pieces is None:
                radius = math.hypot(dx, dy)
                if abs(c) > radius:
                    continue
                phi = math.atan2(dy, dx)
                spread = math.acos(max(-1.0, min(1.0, c / radius)))
                angles.extend((_wrap(phi + spread), _wrap(phi - spread)))
                continue
            for lo, hi, (s1, s2) in pieces:
                a, b = dx - c * s1, dy - c * s2
                if a == 0 and b == 0:
                    continue
                base = math.atan2(-a, b)
                for theta in (base, base + math.pi):
                    # bring theta into [lo, hi] modulo 2pi
                    shifted = lo + ((theta - lo) % TWO_PI)
                    if shifted <= hi + 1e-15:
                        angles.append(_wrap(shifted))
    angles.sort()
    merged = []
    for a in angles:
        if not merged or a - merged[-1] > _MERGE:
            merged.append(a)
    if len(merged) > 1 and merged[0] + TWO_PI - merged[-1] <= _MERGE:
        merged.pop()
    return merged


def _direction_in_arc(lo: float, hi: float) -> tuple[int, int]:
    """Integer Pythagorean direction strictly inside the arc ``(lo, hi)`` (hi may exceed 2pi)."""
    mid = 0.5 * (lo + hi)
    flip = False
    half = _wrap(mid)
    if half > math.pi:
        half -= TWO_PI
    if abs(half) > math.pi / 2:
        flip = True
        half = half - math.pi if half > 0 else half + math.pi
    t = math.tan(half / 2.0)
    exact = Fraction(t)
    for limit in (100, 10_000, 1_000_000, 10**9, None):
        tr = exact if limit is None else exact.limit_denominator(limit)
        angle = 2.0 * math.atan(float(tr)) + (math.pi if flip else 0.0)
        # distance from mid along the circle
        gap = (angle - mid + math.pi) % TWO_PI - math.pi
        if abs(gap) < 0.5 * (hi - lo) - 1e-13 or limit is None:
            break
    a, b = tr.numerator, tr.denominator
    u = (b * b - a * a, 2 * a * b)
    if flip:
        u = (-u[0], -u[1])
    g = math.gcd(*u)
    return (u[0] // g, u[1] // g)


def planar_directions(points, epsilon, p) -> list[tuple[int, int]]:
    angles = critical_angles(points, epsilon, p)
    if len(angles) < 2:
        angles = sorted(set(angles) | {0.0, TWO_PI / 3, 2 * TWO_PI / 3})
    dirs = []
    for k, lo in enumerate(angles):
        hi = angles[k + 1] if k + 1 < len(angles) else angles[0] + TWO_PI
        dirs.append(_direction_in_arc(lo, hi))
    return list(dict.fromkeys(dirs))


def _heuristic_directions(X, d, count=256, seed=0):
    """Directions for d >= 3: normals of hyperplanes through d points, axes, random draws."""
    dirs = []
    for i in range(d):
        e = [0] * d
        e[i] = 1
        dirs.append(tuple(e))
        dirs.append(tuple(-v for v in e))
    for subset in itertools.combinations(range(len(X)), d):
        base = X[subset[0]]
        rows = [[a - b for a, b in zip(X[j], base)] for j in subset[1:]]
        normal = _null_vector(rows, d)
        if normal is not None:
            dirs.append(normal)
            dirs.append(tuple(-v for v in normal))
    rng = np.random.default_rng(seed)
    for v in rng.integers(-50, 51, size=(count, d)):
        if any(v):
            dirs.append(tuple(int(c) for c in v))
    return list(dict.fromkeys(dirs))


def _null_vector(rows, d):
    if not rows:
        return None
    m = [[Fraction(v) for v in r] for r in rows]
    pivots = []
    r = 0
    for c in range(d):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        m[r] = [v / m[r][c] for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(d) if c not in pivots]
    if not free:
        return None
    v = [Fraction(0)] * d
    v[free[0]] = Fraction(1)
    for i, c in enumerate(pivots):
        v[c] = -m[i][free[0]]
    den = reduce(_lcm, (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(math.gcd, ints, 0) or 1
    return tuple(x // g for x in ints)


def directions(points, epsilon, p):
    """``(integer directions, complete)`` for the integerized point set."""
    if not points:
        return [(1,)], True
    d = len(points[0])
    if d == 1:
        return [(1,), (-1,)], True
    if d == 2:
        return planar_directions(points, epsilon, p), True
    warnings.warn(
        f"halfspace pattern enumeration is exhaustive only for d <= 2 (got d={d}); "
        "using a heuristic direction set",
        RuntimeWarning,
        stacklevel=3,
    )
    return _heuristic_directions(points, d), False


def sweep_patterns(points, epsilon, p):
    """Map every reachable corrupted pattern on ``points`` to a witness ``(weights, bias)``.

    ``points`` are tuples of Fractions.  Patterns are tuples over {-1, 0, +1}
    where 0 stands for the reject symbol.  Returns ``(patterns, complete)``.
    """
    X, E, D = integerize(points, epsilon)
    qexp = dual_exponent(p)
    dirs, complete = directions(X, Fraction(E), p)
    out: dict[tuple, tuple] = {}
    n = len(X)
    for u in dirs:
        try:
            r = E * _int_norm(u, qexp)
        except ValueError:
            _sweep_inexact(u, X, E, D, qexp, out)
            continue
        acts = [sum(a * b for a, b in zip(u, x)) for x in X]
        events = sorted(
            [(-a - r, i) for i, a in enumerate(acts)] + [(-a + r, i) for i, a in enumerate(acts)]
        )
        state = [0] * n
        distinct = sorted({v for v, _ in events})
        # nothing has fired while b sits at the smallest breakpoint
        out.setdefault(tuple(-1 for _ in range(n)), (u, Fraction(distinct[0], D)))
        k = 0
        for j, t in enumerate(distinct):
            while k < len(events) and events[k][0] == t:
                state[events[k][1]] += 1
                k += 1
            beta = distinct[j + 1] if j + 1 < len(distinct) else t + 1
            pattern = tuple(-1 if s == 0 else (0 if s == 1 else 1) for s in state)
            out.setdefault(pattern, (u, Fraction(beta, D)))
    return out, complete


def _sweep_inexact(u, X, E, D, qexp, out):
    """Irrational ``||u||_2``: probe biases between float breakpoints, label each exactly."""
    norm_sq = sum(v * v for v in u)
    acts = [sum(a * b for a, b in zip(u, x)) for x in X]
    r = E * math.sqrt(norm_sq)
    bps = sorted({-a - r for a in acts} | {-a + r for a in acts})
    probes = [bps[0] - 1.0] + [0.5 * (a + b) for a, b in zip(bps, bps[1:])] + [bps[-1] + 1.0]
    r_sq = E * E * norm_sq
    for beta_f in probes:
        beta = Fraction(beta_f)
        pattern = []
        for a in acts:
            act = a + beta
            if act > 0 and act * act > r_sq:
                pattern.append(1)
            elif act <= 0 and act * act >= r_sq:
                pattern.append(-1)
            else:
                pattern.append(0)
        out.setdefault(tuple(pattern), (u, beta / D))
