"""Independent brute-force references used by the tests.

Nothing here imports the package's corruption or feasibility code: balls are
sampled on dense float grids and networks are evaluated with numpy.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def ball_samples(center, p, eps, min_points=10_000):
    """Dense sample of the closed l_p ball: a cube grid filtered to the ball plus boundary points.

    The pitch shrinks until at least ``min_points`` grid points fall inside.
    """
    center = np.asarray(center, dtype=float)
    d = center.size
    eps = float(eps)
    if eps == 0:
        return center[None, :]
    per_axis = max(3, int(math.ceil(min_points ** (1.0 / d))))
    while True:
        axis = np.linspace(-eps, eps, per_axis)
        cube = np.array(list(itertools.product(axis, repeat=d)))
        inside = cube[_norms(cube, p) <= eps * (1 + 1e-12)]
        if len(inside) >= min_points:
            break
        per_axis = int(per_axis * 1.3) + 1
    boundary = _boundary(d, p, eps)
    return center + np.vstack([inside, boundary])


def _norms(u, p):
    if p == math.inf or p == "inf":
        return np.max(np.abs(u), axis=1)
    return np.sum(np.abs(u) ** p, axis=1) ** (1.0 / p)


def _boundary(d, p, eps):
    pts = []
    if p in (math.inf, "inf"):
        pts.extend(itertools.product((-eps, eps), repeat=d))
    elif p == 1:
        for i in range(d):
            for s in (-eps, eps):
                v = [0.0] * d
                v[i] = s
                pts.append(v)
    else:
        rng = np.random.default_rng(0)
        g = rng.normal(size=(2000, d))
        pts.extend(eps * g / np.linalg.norm(g, axis=1, keepdims=True))
    return np.array(pts, dtype=float).reshape(-1, d)


def lipschitz_pitch(weights, p, eps, min_points=10_000):
    """Grid pitch used by :func:`ball_samples` and the activation change it can hide."""
    d = len(weights)
    per_axis = max(3, int(math.ceil(min_points ** (1.0 / d))))
    pitch = 2 * eps / (per_axis - 1)
    # moving at most pitch/2 per coordinate changes w.x by at most ||w||_1 * pitch / 2
    return pitch, float(np.sum(np.abs(weights))) * pitch / 2


def forward(weights, biases, X):
    """Float sign-network forward pass over rows of X; ties map to -1."""
    h = np.asarray(X, dtype=float)
    for W, b in zip(weights, biases):
        a = h @ np.asarray(W, dtype=float).T + np.asarray(b, dtype=float)
        h = np.where(a > 0, 1.0, -1.0)
    return h


def grid_corrupt_network(weights, biases, x, p, eps, min_points=10_000):
    """Label set found by sampling the ball; +1/-1 if unique, else 'BOT'."""
    X = ball_samples(x, p, eps, min_points)
    out = forward(weights, biases, X)[:, 0]
    found = set(int(v) for v in np.unique(out))
    return found.pop() if len(found) == 1 else "BOT"


def grid_extremes(w, b, x, p, eps, min_points=5_000, rounds=16):
    """Min and max of w.x' + b over the ball by grid search with zoom refinement.

    Each round re-grids a shrinking cube around the incumbent; cube points
    outside the ball are scaled radially onto its boundary so the search can
    slide along curved faces.
    """
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    d = x.size
    axis = np.linspace(-1.0, 1.0, 17)
    lattice = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    out = []
    for sign in (1.0, -1.0):
        X = ball_samples(x, p, eps, min_points)
        best = X[np.argmin(sign * (X @ w))]
        half = 4 * float(eps) / max(3, int(math.ceil(min_points ** (1.0 / d))))
        for _ in range(rounds):
            offsets = best - x + half * lattice
            # pull outside candidates radially back onto the boundary
            r = _norms(offsets, p)
            scale = np.where(r > float(eps), float(eps) / np.maximum(r, 1e-300), 1.0)
            cube = np.vstack([x + offsets * scale[:, None], best[None, :]])
            best = cube[np.argmin(sign * (cube @ w))]
            half /= 3
        out.append(float(best @ w) + float(b))
    return out[0], out[1]


def grid_feasible(rows, center, p, eps, min_points=20_000):
    """Any sampled ball point meeting all rows ``(a, c, strict)``?"""
    X = ball_samples(center, p, eps, min_points)
    ok = np.ones(len(X), dtype=bool)
    for a, c, strict in rows:
        lhs = X @ np.asarray(a, dtype=float)
        ok &= (lhs < c) if strict else (lhs <= c)
    return bool(ok.any())


def brute_growth(behaviours, domain_size, m):
    """max over m-subsets of the number of distinct restrictions (plain loops)."""
    best = 0
    for subset in itertools.combinations(range(domain_size), m):
        seen = set()
        for h in behaviours:
            seen.add(tuple(h[i] for i in subset))
        best = max(best, len(seen))
    return best


def _frac_dual(w, p):
    """Dual norm for p in {1, inf}: an exact Fraction."""
    from fractions import Fraction

    w = [Fraction(v) for v in w]
    if p == 1:
        return max(abs(v) for v in w)
    return sum(abs(v) for v in w)


def halfspace_corrupt_oracle(w, b, x, p, eps):
    """Closed-form corrupted halfspace label: +1, -1 or 'BOT'.

    The activation over the closed ball spans ``a +/- eps*||w||_q``; the label
    is +1 iff the minimum is positive and -1 iff the maximum is <= 0.  For
    p=2 the comparisons are done on squares so they stay exact.
    """
    from fractions import Fraction

    w = [Fraction(v) for v in w]
    a = sum(wi * Fraction(xi) for wi, xi in zip(w, x)) + Fraction(b)
    eps = Fraction(eps)
    if p in (1, math.inf, "inf"):
        r = eps * _frac_dual(w, 1 if p == 1 else math.inf)
        lo_pos, hi_nonpos = a - r > 0, a + r <= 0
    else:
        r2 = eps * eps * sum(v * v for v in w)
        lo_pos = a > 0 and a * a > r2
        hi_nonpos = a <= 0 and a * a >= r2
    if lo_pos:
        return 1
    if hi_nonpos:
        return -1
    return "BOT"


def e_brackets(terms=40):
    """Rational lower/upper bounds on e from its Taylor series."""
    from fractions import Fraction

    lo = sum(Fraction(1, math.factorial(k)) for k in range(terms))
    return lo, lo + Fraction(2, math.factorial(terms))
