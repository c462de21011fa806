"""Adversary neighbourhoods, dual norms and exact feasibility of linear systems in a ball.

Balls are closed: ``N(x) = {x' : ||x' - x||_p <= eps}``.  For ``p`` in {1, inf}
the ball is a polytope and feasibility is decided by an exact rational simplex.
For ``p = 2`` feasibility is also exact: the distance from the centre to the
(closure of the) constraint polyhedron is computed by active-set enumeration
in rational arithmetic and compared with ``eps`` through squares.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import _simplex
from ._numbers import dot, fmt_exact, q, qvec
from .hypotheses import DimensionError, Halfspace

INF = math.inf
SUPPORTED_P = (1, 2, INF)


def normalize_p(p) -> float | int:
    """Map user spellings (``1``, ``"2"``, ``"inf"``, ``"∞"``) to 1, 2 or ``math.inf``."""
    if isinstance(p, str):
        text = p.strip().lower()
        if text in {"inf", "infinity", "∞", "linf"}:
            return INF
        try:
            p = float(text)
        except ValueError:
            raise ValueError(f"unsupported norm p={p!r}") from None
    if p == INF:
        return INF
    if p in (1, 2):
        return int(p)
    raise ValueError(f"unsupported norm p={p!r}; choose 1, 2 or inf")


def dual_exponent(p):
    p = normalize_p(p)
    return {1: INF, 2: 2, INF: 1}[p]


def p_label(p) -> str:
    p = normalize_p(p)
    return "inf" if p == INF else str(p)


def norm(v: Sequence, p) -> Fraction | float:
    """l_p norm; exact Fraction for p in {1, inf}, float for p = 2."""
    p = normalize_p(p)
    v = qvec(v)
    if p == 1:
        return sum((abs(a) for a in v), Fraction(0))
    if p == INF:
        return max((abs(a) for a in v), default=Fraction(0))
    return math.sqrt(norm_sq(v))


def norm_sq(v: Sequence) -> Fraction:
    return sum((a * a for a in qvec(v)), Fraction(0))


def dual_norm(w: Sequence, p) -> Fraction | float:
    """``||w||_q`` with ``1/p + 1/q = 1``; the support function of the unit l_p ball."""
    return norm(w, dual_exponent(p))


@dataclass(frozen=True)
class LpBall:
    """Adversary moving each point anywhere within a closed l_p ball of radius epsilon."""

    p: float | int
    epsilon: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", normalize_p(self.p))
        object.__setattr__(self, "epsilon", q(self.epsilon))
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")

    kind = "lp_ball"

    def contains(self, center: Sequence, x: Sequence) -> bool:
        return ball_contains(center, self.p, self.epsilon, x)

    def with_epsilon(self, epsilon) -> "LpBall":
        return LpBall(self.p, epsilon)

    def to_dict(self) -> dict:
        return {"kind": "lp_ball", "p": p_label(self.p), "epsilon": fmt_exact(self.epsilon)}


@dataclass(frozen=True)
class FiniteNeighborhood:
    """Explicit neighbour lists; every mapped point must list itself."""

    neighbors: Mapping[tuple, tuple]

    kind = "finite_map"

    def __post_init__(self):
        table = {}
        for key, values in dict(self.neighbors).items():
            k = _key(key)
            vals = tuple(_key(v) for v in values)
            if k not in vals:
                raise ValueError(f"neighbourhood of {key!r} does not contain the point itself")
            table[k] = vals
        object.__setattr__(self, "neighbors", table)

    def of(self, x) -> tuple:
        try:
            return self.neighbors[_key(x)]
        except KeyError:
            raise KeyError(f"no neighbourhood recorded for point {x!r}") from None

    def points(self) -> list:
        seen: dict = {}
        for k, vals in self.neighbors.items():
            seen.setdefault(k, None)
            for v in vals:
                seen.setdefault(v, None)
        return list(seen)

    def to_dict(self) -> dict:
        def enc(p):
            return [fmt_exact(c) for c in p] if isinstance(p, tuple) else p

        return {
            "kind": "finite_map",
            "neighbors": [{"point": enc(k), "neighbors": [enc(v) for v in vals]}
                          for k, vals in self.neighbors.items()],
        }


def _key(x):
    """Hashable canonical form of a point: tuple of Fractions, or the label itself."""
    if isinstance(x, (list, tuple)):
        try:
            return qvec(x)
        except (TypeError, ValueError):
            return tuple(x)
    return x


NeighborhoodRelation = LpBall | FiniteNeighborhood


def neighborhood_from_dict(doc: dict) -> NeighborhoodRelation:
    if doc.get("kind", "lp_ball") == "lp_ball":
        return LpBall(doc["p"], doc["epsilon"])
    if doc["kind"] == "finite_map":
        table = {tuple(e["point"]): [tuple(v) for v in e["neighbors"]] for e in doc["neighbors"]}
        return FiniteNeighborhood(table)
    raise ValueError(f"unknown neighbourhood kind {doc['kind']!r}")


def ball_contains(x0: Sequence, p, epsilon, x: Sequence) -> bool:
    """Exact membership test for the closed ball ``||x - x0||_p <= epsilon``."""
    x0, x = qvec(x0), qvec(x)
    if len(x0) != len(x):
        raise DimensionError("ball centre and point differ in dimension")
    eps = q(epsilon)
    diff = [a - b for a, b in zip(x, x0)]
    p = normalize_p(p)
    if p == 2:
        return norm_sq(diff) <= eps * eps
    return norm(diff, p) <= eps


def margin_interval(h: Halfspace, x: Sequence, n: NeighborhoodRelation):
    """Exact ``[min, max]`` of ``w.x' + b`` over the ball around ``x``.

    Endpoints are Fractions for p in {1, inf} and floats for p = 2 (the radius
    ``eps * ||w||_2`` is irrational in general).  Sign decisions should use
    :func:`activation_range_signs`, which stays exact for every p.
    """
    if not isinstance(n, LpBall):
        raise TypeError("margin_interval needs an l_p ball; enumerate finite neighbourhoods instead")
    centre = h.activation(x)
    radius = n.epsilon * dual_norm(h.weights, n.p) if n.epsilon else Fraction(0)
    if isinstance(radius, float):
        return float(centre) - radius, float(centre) + radius
    return centre - radius, centre + radius


def activation_range_signs(h: Halfspace, x: Sequence, n: LpBall) -> tuple[bool, bool]:
    """``(min > 0, max <= 0)`` for the activation over the ball, decided exactly."""
    a = h.activation(x)
    eps = n.epsilon
    if n.p == 2:
        r_sq = eps * eps * norm_sq(h.weights)
        lo_positive = a > 0 and a * a > r_sq
        hi_nonpositive = a <= 0 and a * a >= r_sq
        return lo_positive, hi_nonpositive
    r = eps * dual_norm(h.weights, n.p)
    return a - r > 0, a + r <= 0


@dataclass
class LinearSystem:
    """Constraints ``a.x < c`` / ``a.x <= c`` intersected with ``||x - center||_p <= epsilon``."""

    center: tuple
    p: float | int
    epsilon: Fraction
    rows: list = field(default_factory=list)

    def __post_init__(self):
        self.center = qvec(self.center)
        self.p = normalize_p(self.p)
        self.epsilon = q(self.epsilon)
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        rows, self.rows = self.rows, []
        for coeffs, rhs, strict in rows:
            self.add(coeffs, rhs, strict)

    @property
    def dim(self) -> int:
        return len(self.center)

    def add(self, coeffs: Sequence, rhs, strict: bool = False) -> "LinearSystem":
        coeffs = qvec(coeffs)
        if len(coeffs) != self.dim:
            raise DimensionError(f"row of width {len(coeffs)} in a {self.dim}-dimensional system")
        self.rows.append((coeffs, q(rhs), bool(strict)))
        return self

    def add_ge(self, coeffs: Sequence, rhs, strict: bool = False) -> "LinearSystem":
        """Add ``a.x >= c`` (or ``>`` when strict)."""
        return self.add([-a for a in qvec(coeffs)], -q(rhs), strict)

    def satisfied_by(self, x: Sequence) -> bool:
        x = qvec(x)
        for coeffs, rhs, strict in self.rows:
            lhs = dot(coeffs, x)
            if lhs > rhs or (strict and lhs == rhs):
                return False
        return ball_contains(self.center, self.p, self.epsilon, x)

    def dump(self) -> str:
        lines = [
            f"LinearSystem dim={self.dim} ball: ||x - ({', '.join(map(fmt_exact, self.center))})||_"
            f"{p_label(self.p)} <= {fmt_exact(self.epsilon)}"
        ]
        for coeffs, rhs, strict in self.rows:
            terms = " + ".join(f"{fmt_exact(a)}*x{i + 1}" for i, a in enumerate(coeffs))
            lines.append(f"  {terms} {'<' if strict else '<='} {fmt_exact(rhs)}")
        return "\n".join(lines)


def lp_feasible(sys: LinearSystem) -> bool:
    """True iff some point of the ball satisfies every row (strict rows strictly)."""
    return find_feasible_point(sys) is not None


def find_feasible_point(sys: LinearSystem):
    """A rational point satisfying the whole system, or None when it is infeasible."""
    if sys.p not in SUPPORTED_P:
        raise ValueError(f"unsupported norm p={sys.p!r}")
    if sys.p == 2:
        return _feasible_point_l2(sys)
    return _feasible_point_polyhedral(sys, use_ball=True)


def _shifted_rows(sys: LinearSystem):
    """Rows rewritten for the displacement ``u = x - center``."""
    return [(a, c - dot(a, sys.center), strict) for a, c, strict in sys.rows]


def _feasible_point_polyhedral(sys: LinearSystem, use_ball: bool):
    # variables: u+ (d), u- (d), t; maximise t where strict rows read a.u + t <= c'
    d = sys.dim
    rows = _shifted_rows(sys)
    has_strict = any(strict for _, _, strict in rows)
    n_vars = 2 * d + 1
    A, b = [], []
    for a, c, strict in rows:
        A.append(list(a) + [-v for v in a] + [Fraction(1 if strict else 0)])
        b.append(c)
    A.append([Fraction(0)] * (2 * d) + [Fraction(1)])
    b.append(Fraction(1))
    if use_ball:
        if sys.p == INF:
            for i in range(d):
                row = [Fraction(0)] * n_vars
                row[i] = row[d + i] = Fraction(1)
                A.append(row)
                b.append(sys.epsilon)
        else:
            A.append([Fraction(1)] * (2 * d) + [Fraction(0)])
            b.append(sys.epsilon)
    objective = [Fraction(0)] * (2 * d) + [Fraction(1 if has_strict else 0)]
    status, value, z = _simplex.maximize(objective, A, b)
    if status != _simplex.OPTIMAL:
        return None
    if has_strict and value <= 0:
        return None
    return tuple(c + z[i] - z[d + i] for i, c in enumerate(sys.center))


def _solve(matrix, rhs):
    """Gaussian elimination over Fractions; None when singular."""
    n = len(matrix)
    aug = [list(row) + [v] for row, v in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def nearest_point_sq_distance(rows, dim: int):
    """Squared distance from the origin to ``{u : a.u <= c for all rows}`` and the nearest point.

    The nearest point is the least-norm solution of the equalities of some
    linearly independent active set, so enumerating those sets is exact.
    Returns None when the polyhedron is empty.
    """
    best = None
    zero = Fraction(0)
    for size in range(0, min(len(rows), dim) + 1):
        for subset in itertools.combinations(range(len(rows)), size):
            if size == 0:
                u = (zero,) * dim
            else:
                A = [rows[i][0] for i in subset]
                gram = [[dot(ai, aj) for aj in A] for ai in A]
                lam = _solve(gram, [rows[i][1] for i in subset])
                if lam is None:
                    continue
                u = tuple(sum((l * a[k] for l, a in zip(lam, A)), zero) for k in range(dim))
            if all(dot(a, u) <= c for a, c in rows):
                dist = norm_sq(u)
                if best is None or dist < best[0]:
                    best = (dist, u)
    return best


def _feasible_point_l2(sys: LinearSystem):
    rows = _shifted_rows(sys)
    strict_rows = [(a, c) for a, c, s in rows if s]
    if strict_rows:
        # the strict system must be nonempty for its closure to be the relaxed polyhedron
        free = LinearSystem(sys.center, INF, 0, list(sys.rows))
        interior = _feasible_point_polyhedral(free, use_ball=False)
        if interior is None:
            return None
    closure = [(a, c) for a, c, _ in rows]
    found = nearest_point_sq_distance(closure, sys.dim)
    if found is None:
        return None
    dist_sq, u = found
    eps_sq = sys.epsilon * sys.epsilon
    if dist_sq > eps_sq:
        return None
    nearest = tuple(c + v for c, v in zip(sys.center, u))
    if all(dot(a, u) < c for a, c in strict_rows):
        return nearest
    if dist_sq == eps_sq:
        return None
    # nearest point sits on a strict face; slide toward the strict interior point
    interior_u = tuple(v - c for v, c in zip(interior, sys.center))
    # shrink the step until the moved point is back inside the ball
    step = Fraction(1)
    for _ in range(200):
        cand = tuple(a + step * (b - a) for a, b in zip(u, interior_u))
        if norm_sq(cand) <= eps_sq and all(dot(a, cand) < c for a, c in strict_rows):
            return tuple(c + v for c, v in zip(sys.center, cand))
        step /= 2
    raise ArithmeticError("failed to locate a strictly feasible point")  # pragma: no cover
