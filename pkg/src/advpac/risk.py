"""Corrupted 0/1 loss, adversarial risks and adversarial empirical risk minimisation.

All risks are exact :class:`~fractions.Fraction` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ._numbers import q, qvec
from ._sweep import sweep_patterns
from .corruption import BOT, corrupt
from .geometry import FiniteNeighborhood, LpBall
from .hypotheses import DimensionError, Halfspace

WILSON_Z = 1.959963984540054


@dataclass(frozen=True)
class LabeledSample:
    points: tuple[tuple[Fraction, ...], ...]
    labels: tuple

    def __post_init__(self):
        points = tuple(qvec(x) for x in self.points)
        labels = tuple(self.labels)
        if len(points) != len(labels):
            raise DimensionError(f"{len(points)} points but {len(labels)} labels")
        if points:
            d = len(points[0])
            if any(len(x) != d for x in points):
                raise DimensionError("all sample points must share one dimension")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.points)

    @property
    def dim(self) -> int:
        return len(self.points[0]) if self.points else 0

    def __iter__(self):
        return iter(zip(self.points, self.labels))


@dataclass(frozen=True)
class FiniteDistribution:
    """Finite-support distribution over labelled points."""

    support: tuple[tuple[tuple, object, Fraction], ...]

    def __post_init__(self):
        support = tuple((qvec(x), y, q(pr)) for x, y, pr in self.support)
        if not support:
            raise ValueError("distribution needs a nonempty support")
        if any(pr < 0 for _, _, pr in support):
            raise ValueError("probabilities must be non-negative")
        total = sum(pr for _, _, pr in support)
        if abs(total - 1) > Fraction(1, 10**12):
            raise ValueError(f"probabilities sum to {float(total)!r}, not 1")
        object.__setattr__(self, "support", support)

    def sample(self, rng: np.random.Generator):
        weights = np.array([float(pr) for _, _, pr in self.support])
        idx = rng.choice(len(self.support), p=weights / weights.sum())
        x, y, _ = self.support[idx]
        return x, y


def corrupted_loss(yhat, y) -> int:
    """0 iff the corrupted prediction equals the true label; BOT always costs 1."""
    if yhat is BOT:
        return 1
    return 0 if yhat == y else 1


def _loss(h, x, y, n, mode, domain):
    return corrupted_loss(corrupt(h, x, n, mode=mode, domain=domain), y)


def adversarial_empirical_risk(h, s: LabeledSample, n, mode: str = "exact", domain=None) -> Fraction:
    if len(s) == 0:
        raise ValueError("empty sample")
    total = sum(_loss(h, x, y, n, mode, domain) for x, y in s)
    return Fraction(total, len(s))


def adversarial_true_risk(h, dist: FiniteDistribution, n, mode: str = "exact", domain=None) -> Fraction:
    return sum(
        (pr * _loss(h, x, y, n, mode, domain) for x, y, pr in dist.support if pr),
        Fraction(0),
    )


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    low: float
    high: float
    trials: int
    losses: int

    def covers(self, value) -> bool:
        return self.low <= float(value) <= self.high


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def monte_carlo_true_risk(h, sampler, n, trials: int, seed: int, mode: str = "exact") -> MonteCarloEstimate:
    """Sampling estimate of the adversarial true risk with a 95% Wilson interval.

    ``sampler`` is a :class:`FiniteDistribution` or a callable ``rng -> (x, y)``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    draw = sampler.sample if isinstance(sampler, FiniteDistribution) else sampler
    losses = 0
    for _ in range(trials):
        x, y = draw(rng)
        losses += _loss(h, x, y, n, mode, None)
    low, high = wilson_interval(losses, trials)
    return MonteCarloEstimate(losses / trials, low, high, trials, losses)


@dataclass(frozen=True)
class AermResult:
    index: int
    hypothesis: object
    risk: Fraction


def aerm(hypotheses: Iterable, s: LabeledSample, n, mode: str = "exact", domain=None) -> AermResult:
    """Minimise the adversarial empirical risk; ties go to the earliest hypothesis."""
    best = None
    for i, h in enumerate(hypotheses):
        risk = adversarial_empirical_risk(h, s, n, mode=mode, domain=domain)
        if best is None or risk < best.risk:
            best = AermResult(i, h, risk)
            if risk == 0:
                break
    if best is None:
        raise ValueError("hypothesis class is empty")
    return best


def halfspace_patterns(points: Sequence, n) -> tuple[dict, bool]:
    """Every corrupted output pattern halfspaces achieve on ``points``, with witnesses.

    Returns ``({pattern: Halfspace}, complete)`` where patterns are tuples over
    {-1, +1, BOT}.  ``complete`` is False only for d >= 3, where the direction
    set is heuristic.
    """
    points = [qvec(x) for x in points]
    if not points:
        return {(): Halfspace((1,), 0)}, True
    if isinstance(n, FiniteNeighborhood):
        base = list(dict.fromkeys(p for x in points for p in n.of(x)))
        raw, complete = sweep_patterns(base, Fraction(0), 2)
        out = {}
        for u, b in raw.values():
            h = Halfspace(u, b)
            pattern = tuple(corrupt(h, x, n) for x in points)
            out.setdefault(pattern, h)
        return out, complete
    if not isinstance(n, LpBall):
        raise TypeError(f"unsupported neighbourhood {n!r}")
    raw, complete = sweep_patterns(points, n.epsilon, n.p)
    out = {
        tuple(BOT if v == 0 else v for v in pattern): Halfspace(u, b)
        for pattern, (u, b) in raw.items()
    }
    return out, complete


def enumerate_halfspace_candidates(s, n) -> list[Halfspace]:
    """Finite halfspace list realising every corrupted labelling of the sample points.

    Completeness (d <= 2): a labelling is fixed by the position of the bias
    among the breakpoints ``-w.x_i -/+ eps*||w||_q``; their order only changes
    on finitely many critical directions and each labelling is defined by
    strict inequalities, so one direction per open arc plus one bias per
    breakpoint interval reaches all of them.  Any hypothesis's corrupted loss
    vector on the sample is therefore matched by some candidate.
    """
    points = s.points if isinstance(s, LabeledSample) else s
    patterns, _ = halfspace_patterns(points, n)
    return list(patterns.values())
