"""Seeded synthetic samples for desk-scale risk experiments."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ._numbers import dot, q, qvec
from .risk import LabeledSample

KINDS = ("gaussian-mixture-2class", "margin-separated-halfspace", "grid-uniform")


class InfeasibleSpec(ValueError):
    pass


def _round(values, precision: int) -> tuple[Fraction, ...]:
    # the written decimals are the data, so labels and margins are judged on them
    return tuple(Fraction(round(Fraction(float(v)) * 10**precision), 10**precision) for v in values)


def generate_synthetic(spec: dict, seed: int) -> LabeledSample:
    kind = spec.get("kind")
    n = int(spec.get("n", 100))
    d = int(spec.get("d", 2))
    precision = int(spec.get("precision", 6))
    if n < 0 or d < 1:
        raise InfeasibleSpec("need n >= 0 and d >= 1")
    rng = np.random.default_rng(seed)
    if kind == "gaussian-mixture-2class":
        mean = qvec(spec.get("mean", [1] + [0] * (d - 1)))
        std = float(spec.get("std", 1.0))
        points, labels = [], []
        for _ in range(n):
            y = 1 if rng.random() < 0.5 else -1
            x = rng.normal(loc=[y * float(m) for m in mean], scale=std)
            points.append(_round(x, precision))
            labels.append(y)
        return LabeledSample(points, labels)
    if kind == "margin-separated-halfspace":
        w = qvec(spec.get("w", [1] + [0] * (d - 1)))
        b = q(spec.get("b", 0))
        gamma = q(spec.get("gamma", "0.1"))
        lo, hi = (float(v) for v in spec.get("box", [-1, 1]))
        max_draws = int(spec.get("max_draws", 1000 * n + 1000))
        points, labels = [], []
        draws = 0
        while len(points) < n:
            if draws >= max_draws:
                raise InfeasibleSpec(
                    f"only {len(points)} of {n} points reached margin {gamma} after {draws} draws"
                )
            draws += 1
            x = _round(rng.uniform(lo, hi, size=d), precision)
            a = dot(w, x) + b
            if abs(a) >= gamma:
                points.append(x)
                labels.append(1 if a > 0 else -1)
        return LabeledSample(points, labels)
    if kind == "grid-uniform":
        lo, hi, step = qvec((spec.get("lo", -1), spec.get("hi", 1), spec.get("step", "0.5")))
        axis = []
        v = lo
        while v <= hi:
            axis.append(v)
            v += step
        if not axis:
            raise InfeasibleSpec("empty grid")
        planted = spec.get("w")
        points, labels = [], []
        for _ in range(n):
            x = tuple(axis[int(i)] for i in rng.integers(0, len(axis), size=d))
            if planted is not None:
                a = dot(qvec(planted), x) + q(spec.get("b", 0))
                y = 1 if a > 0 else -1
            else:
                y = 1 if rng.random() < 0.5 else -1
            points.append(x)
            labels.append(y)
        return LabeledSample(points, labels)
    raise InfeasibleSpec(f"unknown synthetic kind {kind!r}; choose one of {', '.join(KINDS)}")
