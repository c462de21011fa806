import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advpac import (
    BOT,
    FiniteDistribution,
    FiniteNeighborhood,
    Halfspace,
    LabeledSample,
    LpBall,
    adversarial_empirical_risk,
    adversarial_true_risk,
    aerm,
    corrupted_loss,
    enumerate_halfspace_candidates,
    monte_carlo_true_risk,
)
from advpac.hypotheses import DimensionError
from oracles import halfspace_corrupt_oracle


def test_corrupted_loss_examples():
    assert corrupted_loss(1, 1) == 0
    assert corrupted_loss(-1, 1) == 1
    assert corrupted_loss(BOT, 1) == 1
    assert corrupted_loss(BOT, -1) == 1


def test_sample_validation():
    with pytest.raises(DimensionError):
        LabeledSample([(0, 0), (1,)], [1, 1])
    with pytest.raises(DimensionError):
        LabeledSample([(0,)], [1, -1])
    with pytest.raises(ValueError):
        adversarial_empirical_risk(Halfspace((1,), 0), LabeledSample([], []), LpBall(2, 0))


def test_distribution_validation():
    with pytest.raises(ValueError):
        FiniteDistribution([((0,), 1, "0.5"), ((1,), 1, "0.4")])
    with pytest.raises(ValueError):
        FiniteDistribution([((0,), 1, "1.5"), ((1,), 1, "-0.5")])
    FiniteDistribution([((0,), 1, "0.3333333333333"), ((1,), 1, "0.6666666666667")])


def test_empirical_risk_examples():
    h = Halfspace((1, 0), 0)
    s = LabeledSample([(1, 0)], [1])
    assert adversarial_empirical_risk(h, s, LpBall("inf", "0.5")) == 0
    s2 = LabeledSample([(1, 0), (-1, 0), ("0.1", 0)], [1, 1, -1])
    assert adversarial_empirical_risk(h, s2, LpBall(2, 0)) == Fraction(2, 3)
    assert adversarial_empirical_risk(h, s2, LpBall(2, 5)) == 1


def test_true_risk_examples():
    h = Halfspace((1,), 0)
    n = LpBall(2, "0.5")
    assert adversarial_true_risk(h, FiniteDistribution([((2,), 1, 1)]), n) == 0
    dist = FiniteDistribution([((2,), 1, "0.5"), (("0.1",), 1, "0.5")])
    assert adversarial_true_risk(h, dist, n) == Fraction(1, 2)
    assert adversarial_true_risk(h, dist, LpBall(2, 0)) == 0


def test_monte_carlo_coverage():
    h = Halfspace((1,), 0)
    n = LpBall("inf", "0.2")
    dist = FiniteDistribution([((1,), 1, "0.6"), (("0.1",), 1, "0.3"), ((-1,), 1, "0.1")])
    exact = adversarial_true_risk(h, dist, n)
    assert exact == Fraction(2, 5)
    covered = sum(monte_carlo_true_risk(h, dist, n, 200, seed).covers(exact) for seed in range(100))
    assert covered >= 93


def test_monte_carlo_determinism_and_single_trial():
    h = Halfspace((1,), 0)
    n = LpBall("inf", "0.2")
    dist = FiniteDistribution([((1,), 1, "0.5"), (("0.1",), 1, "0.5")])
    assert monte_carlo_true_risk(h, dist, n, 50, 9) == monte_carlo_true_risk(h, dist, n, 50, 9)
    one = monte_carlo_true_risk(h, dist, n, 1, 3)
    assert one.estimate in (0.0, 1.0)
    with pytest.raises(ValueError):
        monte_carlo_true_risk(h, dist, n, 0, 3)


def test_monte_carlo_callable_sampler():
    h = Halfspace((1,), 0)
    est = monte_carlo_true_risk(h, lambda rng: ((float(rng.uniform(0.5, 1)),), 1), LpBall(2, "0.1"), 30, 0)
    assert est.losses == 0


def test_aerm_examples():
    s = LabeledSample([(1,), (-1,)], [1, -1])
    n = LpBall(2, "0.1")
    bad, good, also_good = Halfspace((-1,), 0), Halfspace((1,), 0), Halfspace((2,), 0)
    res = aerm([bad, good, also_good], s, n)
    assert res.risk == 0 and res.index == 1
    assert aerm([bad], s, n).hypothesis == bad
    with pytest.raises(ValueError):
        aerm([], s, n)


def test_aerm_ties_keep_first():
    s = LabeledSample([(1,), (-1,)], [1, 1])
    res = aerm([Halfspace((1,), 0), Halfspace((-1,), 0)], s, LpBall(2, 0))
    assert res.index == 0 and res.risk == Fraction(1, 2)


def test_aerm_on_grid_matches_brute_force():
    s = LabeledSample([(0, 0), (1, 0), (0, 1), (2, 2)], [-1, -1, -1, 1])
    n = LpBall("inf", "0.05")
    axis = [Fraction(k, 2) for k in range(-4, 5)]
    grid = [Halfspace(w, b) for w in itertools.product(axis, repeat=2) if any(w) for b in axis]
    res = aerm(grid, s, n)
    brute = min(adversarial_empirical_risk(h, s, n) for h in grid)
    assert res.risk == brute == 0
    assert all(res.risk <= adversarial_empirical_risk(h, s, n) for h in grid)


def _loss_vectors(candidates, pts, ys, p, eps):
    out = set()
    for w, b in candidates:
        labels = [halfspace_corrupt_oracle(w, b, x, p, eps) for x in pts]
        out.add(tuple(int(lab == "BOT" or lab != y) for lab, y in zip(labels, ys)))
    return out


def _dense_grid(d):
    axis = [Fraction(k, 4) for k in range(-8, 9)]
    return [(w, b) for w in itertools.product(axis, repeat=d) if any(w) for b in axis]


@pytest.mark.parametrize("p", [1, 2, math.inf])
def test_candidates_cover_dense_grid(p):
    rng = np.random.default_rng(4)
    for _ in range(8):
        d = int(rng.integers(1, 3))
        pts = [tuple(Fraction(round(float(v), 1)) for v in rng.uniform(-1, 1, size=d))
               for _ in range(int(rng.integers(1, 5)))]
        ys = [int(v) for v in rng.choice([-1, 1], size=len(pts))]
        eps = Fraction(1, 10)
        s = LabeledSample(pts, ys)
        cands = [(h.weights, h.bias) for h in
                 enumerate_halfspace_candidates(s, LpBall("inf" if p == math.inf else p, eps))]
        assert _loss_vectors(_dense_grid(d), pts, ys, p, eps) <= _loss_vectors(cands, pts, ys, p, eps)


def test_single_point_candidates():
    s = LabeledSample([(0,)], [1])
    n = LpBall(2, "0.5")
    outcomes = {adversarial_empirical_risk(h, s, n) for h in enumerate_halfspace_candidates(s, n)}
    assert outcomes == {0, 1}


def test_collinear_points_in_the_plane():
    pts = [(0, 0), (1, 1), (2, 2), ("0.5", "0.5")]
    ys = [1, -1, 1, -1]
    eps = Fraction(1, 20)
    n = LpBall(2, eps)
    cands = [(h.weights, h.bias) for h in enumerate_halfspace_candidates(LabeledSample(pts, ys), n)]
    qpts = [tuple(Fraction(v) for v in x) for x in pts]
    assert _loss_vectors(_dense_grid(2), qpts, ys, 2, eps) <= _loss_vectors(cands, qpts, ys, 2, eps)


def _cover_count(n, d):
    return 2 * sum(math.comb(n - 1, k) for k in range(d + 1))


@pytest.mark.parametrize("npts,d", [(3, 1), (5, 1), (4, 2), (5, 2), (6, 2)])
def test_zero_radius_dichotomy_count(npts, d):
    rng = np.random.default_rng(npts * 10 + d)
    pts = [tuple(Fraction(int(v), 97) for v in rng.integers(-97, 98, size=d)) for _ in range(npts)]
    s = LabeledSample(pts, [1] * npts)
    dichotomies = {tuple(h(x) for x in pts) for h in enumerate_halfspace_candidates(s, LpBall(2, 0))}
    assert len(dichotomies) == _cover_count(npts, d)


def test_finite_neighbourhood_candidates():
    nbrs = {(0,): [(0,), (1,)], (1,): [(1,)], (3,): [(3,), (2,)], (2,): [(2,)]}
    n = FiniteNeighborhood(nbrs)
    s = LabeledSample([(0,), (3,)], [1, -1])
    cands = enumerate_halfspace_candidates(s, n)
    assert min(adversarial_empirical_risk(h, s, n) for h in cands) == 0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-4, 4), st.sampled_from([-1, 1])), min_size=1, max_size=5),
       st.sampled_from(["0", "0.1", "0.3", "1"]))
def test_zero_radius_aerm_equals_erm(data, eps):
    pts = [(Fraction(v, 2),) for v, _ in data]
    ys = [y for _, y in data]
    s = LabeledSample(pts, ys)
    classic = aerm(enumerate_halfspace_candidates(s, LpBall(2, 0)), s, LpBall(2, 0))
    erm = min(Fraction(sum(h(x) != y for x, y in zip(pts, ys)), len(pts))
              for h in (Halfspace((w,), Fraction(b, 4)) for w in (-1, 1) for b in range(-20, 21)))
    assert classic.risk == erm
    n = LpBall(2, eps)
    robust = aerm(enumerate_halfspace_candidates(s, n), s, n)
    assert robust.risk >= classic.risk


def test_three_dimensional_sweep_is_flagged_heuristic():
    from advpac import corrupt
    from advpac.risk import halfspace_patterns

    pts = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]
    n = LpBall(2, "0.1")
    with pytest.warns(RuntimeWarning):
        patterns, complete = halfspace_patterns(pts, n)
    assert not complete
    for pattern, h in patterns.items():
        assert tuple(corrupt(h, x, n) for x in pts) == pattern
    # the simplex vertices are robustly separable in every way
    assert set(itertools.product((-1, 1), repeat=4)) <= set(patterns)
