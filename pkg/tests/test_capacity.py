import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advpac import (
    ExplicitFamily,
    FiniteClass,
    Halfspace,
    HalfspaceFamily,
    LpBall,
    SignNetwork,
    avc_lower_bound,
    growth_function,
    is_adversarially_shattered,
    lemma3_threshold,
    network_growth_bound,
    sauer_bound,
    shattering_coefficient,
    verify_composition_bound,
    verify_product_bound,
    verify_witness,
)
from advpac.capacity import GuardExceeded, grid_points, run_bound_trials, shatter_inequality_gap
from oracles import brute_growth, e_brackets

behaviour_rows = st.lists(st.lists(st.sampled_from([-1, 1]), min_size=4, max_size=4),
                          min_size=1, max_size=10)


def test_growth_examples():
    domain = tuple(range(4))
    full = FiniteClass(domain, itertools.product((-1, 1), repeat=4))
    assert [growth_function(full, m) for m in (1, 2, 3, 4)] == [2, 4, 8, 16]
    single = FiniteClass(domain, [(1, -1, 1, 1)])
    assert [growth_function(single, m) for m in (1, 2, 3, 4)] == [1, 1, 1, 1]
    points = tuple(range(5))
    thresholds = FiniteClass(points, [tuple(1 if x > t else -1 for x in points)
                                      for t in (-1, 0, 1, 2, 3, 4)])
    assert growth_function(thresholds, 3) == 4


def test_growth_errors():
    cls = FiniteClass((0, 1), [(1, 1)])
    with pytest.raises(ValueError):
        growth_function(cls, 0)
    with pytest.raises(ValueError):
        growth_function(cls, 3)
    big = FiniteClass(tuple(range(30)), [tuple([1] * 30)])
    with pytest.raises(GuardExceeded):
        growth_function(big, 15, max_subsets=1000)


@given(behaviour_rows, st.integers(1, 4))
def test_growth_matches_brute(rows, m):
    cls = FiniteClass(tuple(range(4)), [tuple(r) for r in rows])
    assert growth_function(cls, m) == brute_growth([tuple(r) for r in rows], 4, m)


def test_composition_examples():
    domain = (0, 1, 2)
    f1 = FiniteClass(domain, [("a", "b", "a"), ("b", "b", "a"), ("a", "a", "a")])
    identity_like = FiniteClass(("a", "b"), [(1, -1)])
    check = verify_composition_bound(f1, identity_like, 2)
    assert check.tau_h == growth_function(FiniteClass(domain, [(1, -1, 1), (-1, -1, 1), (1, 1, 1)]), 2)
    assert check.bound_holds
    const = FiniteClass(domain, [("a", "a", "a")])
    f2 = FiniteClass(("a", "b"), [(1, -1), (-1, 1), (1, 1)])
    c2 = verify_composition_bound(const, f2, 2)
    assert c2.tau_h <= c2.tau_f2 and c2.bound_holds


def test_product_examples():
    domain = (0, 1)
    full = FiniteClass(domain, itertools.product((-1, 1), repeat=2))
    c = verify_product_bound(full, full, 2)
    assert (c.tau_h, c.bound) == (16, 16) and c.bound_holds
    single = FiniteClass(domain, [(1, 1)])
    c2 = verify_product_bound(full, single, 2)
    assert c2.tau_h == c2.tau_f1 == 4


def test_product_equality_flag_detects_correlation():
    domain = (0, 1)
    f = FiniteClass(domain, [(1, -1), (-1, 1)])
    c = verify_product_bound(f, f, 2)
    assert c.tau_h == 4 and c.restriction_equality


def test_bound_trials_all_hold():
    results = run_bound_trials(200, seed=3)
    assert len(results) == 400
    assert all(r.check.bound_holds for r in results)
    assert run_bound_trials(0, seed=3) == []


def test_shattering_coefficient_examples():
    fam = HalfspaceFamily(1)
    assert set(shattering_coefficient(fam, [(0,), (1,)], [1, -1], LpBall(2, 100))) >= {(1, 1)}
    allbot = ExplicitFamily([Halfspace((1,), 0), Halfspace((-1,), 0)])
    assert set(shattering_coefficient(allbot, [(0,), (1,)], [1, -1], LpBall(2, 100))) == {(1, 1)}
    assert len(shattering_coefficient(fam, [(0,)], [1], LpBall("inf", "0.1"))) == 2


def test_zero_radius_coefficient_is_classic():
    pts = [(0,), (1,), (2,)]
    hs = [Halfspace((w,), Fraction(b, 2)) for w in (-1, 1) for b in range(-6, 7)]
    got = set(shattering_coefficient(ExplicitFamily(hs), pts, [1, 1, -1], LpBall(2, 0)))
    classic = {tuple(int(h(x) != y) for x, y in zip(pts, [1, 1, -1])) for h in hs}
    assert got == classic


def test_unit_interval_witness():
    ok, w = is_adversarially_shattered(HalfspaceFamily(1), LpBall("inf", "0.1"), [(0,), (1,)])
    assert ok and len(w.entries) == 4
    doc = w.to_dict()
    assert verify_witness(json.loads(json.dumps(doc))).ok


def test_shattering_failures():
    # the same point twice can never take different losses under equal labels
    # nor identical losses under opposite labels
    ok, _ = is_adversarially_shattered(HalfspaceFamily(1), LpBall("inf", "0.1"), [(0,), (0,)])
    assert not ok
    allbot = ExplicitFamily([Halfspace((1,), 0), Halfspace((-1,), 0)])
    assert not is_adversarially_shattered(allbot, LpBall(2, 10), [(0,), (1,)])[0]


def test_literal_definition_with_overlapping_balls():
    # constant halfspaces keep a label on any ball, so y = (-1, -1) still sees all four vectors
    ok, w = is_adversarially_shattered(HalfspaceFamily(1), LpBall("inf", 5), [(0,), (1,)])
    assert ok and verify_witness(w.to_dict()).ok


def test_empty_point_set_is_shattered():
    assert is_adversarially_shattered(HalfspaceFamily(2), LpBall(2, 1), [])[0]


def test_tampered_witness_rejected():
    _, w = is_adversarially_shattered(HalfspaceFamily(1), LpBall("inf", "0.1"), [(0,), (1,)])
    doc = w.to_dict()
    doc["witnesses"][0]["loss_vector"] = [1 - v for v in doc["witnesses"][0]["loss_vector"]]
    assert not verify_witness(doc).ok
    doc = w.to_dict()
    doc["witnesses"].pop()
    assert not verify_witness(doc).ok


def test_explicit_family_witness_round_trip():
    net = SignNetwork([[[1], [-1]], [[1, 1]]], [["-0.5", "0.5"], ["0.5"]])
    fam = ExplicitFamily([net, Halfspace((1,), 0), Halfspace((-1,), "0.5")], mode="interval")
    ok, w = is_adversarially_shattered(fam, LpBall(2, "0.1"), [(0,)])
    assert ok
    doc = w.to_dict()
    assert doc["family"]["mode"] == "interval" and verify_witness(doc).ok


@pytest.mark.parametrize("eps", ["0", "0.1"])
def test_avc_one_dimensional(eps):
    grid = grid_points(1, "-2", "2", "0.5")
    res = avc_lower_bound(HalfspaceFamily(1), LpBall("inf", eps), grid)
    assert res.best_n == 2 and res.exhausted_next
    assert verify_witness(res.witness.to_dict()).ok


def test_avc_workers_do_not_change_result():
    grid = grid_points(2, "-1", "1", "1")
    n = LpBall(1, "0.1")
    a = avc_lower_bound(HalfspaceFamily(2), n, grid, workers=1)
    b = avc_lower_bound(HalfspaceFamily(2), n, grid, workers=2)
    assert a.best_n == b.best_n == 3
    assert a.witness.to_dict() == b.witness.to_dict()


def test_avc_guard_keeps_partial():
    grid = grid_points(2, "-1", "1", "0.5")
    with pytest.raises(GuardExceeded) as info:
        avc_lower_bound(HalfspaceFamily(2), LpBall(2, "0.1"), grid, max_subsets=500)
    assert info.value.partial is not None and info.value.partial.best_n >= 1


def test_sauer_examples():
    assert sauer_bound(1, 1) == pytest.approx(math.e)
    assert sauer_bound(2, 4) == pytest.approx(29.5562, abs=1e-3)
    with pytest.raises(ValueError):
        sauer_bound(3, 2)
    for d in (1, 2, 5):
        vals = [sauer_bound(d, m) for m in range(d, d + 30)]
        assert vals == sorted(vals)


def test_network_growth_examples():
    gb = network_growth_bound([2, 1], 1)
    assert gb.edges == 3 and gb.loose == pytest.approx(math.e ** 3)
    assert gb.per_neuron is None
    assert network_growth_bound([2, 1], 3).per_neuron == pytest.approx(math.e ** 3)


def test_per_neuron_bound_below_loose():
    rng = np.random.default_rng(2)
    for _ in range(100):
        sizes = [int(v) for v in rng.integers(1, 5, size=int(rng.integers(2, 5)))]
        m = int(rng.integers(1, 40))
        gb = network_growth_bound(sizes, m)
        assert gb.per_neuron_extended <= gb.loose * (1 + 1e-12)
        if gb.per_neuron is not None:
            assert gb.per_neuron <= gb.loose * (1 + 1e-12)


def test_threshold_examples():
    r1 = lemma3_threshold(1)
    assert r1.m_star == 3 and r1.closed_form == pytest.approx(3.943, abs=1e-3)
    r4 = lemma3_threshold(4)
    assert r4.closed_form == pytest.approx(31.8, abs=0.05) and r4.m_star <= 32
    stars = [lemma3_threshold(e).m_star for e in range(1, 40)]
    assert stars == sorted(stars)
    with pytest.raises(ValueError):
        lemma3_threshold(0)


@settings(max_examples=60)
@given(st.integers(1, 200), st.integers(1, 20))
def test_gap_sign_matches_rational_brackets(m, edges):
    e_lo, e_hi = e_brackets()
    holds = shatter_inequality_gap(m, edges) >= 0
    if 2 ** m <= (e_lo * m) ** edges:
        assert holds
    if (e_hi * m) ** edges < 2 ** m:
        assert not holds
