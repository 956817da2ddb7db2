from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from powerseq.circle import nearest_int_dist
from powerseq.measure import (
    SCALE,
    IntervalUnion,
    c_set_approx,
    intersect_with_preimage,
    mc_haar_estimate,
    near_one_preimage,
)
from powerseq.omega import Explicit, FactorialShift, Multiples


def breakpoint_measure(ns, eps):
    """Independent oracle: membership is constant between consecutive breakpoints (j ± eps)/n."""
    pts = {F(0), F(1)}
    for n in ns:
        for j in range(-1, n + 2):
            for t in (F(j) - eps, F(j) + eps):
                x = t / n
                if 0 < x < 1:
                    pts.add(x)
    pts = sorted(pts)
    total = F(0)
    for a, b in zip(pts, pts[1:]):
        mid = (a + b) / 2
        if all(nearest_int_dist(n * mid) < eps for n in ns):
            total += b - a
    return total


def test_near_one_preimage_examples():
    u = near_one_preimage(1, F(1, 4))
    assert u.intervals == ((0, F(1, 4)), (F(3, 4), 1)) and u.measure == F(1, 2)
    u = near_one_preimage(2, F(1, 8))
    assert u.measure == F(1, 4) and u.contains(F(1, 2)) and u.contains(0)
    u = near_one_preimage(3, F(1, 10))
    assert u.measure == F(1, 5)
    # arc around 0 wraps, so 3 arcs appear as 4 pieces
    assert len(u) == 4


@given(st.integers(1, 60), st.fractions(F(1, 1000), F(1, 2)).filter(lambda e: e < F(1, 2)))
def test_near_one_preimage_measure_is_two_eps(n, eps):
    assert near_one_preimage(n, eps).measure == 2 * eps


def test_interval_examples():
    b = IntervalUnion([(F(1, 3), F(2, 5))])
    assert IntervalUnion.full().intersect(b) == b
    a, b = IntervalUnion([(0, F(1, 2))]), IntervalUnion([(F(1, 4), F(3, 4))])
    assert a.intersect(b).intervals == ((F(1, 4), F(1, 2)),)
    assert a.intersect(b).measure == F(1, 4)


unions = st.lists(
    st.tuples(st.fractions(0, 1, max_denominator=40), st.fractions(0, 1, max_denominator=40)),
    max_size=6,
).map(lambda ps: IntervalUnion([(min(p), max(p)) for p in ps]))


@settings(max_examples=200)
@given(unions, unions)
def test_inclusion_exclusion(a, b):
    assert a.intersect(b).measure + a.union(b).measure == a.measure + b.measure
    assert a.intersect(b).measure <= min(a.measure, b.measure)


@settings(max_examples=200)
@given(unions, st.fractions(-3, 3, max_denominator=50))
def test_shift_preserves_measure(a, t):
    assert a.shift(t).measure == a.measure


@given(unions)
def test_complement(a):
    assert a.measure + a.complement().measure == 1
    assert a.intersect(a.complement()).measure == 0


@pytest.mark.parametrize("n", [1, 2, 5, 17, 120])
@pytest.mark.parametrize("eps", [F(1, 10), F(1, 3), F(1, 2)])
def test_intersect_with_preimage_matches_generic(n, eps):
    u = IntervalUnion([(F(1, 7), F(3, 7)), (F(5, 9), F(8, 9))])
    assert intersect_with_preimage(u, n, eps) == u.intersect(near_one_preimage(n, eps))


def test_c_set_approx_nice_example():
    rep = c_set_approx(FactorialShift(1), F(1, 10), 5)
    assert rep.constraints == [2, 3, 7, 25, 121]
    assert rep.exact_sequence[0] == F(1, 5)
    assert rep.monotone and rep.exact_sequence[-1] < F(1, 5)
    for i in range(1, 6):
        assert rep.exact_sequence[i - 1] == breakpoint_measure(rep.constraints[:i], F(1, 10))


def test_c_set_approx_single_constraint():
    rep = c_set_approx(Explicit((1,)), F(1, 4), 1)
    assert rep.exact_sequence == [F(1, 2)] and not rep.partial


def test_c_set_approx_even_prefix_against_grid():
    rep = c_set_approx(Multiples(2), F(1, 8), 2)
    assert rep.constraints == [2, 4]
    grid = 200_000
    hits = sum(1 for i in range(grid)
               if nearest_int_dist(F(2 * i, grid)) < F(1, 8) and nearest_int_dist(F(4 * i, grid)) < F(1, 8))
    assert abs(hits / grid - float(rep.exact_sequence[-1])) < 1e-3
    assert rep.exact_sequence[-1] == breakpoint_measure([2, 4], F(1, 8))


def test_c_set_approx_monotone_in_eps():
    vals = [c_set_approx(FactorialShift(1), e, 4).exact_sequence[-1] for e in (F(1, 20), F(1, 10), F(1, 5))]
    assert vals == sorted(vals)


def test_c_set_approx_budget_partial():
    rep = c_set_approx(FactorialShift(1), F(1, 10), 10, budget=6)
    assert rep.partial and "budget" in rep.stop_reason
    assert rep.depth < 10 and rep.monotone


def test_c_set_approx_exhausted_set():
    rep = c_set_approx(Explicit((0, 3, 5)), F(1, 10), 4)
    assert rep.constraints == [3, 5]
    assert rep.partial and rep.stop_reason == "set exhausted"


def test_mc_cross_check_within_four_sigma():
    rep = c_set_approx(FactorialShift(1), F(1, 10), 5, samples=100_000, seed=3)
    assert not rep.mc["flagged"]
    assert all(c["within_4sigma"] for c in rep.mc["checks"])


def test_mc_examples():
    u = near_one_preimage(3, F(1, 10))
    est = mc_haar_estimate("T", u.contains_scaled, 100_000, seed=1)
    assert abs(est.estimate - 0.2) <= 3 * est.stderr
    est = mc_haar_estimate("O2", lambda batch: batch[0], 100_000, seed=1)
    assert abs(est.estimate - 0.5) <= 3 * est.stderr


def test_mc_torus_product():
    u = near_one_preimage(1, F(1, 4))
    est = mc_haar_estimate("T^2", lambda b: u.contains_scaled(b[:, 0]) & u.contains_scaled(b[:, 1]),
                           50_000, seed=2)
    assert abs(est.estimate - 0.25) <= 4 * est.stderr


def test_mc_deterministic_and_worker_independent():
    u = near_one_preimage(5, F(1, 7))
    runs = [mc_haar_estimate("T", u.contains_scaled, 40_000, seed=9, workers=w) for w in (1, 2, 4, 1)]
    assert len({(r.hits, r.estimate) for r in runs}) == 1
    other = mc_haar_estimate("T", u.contains_scaled, 40_000, seed=10)
    assert other.hits != runs[0].hits


def test_contains_scaled_is_exact():
    u = IntervalUnion([(F(1, 3), F(1, 2))])
    ks = np.array([SCALE // 3, SCALE // 3 + 1, SCALE // 2 - 1, SCALE // 2, 0], dtype=np.int64)
    expect = [u.contains(F(int(k), SCALE)) for k in ks]
    assert list(u.contains_scaled(ks)) == expect


def test_invalid_arguments():
    with pytest.raises(ValueError):
        near_one_preimage(0, F(1, 10))
    with pytest.raises(ValueError):
        near_one_preimage(3, F(3, 5))
    with pytest.raises(ValueError):
        c_set_approx(Multiples(2), F(1, 10), 0)
    with pytest.raises(ValueError):
        mc_haar_estimate("T", lambda b: b > 0, 0, seed=0)
