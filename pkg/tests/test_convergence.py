import threading
from fractions import Fraction as F

import pytest

from powerseq.circle import CirclePoint, OrthogonalElement, TorusPoint, circle_dist, circle_pow, IDENTITY
from powerseq.convergence import (
    CONVERGES_EXACT,
    DIVERGES_EXACT,
    EMPIRICAL_CONVERGES,
    EMPIRICAL_DIVERGES,
    Cancelled,
    empirical_tail,
    empirical_tail_with_argmax,
    hadamard_counterexample_check,
    in_C_B,
    in_C_B_orth,
    in_C_B_torus,
    in_D_F,
)
from powerseq.filters import BohrNeighborhoods, GeneratedBy, NiceF, Principal, tilde_closure
from powerseq.omega import Arithmetic, Explicit, Factorial, FactorialShift, Multiples, Powers, enumerate_set


def test_circle_examples():
    assert in_C_B(CirclePoint(F(1, 6)), Factorial()).status == CONVERGES_EXACT
    assert in_C_B(CirclePoint(F(1, 5)), FactorialShift(1)).status == DIVERGES_EXACT
    for b in [Factorial(), FactorialShift(1), Powers(3), Arithmetic(1, 2)]:
        assert in_C_B(IDENTITY, b).status == CONVERGES_EXACT


def test_finite_set_rejected():
    with pytest.raises(ValueError):
        in_C_B(CirclePoint(F(1, 3)), Explicit((1, 2, 3)))


def test_orthogonal_examples():
    evens = Multiples(2)
    assert in_C_B_orth(OrthogonalElement(F(1, 7), True), evens).status == CONVERGES_EXACT
    assert in_C_B_orth(OrthogonalElement(F(1, 2), False), evens).status == CONVERGES_EXACT
    assert in_C_B_orth(OrthogonalElement(F(1, 3), False), evens).status == DIVERGES_EXACT
    assert in_C_B_orth(OrthogonalElement(F(1, 7), True), Arithmetic(1, 2)).status == DIVERGES_EXACT


def test_torus_componentwise():
    x = TorusPoint([F(1, 2), F(1, 3)])
    assert in_C_B_torus(x, Multiples(6)).status == CONVERGES_EXACT
    assert in_C_B_torus(x, Multiples(2)).status == DIVERGES_EXACT


def tail_oracle(x, b, start, stop):
    # direct enumeration, recomputing d(x^n, 1) with circle operations
    vals = enumerate_set(b, stop)[start:stop]
    return max(circle_dist(circle_pow(x, n), IDENTITY) for n in vals)


@pytest.mark.parametrize("q", range(1, 40))
def test_torsion_verdict_matches_tail_behaviour(q):
    # far enough out, a divergent torsion point stays at distance >= 1/q along some element
    x = CirclePoint(F(1, q))
    for b in [Factorial(), FactorialShift(1), Powers(2), Multiples(6)]:
        v = in_C_B(x, b)
        tail = tail_oracle(x, b, 60, 90)
        if v.status == CONVERGES_EXACT:
            assert tail == 0
        else:
            assert v.status == DIVERGES_EXACT
            assert tail >= F(1, q)


def test_filter_examples():
    assert in_D_F(CirclePoint(F(1, 5)), NiceF()).status == DIVERGES_EXACT
    for f in [NiceF(), Principal(Factorial()), BohrNeighborhoods(), GeneratedBy((Multiples(2), Multiples(3)))]:
        assert in_D_F(IDENTITY, f).status == CONVERGES_EXACT
    v = in_D_F(CirclePoint(F(1, 3)), Principal(Multiples(6)))
    assert v.status == CONVERGES_EXACT and v.witness == Multiples(6)


def test_generated_filter_search():
    f = GeneratedBy((Multiples(2), Multiples(3)))
    v = in_D_F(CirclePoint(F(1, 6)), f)
    assert v.status == CONVERGES_EXACT
    assert all(n % 6 == 0 for n in enumerate_set(v.witness, 20))
    assert in_D_F(CirclePoint(F(1, 5)), f).status == DIVERGES_EXACT


@pytest.mark.parametrize("k", range(1, 101))
def test_bohr_torsion_witness(k):
    v = in_D_F(CirclePoint(F(1, k)), BohrNeighborhoods())
    assert v.status == CONVERGES_EXACT
    assert enumerate_set(v.witness, 10) == [j * k for j in range(10)]


def test_empirical_tail_examples():
    assert empirical_tail(CirclePoint(F(1, 7)), Factorial(), (7, 12)) == 0
    assert empirical_tail(IDENTITY, Powers(2), (0, 10)) == 0
    proxy = CirclePoint(F(355, 113) - 3)
    d = empirical_tail(proxy, Powers(2), (0, 10))
    assert 0 < d <= F(1, 2)
    assert d == tail_oracle(proxy, Powers(2), 0, 10)


def test_empirical_tail_chunk_and_worker_independent():
    x = CirclePoint(F(12345, 99991))
    b = Arithmetic(3, 7)
    ref = empirical_tail_with_argmax(x, b, (0, 2000))
    for chunk in (1, 7, 64, 5000):
        for workers in (1, 4):
            assert empirical_tail_with_argmax(x, b, (0, 2000), chunk=chunk, workers=workers) == ref


def test_empirical_tail_cancellation():
    ev = threading.Event()
    ev.set()
    with pytest.raises(Cancelled):
        empirical_tail(CirclePoint(F(1, 3)), Multiples(2), (0, 100), cancel=ev)


def test_empty_window_rejected():
    with pytest.raises(ValueError):
        empirical_tail(CirclePoint(F(1, 3)), Multiples(2), (5, 5))


def test_proxy_verdicts():
    v = in_C_B(CirclePoint(F(1, 7)), Factorial(), proxy=True, window=(7, 20))
    assert v.status == EMPIRICAL_CONVERGES and not v.exact
    v = in_C_B(CirclePoint(F(355, 113) - 3), Powers(2), proxy=True, window=(0, 30))
    assert v.status == EMPIRICAL_DIVERGES


def test_hadamard_check():
    rep = hadamard_counterexample_check(64)
    assert rep["passed"] and not rep["failures"]
    assert rep["orders_convergent_along_C"] == [1, 2, 4, 8, 16, 32, 64]
    assert in_C_B(CirclePoint(F(1, 3)), Powers(4)).status == DIVERGES_EXACT


def test_subgroup_closure_examples():
    b = Factorial()
    for p in range(1, 30):
        for r in range(1, 30):
            x, y = CirclePoint(F(1, p)), CirclePoint(F(1, r))
            assert in_C_B(x * y, b).status == CONVERGES_EXACT
            assert in_C_B(x.inverse(), b).status == CONVERGES_EXACT


def test_tilde_does_not_change_verdict():
    for q in range(1, 30):
        x = CirclePoint(F(1, q))
        for f in [Principal(Multiples(4)), NiceF(), BohrNeighborhoods()]:
            assert in_D_F(x, f).status == in_D_F(x, tilde_closure(f)).status
