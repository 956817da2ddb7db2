import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from powerseq.circle import (
    IDENTITY,
    O2_IDENTITY,
    CirclePoint,
    OrthogonalElement,
    TorusPoint,
    circle_dist,
    circle_pow,
    minimal_lift,
    nearest_root,
    nth_roots,
    orth_dist_to_identity,
    orth_pow,
    torsion_points,
    torus_dist,
)

angles = st.fractions(min_value=0, max_value=1, max_denominator=500)
points = angles.map(CirclePoint)


def repeated_product(x: CirclePoint, n: int) -> CirclePoint:
    acc = IDENTITY
    for _ in range(n):
        acc = acc * x
    return acc


def test_points_are_reduced_mod_one():
    assert CirclePoint(F(7, 3)).angle == F(1, 3)
    assert CirclePoint(F(-1, 4)).angle == F(3, 4)
    assert CirclePoint(F(2, 6)).order == 3
    assert str(CirclePoint(F(1, 2))) == "1/2"


def test_floats_rejected():
    with pytest.raises(TypeError):
        CirclePoint(0.5)


def test_power_examples():
    assert circle_pow(CirclePoint(F(1, 3)), 3) == IDENTITY
    assert circle_pow(CirclePoint(F(5, 11)), 0) == IDENTITY
    assert circle_pow(CirclePoint(F(1, 7)), 25) == CirclePoint(F(4, 7))
    assert circle_pow(CirclePoint(F(1, 7)), 25) == repeated_product(CirclePoint(F(1, 7)), 25)


def test_distance_examples():
    assert circle_dist(IDENTITY, CirclePoint(F(1, 2))) == F(1, 2)
    a, b = F(1, 8), F(7, 8)
    assert circle_dist(CirclePoint(a), CirclePoint(b)) == min(abs(a - b), 1 - abs(a - b)) == F(1, 4)
    x = CirclePoint(F(3, 17))
    assert circle_dist(x, x) == 0


def test_roots_examples():
    assert [r.angle for r in nth_roots(IDENTITY, 4)] == [0, F(1, 4), F(1, 2), F(3, 4)]
    assert [r.angle for r in nth_roots(CirclePoint(F(1, 2)), 2)] == [F(1, 4), F(3, 4)]
    with pytest.raises(ValueError):
        nth_roots(IDENTITY, 0)


def test_nearest_root_examples():
    assert nearest_root(IDENTITY, 4, CirclePoint(F(26, 100))) == CirclePoint(F(1, 4))
    assert nearest_root(IDENTITY, 2, CirclePoint(F(1, 4))) == IDENTITY


def test_minimal_lift():
    assert minimal_lift(CirclePoint(F(1, 2)), 3) == CirclePoint(F(1, 6))


def test_orth_examples():
    r = OrthogonalElement(CirclePoint(F(1, 5)), True)
    assert orth_pow(r, 2) == O2_IDENTITY
    assert orth_pow(OrthogonalElement(CirclePoint(F(1, 5))), 5).is_identity
    g = OrthogonalElement(CirclePoint(F(1, 3)), True)
    assert orth_pow(g, 3) == g
    assert orth_dist_to_identity(g) == 1


def test_orth_composition_law():
    a, b = CirclePoint(F(1, 5)), CirclePoint(F(1, 7))
    assert OrthogonalElement(a) * OrthogonalElement(b, True) == OrthogonalElement(a * b, True)
    assert OrthogonalElement(a, True) * OrthogonalElement(b) == OrthogonalElement(CirclePoint(a.angle - b.angle), True)
    assert OrthogonalElement(a, True) * OrthogonalElement(b, True) == OrthogonalElement(CirclePoint(a.angle - b.angle))


def test_torsion_points_count_matches_totient():
    # sum of Euler phi over 1..12
    assert len(torsion_points(12)) == 46
    assert all(p.order <= 12 for p in torsion_points(12))


def test_torus():
    x = TorusPoint([F(1, 2), F(1, 3)])
    assert x.order == 6
    assert x ** 6 == TorusPoint.identity(2)
    assert torus_dist(x, TorusPoint.identity(2)) == F(1, 2)
    assert (x * x.inverse()) == TorusPoint.identity(2)
    with pytest.raises(ValueError):
        x * TorusPoint.identity(3)


@given(points, st.integers(0, 10**6), st.integers(0, 10**6))
def test_power_is_homomorphic_in_exponent(x, m, n):
    assert circle_pow(x, m + n) == circle_pow(x, m) * circle_pow(x, n)


@given(points, points, points)
def test_triangle_inequality(x, y, z):
    assert circle_dist(x, z) <= circle_dist(x, y) + circle_dist(y, z)
    assert circle_dist(x, y) == circle_dist(y, x) <= F(1, 2)


@given(points, points, points)
def test_translation_invariance(x, y, t):
    assert circle_dist(x * t, y * t) == circle_dist(x, y)


@given(points, st.integers(1, 60))
def test_roots_are_distinct_and_evenly_spaced(x, n):
    roots = nth_roots(x, n)
    assert len(set(roots)) == n
    assert all(circle_pow(r, n) == x for r in roots)
    if n > 1:
        assert min(circle_dist(a, b) for a, b in itertools.combinations(roots, 2)) == F(1, n)


@settings(max_examples=300)
@given(points, st.integers(1, 10**4), points)
def test_nearest_root_matches_brute_force(x, n, anchor):
    got = nearest_root(x, n, anchor)
    assert circle_pow(got, n) == x
    assert circle_dist(got, anchor) <= F(1, 2 * n)
    if n <= 200:
        best = min(nth_roots(x, n), key=lambda r: (circle_dist(r, anchor), r.angle))
        assert got == best


@given(angles, st.booleans(), angles, st.booleans(), angles, st.booleans())
def test_orth_associativity(a, fa, b, fb, c, fc):
    x, y, z = (OrthogonalElement(CirclePoint(t), f) for t, f in ((a, fa), (b, fb), (c, fc)))
    assert (x * y) * z == x * (y * z)
    assert (x * x.inverse()).is_identity


@given(angles, st.integers(0, 50))
def test_even_powers_of_reflections_are_rotations(a, k):
    g = OrthogonalElement(CirclePoint(a), True)
    assert not orth_pow(g, 2 * k).flip
