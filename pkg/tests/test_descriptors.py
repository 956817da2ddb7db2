from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from powerseq.descriptors import DescriptorError, parse_descriptor, parse_filter, parse_point, parse_rational, parse_set
from powerseq.filters import BohrBasic, GeneratedBy, NiceF, Principal, tilde_closure
from powerseq.omega import (
    OMEGA, Arithmetic, Difference, Explicit, Factorial, FactorialShift, Intersection, Multiples, Positions, Powers,
    Residues, TailFrom, Union,
)


def test_set_forms():
    assert parse_set("factorial") == Factorial()
    assert parse_set("ω") == OMEGA == parse_set("omega")
    assert parse_set("factshift(1)") == FactorialShift(1)
    assert parse_set("factshift(1, mult(2))") == FactorialShift(1, Multiples(2))
    assert parse_set("explicit[]") == Explicit(())
    assert parse_set("tail(factorial, 3)") == TailFrom(Factorial(), 3)
    assert parse_set("evenpos(powers(2))") == Positions(Powers(2), 0)
    assert parse_set("residues(6; 1,5)") == Residues(6, (1, 5))
    assert parse_set("arith(1,4) ∪ mult(3)") == Union(Arithmetic(1, 4), Multiples(3))


def test_operators_left_associative():
    assert parse_set("mult(2) | mult(3) & mult(5)") == Intersection(Union(Multiples(2), Multiples(3)), Multiples(5))
    assert parse_set("mult(2) | (mult(3) & mult(5))") == Union(Multiples(2), Intersection(Multiples(3), Multiples(5)))
    assert parse_set("ω ∖ explicit[0,1]") == parse_set("omega - explicit[0,1]") == Difference(OMEGA, Explicit((0, 1)))


def test_filter_forms():
    assert parse_filter("niceF") == NiceF()
    assert parse_filter("principal(factorial)~") == tilde_closure(Principal(Factorial()))
    assert parse_filter("gen(mult(2); mult(3))") == GeneratedBy((Multiples(2), Multiples(3)))
    assert parse_filter("bohr([1/3, 1/2], 1/10)") == BohrBasic(tuple(parse_point(a) for a in ("1/3", "1/2")), F(1, 10))
    assert isinstance(parse_descriptor("niceF~"), type(tilde_closure(NiceF())))
    assert parse_descriptor("mult(2)") == Multiples(2)


def test_rationals():
    assert parse_rational("3/9") == F(1, 3)
    assert parse_rational("-1/2") == F(-1, 2)
    assert parse_point("5/4").angle == F(1, 4)
    with pytest.raises(DescriptorError):
        parse_rational("1/0")


@pytest.mark.parametrize("text,pos", [
    ("explicit[3,1]", 0),
    ("mult(2) ∪", 9),
    ("mult(2", 6),
    ("factorial $", 10),
    ("niceF", 0),
    ("foo(1)", 0),
    ("residues(6; 5,1)", 0),
    ("principal(factorial) extra", 21),
])
def test_error_positions(text, pos):
    with pytest.raises(DescriptorError) as info:
        parse_set(text) if not text.startswith("principal") else parse_filter(text)
    assert info.value.pos == pos
    assert "^" in str(info.value)


sets = st.recursive(
    st.one_of(
        st.just(Factorial()), st.just(OMEGA),
        st.integers(0, 5).map(FactorialShift),
        st.integers(2, 9).map(Powers), st.integers(1, 9).map(Multiples),
        st.tuples(st.integers(0, 5), st.integers(1, 7)).map(lambda t: Arithmetic(*t)),
        st.lists(st.integers(0, 50), unique=True).map(lambda v: Explicit(tuple(sorted(v)))),
        st.integers(1, 9).flatmap(lambda m: st.sets(st.integers(0, m - 1), min_size=1)
                                  .map(lambda r: Residues(m, tuple(sorted(r))))),
    ),
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda t: Union(*t)),
        st.tuples(inner, inner).map(lambda t: Intersection(*t)),
        st.tuples(inner, inner).map(lambda t: Difference(*t)),
        st.tuples(inner, st.integers(0, 4)).map(lambda t: TailFrom(*t)),
    ),
    max_leaves=6,
)


@given(sets)
def test_round_trip(s):
    assert parse_set(str(s)) == s


@given(sets)
def test_filter_round_trip(s):
    for f in (Principal(s), tilde_closure(Principal(s))):
        assert parse_filter(str(f)) == f
