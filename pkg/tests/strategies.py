"""Shared hypothesis strategies for set, filter and point descriptors."""

from fractions import Fraction as F

from hypothesis import strategies as st

from powerseq.circle import CirclePoint
from powerseq.filters import BohrBasic, BohrNeighborhoods, GeneratedBy, NiceF, Principal
from powerseq.omega import (
    OMEGA, Arithmetic, Difference, Explicit, Factorial, FactorialShift, Intersection, Multiples, Positions, Powers,
    Residues, TailFrom, Union,
)

base_sets = st.one_of(
    st.just(Factorial()),
    st.just(OMEGA),
    st.integers(0, 4).map(FactorialShift),
    st.integers(2, 6).map(Powers),
    st.integers(1, 12).map(Multiples),
    st.tuples(st.integers(0, 6), st.integers(1, 12)).map(lambda t: Arithmetic(*t)),
    st.integers(2, 12).flatmap(lambda m: st.sets(st.integers(0, m - 1), min_size=1)
                               .map(lambda r: Residues(m, tuple(sorted(r))))),
)

sets = st.recursive(
    base_sets,
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda t: Union(*t)),
        st.tuples(inner, inner).map(lambda t: Intersection(*t)),
        st.tuples(inner, st.lists(st.integers(0, 40), unique=True, max_size=4))
          .map(lambda t: Difference(t[0], Explicit(tuple(sorted(t[1]))))),
        st.tuples(inner, st.integers(0, 5)).map(lambda t: TailFrom(*t)),
        st.tuples(inner, st.integers(0, 1)).map(lambda t: Positions(*t)),
    ),
    max_leaves=4,
)

infinite_sets = sets.filter(lambda s: s.finiteness() is False)

torsion_points = st.integers(1, 60).flatmap(lambda q: st.integers(0, q - 1).map(lambda j: CirclePoint(F(j, q))))

filters = st.one_of(
    infinite_sets.map(Principal),
    st.just(NiceF()),
    st.just(BohrNeighborhoods()),
    st.tuples(infinite_sets, infinite_sets).map(GeneratedBy),
    st.tuples(st.lists(torsion_points, min_size=1, max_size=3), st.integers(3, 20))
      .map(lambda t: BohrBasic(tuple(t[0]), F(1, t[1]))),
)
