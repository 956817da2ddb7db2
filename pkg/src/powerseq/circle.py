"""Exact arithmetic on the circle group T = R/Z, finite tori T^k and O(2).

Points are stored as reduced rational angles in turns (full circle = 1), so the
normalized metric is the nearest-integer distance of the angle difference.
No floating point is used anywhere in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

RationalLike = Union[Fraction, int, str]


def as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a Fraction, int or 'p/q' string")
    return Fraction(value)


def nearest_int_dist(t: Fraction) -> Fraction:
    """||t||, the distance from t to the nearest integer."""
    r = t - math.floor(t)
    return min(r, 1 - r)


@dataclass(frozen=True, order=True)
class CirclePoint:
    angle: Fraction

    def __init__(self, angle: RationalLike = 0):
        a = as_fraction(angle)
        object.__setattr__(self, "angle", a - math.floor(a))

    @property
    def order(self) -> int:
        return self.angle.denominator

    def __mul__(self, other: CirclePoint) -> CirclePoint:
        return CirclePoint(self.angle + other.angle)

    def inverse(self) -> CirclePoint:
        return CirclePoint(-self.angle)

    def __pow__(self, n: int) -> CirclePoint:
        return circle_pow(self, n)

    def __str__(self) -> str:
        return f"{self.angle.numerator}/{self.angle.denominator}"

    def __repr__(self) -> str:
        return f"CirclePoint({self})"


IDENTITY = CirclePoint(0)


def circle_pow(x: CirclePoint, n: int) -> CirclePoint:
    """E_n(x) = x^n; for n < 0 this is the inverse power."""
    return CirclePoint(n * x.angle)


def circle_dist(x: CirclePoint, y: CirclePoint) -> Fraction:
    return nearest_int_dist(x.angle - y.angle)


def nth_roots(x: CirclePoint, n: int) -> list[CirclePoint]:
    """All n points y with y^n = x, sorted by angle; consecutive roots are 1/n apart."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    base = x.angle / n
    return [CirclePoint(base + Fraction(j, n)) for j in range(n)]


def nearest_root(x: CirclePoint, n: int, anchor: CirclePoint) -> CirclePoint:
    """The n-th root of x closest to anchor (ties go to the smaller angle).

    Computed in O(1): roots sit at (angle(x) + j)/n, so the best j is the one
    nearest to n*angle(anchor) - angle(x), checked on both neighbours of the
    real-valued optimum.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    target = n * anchor.angle - x.angle
    lo = math.floor(target)
    best = None
    for j in (lo - 1, lo, lo + 1, lo + 2):
        cand = CirclePoint((x.angle + j) / n)
        key = (circle_dist(cand, anchor), cand.angle)
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def minimal_lift(x: CirclePoint, n: int) -> CirclePoint:
    """The n-th root of x with the smallest angle, i.e. angle(x)/n."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return CirclePoint(x.angle / n)


def torsion_points(max_order: int) -> list[CirclePoint]:
    """Every point of order <= max_order, sorted by (order, angle)."""
    pts = []
    for q in range(1, max_order + 1):
        pts.extend(CirclePoint(Fraction(a, q)) for a in range(q) if math.gcd(a, q) == 1)
    return pts


@dataclass(frozen=True)
class OrthogonalElement:
    """Element of O(2): rotation by `angle` (flip=False) or the reflection (angle, True)."""

    angle: CirclePoint
    flip: bool = False

    def __post_init__(self):
        if not isinstance(self.angle, CirclePoint):
            object.__setattr__(self, "angle", CirclePoint(self.angle))

    def __mul__(self, other: OrthogonalElement) -> OrthogonalElement:
        if not self.flip:
            return OrthogonalElement(self.angle * other.angle, other.flip)
        return OrthogonalElement(CirclePoint(self.angle.angle - other.angle.angle), not other.flip)

    def inverse(self) -> OrthogonalElement:
        if self.flip:
            return self
        return OrthogonalElement(self.angle.inverse(), False)

    @property
    def is_identity(self) -> bool:
        return not self.flip and self.angle == IDENTITY


O2_IDENTITY = OrthogonalElement(IDENTITY, False)


def orth_pow(g: OrthogonalElement, n: int) -> OrthogonalElement:
    if n < 0:
        raise ValueError("negative powers are not supported")
    if not g.flip:
        return OrthogonalElement(circle_pow(g.angle, n), False)
    return g if n % 2 else O2_IDENTITY


def orth_dist_to_identity(g: OrthogonalElement) -> Fraction:
    """Distance to the identity; reflections lie in the other component and get 1."""
    if g.flip:
        return Fraction(1)
    return circle_dist(g.angle, IDENTITY)


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple[CirclePoint, ...]

    def __init__(self, coords: Iterable[CirclePoint | RationalLike]):
        object.__setattr__(
            self,
            "coords",
            tuple(c if isinstance(c, CirclePoint) else CirclePoint(c) for c in coords),
        )

    @classmethod
    def identity(cls, k: int) -> TorusPoint:
        return cls([IDENTITY] * k)

    def __mul__(self, other: TorusPoint) -> TorusPoint:
        if len(self.coords) != len(other.coords):
            raise ValueError("dimension mismatch")
        return TorusPoint(a * b for a, b in zip(self.coords, other.coords))

    def inverse(self) -> TorusPoint:
        return TorusPoint(c.inverse() for c in self.coords)

    def __pow__(self, n: int) -> TorusPoint:
        return TorusPoint(circle_pow(c, n) for c in self.coords)

    @property
    def order(self) -> int:
        return math.lcm(*(c.order for c in self.coords)) if self.coords else 1


def torus_dist(x: TorusPoint, y: TorusPoint) -> Fraction:
    """Max-coordinate metric on T^k."""
    return max((circle_dist(a, b) for a, b in zip(x.coords, y.coords)), default=Fraction(0))
