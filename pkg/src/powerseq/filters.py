"""Filters on omega given by generators, with exact membership where it is decidable.

Filters are never materialized. A filter is a generator family plus a `tilde`
flag (closure under finite modification); membership questions are answered
with certificates from the containment and density engines in `omega`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Optional, Sequence

from .circle import CirclePoint
from .omega import (
    OMEGA,
    Difference,
    Explicit,
    Factorial,
    FactorialShift,
    Intersection,
    Multiples,
    OmegaSet,
    Positions,
    Powers,
    Residues,
    TailFrom,
    Union,
    density,
    enumerate_set,
    subset,
)


@dataclass(frozen=True)
class FilterSpec:
    tilde: bool = field(default=False, kw_only=True)

    def _suffix(self) -> str:
        return "~" if self.tilde else ""


@dataclass(frozen=True)
class Principal(FilterSpec):
    """B↑ = {W : B ⊆ W}; with tilde, {W : B ⊆* W}."""

    base: OmegaSet

    def __str__(self):
        return f"principal({self.base}){self._suffix()}"


@dataclass(frozen=True)
class NiceF(FilterSpec):
    """Generated by {k!+1 : k ∈ D} for every D of asymptotic density 1."""

    def __str__(self):
        return "niceF" + self._suffix()


@dataclass(frozen=True)
class GeneratedBy(FilterSpec):
    generators: tuple[OmegaSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if not self.generators:
            raise ValueError("a generated filter needs at least one generator")

    def __str__(self):
        return "gen(" + "; ".join(map(str, self.generators)) + ")" + self._suffix()


@dataclass(frozen=True)
class BohrBasic(FilterSpec):
    """Filter generated by one basic Bohr neighbourhood {n : d(z_j^n, 1) < eps for all j}.

    Points flagged as `proxy` stand in for irrational angles; verdicts about
    them are reported as empirical.
    """

    points: tuple[CirclePoint, ...]
    eps: Fraction
    proxy: bool = False

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "eps", Fraction(self.eps))
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    def __str__(self):
        return f"bohr([{','.join(map(str, self.points))}],{self.eps}){self._suffix()}"


@dataclass(frozen=True)
class BohrNeighborhoods(FilterSpec):
    """Neighbourhood filter of 0 in omega ⊆ Z^#, generated by basic sets with torsion points."""

    def __str__(self):
        return "bohrN" + self._suffix()


def tilde_closure(f: FilterSpec) -> FilterSpec:
    return replace(f, tilde=True)


def bohr_basic_set(points: Sequence[CirclePoint], eps: Fraction) -> OmegaSet:
    """{n >= 0 : d(z^n, 1) < eps for every z in points}, as residue classes.

    The set is periodic with period the lcm of the orders and always contains
    the multiples of that lcm.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    period = math.lcm(*(p.order for p in points)) if points else 1
    # d(z^r, 1) = min(u, q - u)/q with u = r·a mod q for z = a/q
    fracs = [(p.angle.numerator, p.angle.denominator) for p in points]
    residues = [
        r for r in range(period)
        if all(min(r * a % q, q - r * a % q) < eps * q for a, q in fracs)
    ]
    if len(residues) == period:
        return OMEGA
    if residues == [0]:
        return Multiples(period)
    return Residues(period, tuple(residues))


@dataclass(frozen=True)
class MembershipVerdict:
    status: str  # "member" | "nonmember" | "empirical" | "unknown"
    certificate: str
    witness: Any = None
    data: dict = field(default_factory=dict)

    @property
    def exact(self) -> bool:
        return self.status in ("member", "nonmember")

    def to_dict(self):
        d = {"status": self.status, "certificate": self.certificate}
        if self.witness is not None:
            d["witness"] = str(self.witness)
        if self.data:
            d["data"] = {k: (v if isinstance(v, (int, bool, list)) else str(v)) for k, v in self.data.items()}
        return d


def factorial_preimage(w: OmegaSet) -> Optional[OmegaSet]:
    """A set equal, up to finitely many elements, to {k : k!+1 ∈ w}; None if no rule applies."""
    p = w.periodic
    if p is not None:
        # k!+1 ≡ 1 (mod period) once k >= kempner(period)
        return OMEGA if (1 % p.period) in p.residues else Explicit(())
    match w:
        case Factorial():
            return Explicit(())
        case FactorialShift(c=c, domain=dom):
            return dom if c == 1 else Explicit(())
        case Union(left=a, right=b) | Intersection(left=a, right=b) | Difference(left=a, right=b):
            ka, kb = factorial_preimage(a), factorial_preimage(b)
            if ka is None or kb is None:
                return None
            return type(w)(ka, kb)
        case TailFrom(inner=x):
            return factorial_preimage(x)
        case Positions(inner=FactorialShift(c=1, domain=dom), parity=r):
            collapsed = dom.contains(0) and dom.contains(1)
            return Positions(dom, (r + 1) % 2 if collapsed else r)
    for m in range(2, 65):
        rc = w.residue_cycle(m)
        if rc is None:
            break
        if 1 % m not in rc[1]:
            return Explicit(())
    return None


def filter_member(f: FilterSpec, w: OmegaSet, *, preimage_horizon: int = 200) -> MembershipVerdict:
    match f:
        case Principal(base=b):
            return _principal_member(b, w, f.tilde)
        case BohrBasic(points=pts, eps=eps, proxy=proxy):
            v = _principal_member(bohr_basic_set(pts, eps), w, f.tilde)
            if proxy:
                return MembershipVerdict("empirical", "rational proxy points: " + v.certificate, v.witness, v.data)
            return v
        case NiceF():
            return _nice_member(w, preimage_horizon)
        case GeneratedBy(generators=gens):
            return _generated_member(gens, w, f.tilde)
        case BohrNeighborhoods():
            return _bohr_nbhd_member(w, f.tilde)
    raise TypeError(f"unknown filter {f!r}")


def _principal_member(b: OmegaSet, w: OmegaSet, tilde: bool) -> MembershipVerdict:
    rel = "⊆*" if tilde else "⊆"
    d = subset(b, w, almost=tilde)
    if d.value:
        return MembershipVerdict("member", f"{b} {rel} W: {d.reason}")
    if d.value is False:
        return MembershipVerdict("nonmember", f"{b} ⊄{'*' if tilde else ''} W: {d.reason}", d.witness)
    if not tilde:
        return MembershipVerdict(
            "empirical", f"first elements of {b} lie in W; containment not decidable by closed-form rules",
            data={"checked_prefix": 64},
        )
    return MembershipVerdict("unknown", f"almost-containment of {b} in W not decidable at this depth")


def _nice_member(w: OmegaSet, horizon: int) -> MembershipVerdict:
    k = factorial_preimage(w)
    if k is None:
        hits = [n for n in range(horizon) if w.contains(math.factorial(n) + 1)]
        est = Fraction(len(hits), horizon)
        return MembershipVerdict(
            "empirical", "W ∈ F iff {k : k!+1 ∈ W} has density 1; preimage scanned directly",
            data={"preimage_density_estimate": est, "horizon": horizon},
        )
    dv = density(k)
    cert = f"W ∈ F iff density({{k : k!+1 ∈ W}}) = 1; preimage =* {k}; density {dv.value} ({dv.proof})"
    if not dv.exact:
        return MembershipVerdict("empirical", cert, data={"preimage_density_estimate": dv.value})
    if dv.value == 1:
        return MembershipVerdict("member", cert, FactorialShift(1, k))
    return MembershipVerdict("nonmember", cert, data={"preimage_density": dv.value})


def _generated_member(gens: tuple[OmegaSet, ...], w: OmegaSet, tilde: bool) -> MembershipVerdict:
    for g in gens:
        d = subset(g, w, almost=tilde)
        if d.value:
            return MembershipVerdict("member", f"generator {g} is contained: {d.reason}", g)
    meet = gens[0]
    for g in gens[1:]:
        meet = Intersection(meet, g)
    d = subset(meet, w, almost=tilde)
    if d.value:
        return MembershipVerdict("member", f"intersection of all generators is contained: {d.reason}", meet)
    if d.value is False:
        return MembershipVerdict(
            "nonmember", f"even the intersection of all generators is not contained: {d.reason}", d.witness
        )
    return MembershipVerdict("unknown", "containment of generator intersections not decidable")


def _bohr_nbhd_member(w: OmegaSet, tilde: bool) -> MembershipVerdict:
    # basic sets from torsion points are periodic, contain 0, and contain every L*omega for L large;
    # so W is a member iff it contains (almost) some L*omega
    p = w.periodic
    if p is not None:
        if 0 not in p.residues:
            return MembershipVerdict(
                "nonmember", f"multiples of {p.period} eventually avoid W, so no L·ω is (almost) contained",
                p.representative(0),
            )
        if not tilde and not w.contains(0):
            return MembershipVerdict("nonmember", "every basic neighbourhood contains 0", 0)
        return MembershipVerdict("member", f"W ⊇{'*' if tilde else ''} {p.period * max(1, p.start)}·ω",
                                 Multiples(p.period * max(1, p.start)))
    if w.is_sparse:
        return MembershipVerdict("nonmember", "W has density 0, every basic neighbourhood has positive density")
    return MembershipVerdict("unknown", "W has no periodic normal form")


@dataclass(frozen=True)
class FipReport:
    ok: bool
    depth: int
    horizon: int
    certificate: str
    violation: Optional[tuple[OmegaSet, ...]] = None
    elements: tuple[int, ...] = ()
    finite_certified: Optional[bool] = None

    def to_dict(self):
        d = {"ok": self.ok, "depth": self.depth, "horizon": self.horizon, "certificate": self.certificate}
        if self.violation is not None:
            d["violation"] = [str(g) for g in self.violation]
            d["elements_below_horizon"] = list(self.elements)
            d["finite_certified"] = self.finite_certified
        return d


def _elements_below(spec: OmegaSet, horizon: int, cap: int) -> list[int]:
    return list(itertools.islice(itertools.takewhile(lambda v: v < horizon, spec.iter_values()), cap))


DEFAULT_NICE_DOMAINS = (
    OMEGA,
    Difference(OMEGA, Explicit(tuple(range(10)))),
    Difference(OMEGA, Powers(2)),
    Difference(OMEGA, Factorial()),
    Difference(OMEGA, Union(Powers(3), Explicit((5, 7, 11)))),
)


def check_fip(f: FilterSpec, depth: int, horizon: int = 10**6,
              nice_domains: Sequence[OmegaSet] = DEFAULT_NICE_DOMAINS) -> FipReport:
    """Bounded finite-intersection-property check: every <=depth-fold meet has >= depth elements below the horizon."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if isinstance(f, NiceF):
        for combo in itertools.combinations_with_replacement(nice_domains, min(depth, len(nice_domains))):
            meet = combo[0]
            for dmn in combo[1:]:
                meet = Intersection(meet, dmn)
            dv = density(meet)
            if not (dv.exact and dv.value == 1):
                return FipReport(False, depth, horizon, f"sample domain meet has density {dv.value}", combo)
        return FipReport(True, depth, horizon,
                         "density-1 sets are closed under finite intersection; sample domains verified exactly")
    if isinstance(f, GeneratedBy):
        gens = f.generators
    elif isinstance(f, Principal):
        gens = (f.base,)
    elif isinstance(f, BohrBasic):
        gens = (bohr_basic_set(f.points, f.eps),)
    else:
        return FipReport(True, depth, horizon, "neighbourhood filter of a group topology")
    # horizon is raised so every single generator has `depth` elements below it
    for g in gens:
        first = enumerate_set(g, depth)
        if first:
            horizon = max(horizon, first[-1] + 1)
    for size in range(1, min(depth, len(gens)) + 1):
        for combo in itertools.combinations(gens, size):
            meet = combo[0]
            for g in combo[1:]:
                meet = Intersection(meet, g)
            found = _elements_below(meet, horizon, depth)
            if len(found) < depth:
                return FipReport(False, depth, horizon, f"{size}-fold meet has {len(found)} elements below horizon",
                                 combo, tuple(found), meet.finiteness())
    return FipReport(True, depth, horizon, f"every <= {depth}-fold meet has >= {depth} elements below {horizon}")
