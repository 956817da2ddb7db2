"""Deciding x ∈ C^X_B and x ∈ D^X_F for X = T, T^k and O(2).

For a point of order q, x^n -> 1 along B exactly when all but finitely many
n ∈ B are multiples of q (otherwise d(x^n, 1) >= 1/q infinitely often). That
reduces every torsion question to `divisibility_profile`. Points flagged as
rational proxies for irrational angles only get empirical verdicts.
"""

from __future__ import annotations

import itertools
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .circle import (
    CirclePoint,
    OrthogonalElement,
    TorusPoint,
    nearest_int_dist,
    torsion_points,
)
from .filters import (
    BohrBasic,
    BohrNeighborhoods,
    FilterSpec,
    GeneratedBy,
    NiceF,
    Principal,
    bohr_basic_set,
)
from .omega import (
    FactorialShift,
    Intersection,
    OmegaSet,
    Positions,
    Powers,
    divisibility_profile,
    kempner,
)

CONVERGES_EXACT = "converges_exact"
DIVERGES_EXACT = "diverges_exact"
EMPIRICAL_CONVERGES = "empirical_converges"
EMPIRICAL_DIVERGES = "empirical_diverges"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class ConvergenceVerdict:
    status: str
    certificate: dict = field(default_factory=dict)
    witness: Any = None  # a member of the filter along which x converges

    @property
    def exact(self) -> bool:
        return self.status in (CONVERGES_EXACT, DIVERGES_EXACT)

    @property
    def converges(self) -> Optional[bool]:
        if self.status in (CONVERGES_EXACT, EMPIRICAL_CONVERGES):
            return True
        if self.status in (DIVERGES_EXACT, EMPIRICAL_DIVERGES):
            return False
        return None

    def to_dict(self):
        d = {"status": self.status, "certificate": {k: _jsonable(v) for k, v in self.certificate.items()}}
        if self.witness is not None:
            d["witness"] = str(self.witness)
        return d


def _jsonable(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return str(v)


class Cancelled(RuntimeError):
    pass


def _require_infinite(b: OmegaSet):
    if b.finiteness():
        raise ValueError(f"{b} is finite; convergence along it is vacuous")


def order_verdict(q: int, b: OmegaSet) -> ConvergenceVerdict:
    """Convergence of any point of order q along b."""
    if q == 1:
        return ConvergenceVerdict(CONVERGES_EXACT, {"order": 1, "reason": "identity element"})
    prof = divisibility_profile(b, q)
    if prof.status == "finite":
        return ConvergenceVerdict(CONVERGES_EXACT, {
            "order": q, "exceptions": prof.exceptions, "bound_index": prof.bound_index, "reason": prof.reason,
        })
    if prof.status == "infinite":
        return ConvergenceVerdict(DIVERGES_EXACT, {
            "order": q, "modulus": q, "min_distance": Fraction(1, q),
            "reason": f"infinitely many n in B with {q} ∤ n: {prof.reason}",
        })
    return ConvergenceVerdict(UNKNOWN, {"order": q, "reason": prof.reason})


def in_C_B(x: CirclePoint, b: OmegaSet, *, proxy: bool = False,
           window: tuple[int, int] = (32, 64), tol: Fraction = Fraction(1, 100)) -> ConvergenceVerdict:
    """x ∈ C^T_B? Exact for torsion points; empirical when x is a proxy for an irrational angle."""
    _require_infinite(b)
    if proxy:
        return empirical_verdict(x, b, window, tol)
    return order_verdict(x.order, b)


def in_C_B_torus(x: TorusPoint, b: OmegaSet) -> ConvergenceVerdict:
    """Componentwise: converges iff every coordinate does."""
    _require_infinite(b)
    parts = [order_verdict(c.order, b) for c in x.coords]
    cert = {"coordinates": [p.status for p in parts]}
    if all(p.status == CONVERGES_EXACT for p in parts):
        return ConvergenceVerdict(CONVERGES_EXACT, cert)
    if any(p.status == DIVERGES_EXACT for p in parts):
        return ConvergenceVerdict(DIVERGES_EXACT, cert)
    return ConvergenceVerdict(UNKNOWN, cert)


def in_C_B_orth(g: OrthogonalElement, b: OmegaSet) -> ConvergenceVerdict:
    _require_infinite(b)
    if not g.flip:
        return order_verdict(g.angle.order, b)
    # g^n is g for odd n and 1 for even n
    prof = divisibility_profile(b, 2)
    if prof.status == "finite":
        return ConvergenceVerdict(CONVERGES_EXACT, {"reflection": True, "odd_elements": prof.exceptions,
                                                    "reason": "reflections have order 2; " + prof.reason})
    if prof.status == "infinite":
        return ConvergenceVerdict(DIVERGES_EXACT, {"reflection": True, "reason": "infinitely many odd n: " + prof.reason})
    return ConvergenceVerdict(UNKNOWN, {"reflection": True, "reason": prof.reason})


def in_D_F(x: CirclePoint, f: FilterSpec, search_budget: int = 64, *, proxy: bool = False) -> ConvergenceVerdict:
    """x ∈ D^T_F, with a witness member B ∈ F when x converges along it.

    Closing the filter under finite modification never changes the answer,
    since convergence ignores finitely many indices.
    """
    q = x.order
    match f:
        case Principal(base=b):
            v = in_C_B(x, b, proxy=proxy)
            return ConvergenceVerdict(v.status, {**v.certificate, "member": "the base set itself"}, b)
        case BohrBasic(points=pts, eps=eps):
            base = bohr_basic_set(pts, eps)
            v = in_C_B(x, base, proxy=proxy or f.proxy)
            return ConvergenceVerdict(v.status, v.certificate, base)
        case NiceF():
            if proxy:
                return in_C_B(x, FactorialShift(1), proxy=True)
            if q == 1:
                return ConvergenceVerdict(CONVERGES_EXACT, {"reason": "identity element"}, FactorialShift(1))
            s = kempner(q)
            prof = divisibility_profile(FactorialShift(1), q)
            assert prof.status == "infinite" and prof.eventually_all
            return ConvergenceVerdict(DIVERGES_EXACT, {
                "order": q, "modulus": q,
                "reason": f"every member contains {{k!+1 : k ∈ D}} with D infinite, "
                          f"and k!+1 ≡ 1 (mod {q}) for every k >= {s}",
            })
        case BohrNeighborhoods():
            if proxy:
                return ConvergenceVerdict(UNKNOWN, {"reason": "non-torsion points: no finitary decision"})
            base = bohr_basic_set([x], Fraction(1, 2 * q))
            v = order_verdict(q, base)
            return ConvergenceVerdict(v.status, {
                **v.certificate, "reason": f"x^n = 1 for every n in {{j·{q}}}, a basic neighbourhood",
            }, base)
        case GeneratedBy(generators=gens):
            return _search_generated(x, gens, search_budget)
    raise TypeError(f"unknown filter {f!r}")


def _search_generated(x: CirclePoint, gens: tuple[OmegaSet, ...], budget: int) -> ConvergenceVerdict:
    # smaller members give larger C-sets, so the meet of all generators is the best candidate
    tried = 0
    for size in range(1, len(gens) + 1):
        for combo in itertools.combinations(gens, size):
            if tried >= budget:
                return ConvergenceVerdict(UNKNOWN, {"reason": "search budget exhausted", "tried": tried})
            tried += 1
            meet = combo[0]
            for g in combo[1:]:
                meet = Intersection(meet, g)
            if meet.finiteness():
                continue
            v = order_verdict(x.order, meet)
            if v.status == CONVERGES_EXACT:
                return ConvergenceVerdict(CONVERGES_EXACT, v.certificate, meet)
            if v.status == DIVERGES_EXACT and size == len(gens):
                return ConvergenceVerdict(DIVERGES_EXACT, {
                    **v.certificate, "reason": "diverges along the smallest member: " + v.certificate["reason"],
                })
    return ConvergenceVerdict(UNKNOWN, {"reason": "no decidable member found", "tried": tried})


def _chunk_max(x: CirclePoint, values: list[int], cancel: Optional[threading.Event]) -> tuple[Fraction, Optional[int]]:
    best, arg = Fraction(-1), None
    for n in values:
        if cancel is not None and cancel.is_set():
            raise Cancelled("empirical scan cancelled")
        d = nearest_int_dist(n * x.angle)
        if d > best:
            best, arg = d, n
    return best, arg


def empirical_tail_with_argmax(x: CirclePoint, b: OmegaSet, window: tuple[int, int], *,
                               workers: int = 1, chunk: int = 256,
                               cancel: Optional[threading.Event] = None) -> tuple[Fraction, int]:
    start, end = window
    if not 0 <= start < end:
        raise ValueError(f"window must be a nonempty index range, got {window}")
    values = list(itertools.islice(b.iter_values(), start, end))
    if not values:
        raise ValueError("window lies past the end of a finite set")
    chunks = [values[i:i + chunk] for i in range(0, len(values), chunk)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(lambda c: _chunk_max(x, c, cancel), chunks))
    else:
        results = [_chunk_max(x, c, cancel) for c in chunks]
    # first maximal index wins, independent of chunking
    best, arg = results[0]
    for d, n in results[1:]:
        if d > best:
            best, arg = d, n
    return best, arg


def empirical_tail(x: CirclePoint, b: OmegaSet, window: tuple[int, int], **kwargs) -> Fraction:
    """max of d(x^n, 1) over the elements of b with enumeration index in [start, end)."""
    return empirical_tail_with_argmax(x, b, window, **kwargs)[0]


def empirical_verdict(x: CirclePoint, b: OmegaSet, window: tuple[int, int], tol: Fraction) -> ConvergenceVerdict:
    worst, n = empirical_tail_with_argmax(x, b, window)
    cert = {"window": list(window), "max_tail_distance": worst, "tolerance": tol}
    if worst <= tol:
        return ConvergenceVerdict(EMPIRICAL_CONVERGES, cert)
    return ConvergenceVerdict(EMPIRICAL_DIVERGES, {**cert, "witness_n": n, "distance": worst})


def hadamard_counterexample_check(q_max: int) -> dict:
    """Along C = {4^k}: convergence forces order 2^j, and then convergence along B = {2·4^k} follows."""
    if q_max < 2:
        raise ValueError("q_max must be >= 2")
    evens, odds = Positions(Powers(2), 0), Positions(Powers(2), 1)
    conv_c, failures, points = [], [], 0
    for x in torsion_points(q_max):
        points += 1
        vc = in_C_B(x, evens)
        if vc.status == CONVERGES_EXACT:
            vb = in_C_B(x, odds)
            q = x.order
            if q & (q - 1) or vb.status != CONVERGES_EXACT:
                failures.append(str(x))
            if q not in conv_c:
                conv_c.append(q)
        elif vc.status != DIVERGES_EXACT:
            failures.append(str(x))
    return {
        "q_max": q_max,
        "points_checked": points,
        "orders_checked": list(range(1, q_max + 1)),
        "orders_convergent_along_C": conv_c,
        "failures": failures,
        "passed": not failures,
    }
