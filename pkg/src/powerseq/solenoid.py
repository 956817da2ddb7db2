"""Coherent sequences in the solenoid and the thin-set limit construction.

An element of the solenoid is truncated at depth m as (z_0, ..., z_m) with
z_{α+1}^{α+1} = z_α. Given a thin A = {a_0 < a_1 < ...} split into B and C,
`build` runs the stage-by-stage root selection and records an exact
certificate: every comparison is between rationals, and the one irrational
quantity √ε_j is handled by squaring or by a rational upper bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .circle import IDENTITY, CirclePoint, circle_dist, circle_pow, minimal_lift, nearest_root
from .omega import (
    OMEGA,
    Factorial,
    FactorialShift,
    OmegaSet,
    Positions,
    TailFrom,
    is_thin,
)

SQRT_SCALE = 10**7  # √ε is bounded above with error below 1/SQRT_SCALE


class NotThin(ValueError):
    pass


class SupNotComputable(ValueError):
    pass


class DegenerateEpsilon(ValueError):
    pass


class TargetDepthTooShallow(ValueError):
    pass


def _q(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class SolenoidElement:
    components: tuple[CirclePoint, ...]

    def __post_init__(self):
        zs = self.components
        if not zs:
            raise ValueError("a solenoid element needs at least level 0")
        for a in range(len(zs) - 1):
            if circle_pow(zs[a + 1], a + 1) != zs[a]:
                raise ValueError(f"incoherent at level {a}: z_{a + 1}^{a + 1} = {circle_pow(zs[a + 1], a + 1)} != {zs[a]}")

    @property
    def depth(self) -> int:
        return len(self.components) - 1

    def __getitem__(self, alpha: int) -> CirclePoint:
        return self.components[alpha]

    def power(self, n: int) -> SolenoidElement:
        return SolenoidElement(tuple(circle_pow(z, n) for z in self.components))

    def to_list(self) -> list[str]:
        return [str(z) for z in self.components]


def embed_rational(t, depth: int) -> SolenoidElement:
    """The character of Q sending 1/α! to t/α!, truncated at `depth`."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    t = Fraction(t)
    return SolenoidElement(tuple(CirclePoint(t / math.factorial(a)) for a in range(depth + 1)))


def identity_element(depth: int) -> SolenoidElement:
    return SolenoidElement((IDENTITY,) * (depth + 1))


def sqrt_upper(x: Fraction, scale: int = SQRT_SCALE) -> Fraction:
    """A rational s with √x < s < √x + 1/scale."""
    p, q = x.numerator, x.denominator
    return Fraction(math.isqrt(p * q * scale * scale) + 1, q * scale)


def dagger_upper(eps: Fraction) -> Fraction:
    """Rational upper bound for √ε/(1-√ε)."""
    s = sqrt_upper(eps)
    if s >= 1:
        raise DegenerateEpsilon(f"√ε is not certifiably below 1 for ε = {eps}")
    return s / (1 - s)


def below_dagger(x: Fraction, eps: Fraction) -> bool:
    """Exactly decide x <= √ε/(1-√ε), via x/(1+x) <= √ε."""
    r = x / (1 + x)
    return r * r <= eps


def _monotone_ratios(spec: OmegaSet) -> bool:
    """Is a_j/a_{j+1} non-increasing, so that the tail sup is the current ratio?

    For k!+c with c >= 0 the cross-multiplied difference is
    (k+1)u^2 + uc((k+1)k + 1) >= 0 with u = k!, so consecutive ratios drop.
    Tails and every-other-element subsequences of such sets inherit this.
    """
    match spec:
        case Factorial():
            return True
        case FactorialShift(c=c, domain=dom):
            return c >= 0 and dom == OMEGA
        case TailFrom(inner=inner) | Positions(inner=inner):
            return _monotone_ratios(inner)
    return False


@dataclass
class ThinSchedule:
    set_descriptor: str
    a: list[int]
    eps: list[Fraction]
    gamma: list[int]
    start_offset: int = 0
    sup_source: str = "monotone"
    checks: dict = field(default_factory=dict)

    @property
    def stages(self) -> int:
        return len(self.gamma) - 1

    def to_dict(self):
        return {
            "set": self.set_descriptor,
            "a": [str(x) for x in self.a],
            "eps": [_q(e) for e in self.eps],
            "gamma": self.gamma,
            "start_offset": self.start_offset,
            "sup_source": self.sup_source,
            "checks": self.checks,
        }


def _largest_gamma(eps: Fraction) -> int:
    # largest γ with γ! <= 1/√ε, i.e. (γ!)^2 ε <= 1
    g = 1
    while math.factorial(g + 1) ** 2 * eps <= 1:
        g += 1
    return g


def make_schedule(a_spec: OmegaSet, stages: int,
                  ratio_sup: Optional[Callable[[int], Fraction]] = None) -> ThinSchedule:
    """Exact ε_j and γ_j for j <= stages, with every schedule invariant checked.

    Without `ratio_sup` the set needs a monotone-ratio certificate. With it,
    ratio_sup(j) must return sup over l >= j of a_l/a_{l+1} (indices after the
    start offset); it is trusted but checked against the visible ratios.
    """
    if stages < 0:
        raise ValueError("stages must be >= 0")
    verdict = is_thin(a_spec)
    if verdict.answer != "yes":
        raise NotThin(f"{a_spec} is not certified thin: {verdict.reason}")
    if ratio_sup is None and not _monotone_ratios(a_spec):
        raise SupNotComputable(f"no monotone-ratio certificate for {a_spec}; pass ratio_sup")
    it = a_spec.iter_values()
    offset = 0
    head = []
    for v in it:
        if v > 0:
            head.append(v)
            break
        offset += 1
    a = head + list(itertools.islice(it, stages + 1))
    if ratio_sup is None:
        eps = [Fraction(a[j], a[j + 1]) for j in range(stages + 1)]
        source = "monotone"
    else:
        eps = [Fraction(ratio_sup(j)) for j in range(stages + 1)]
        source = "caller"
    if eps[0] >= 1:
        raise DegenerateEpsilon(f"ε at the start offset is {eps[0]}; √ε must be < 1")
    gamma = [0] + [_largest_gamma(eps[j]) for j in range(stages)]
    sched = ThinSchedule(str(a_spec), a[: stages + 2], eps, gamma, offset, source)
    sched.checks = verify_schedule(sched)
    if not all(sched.checks[k] for k in ("eps_non_increasing", "ratio_below_eps", "eps_at_most_one",
                                          "gamma_non_decreasing", "gamma_maximal", "star")):
        raise ValueError(f"schedule invariants failed: {sched.checks}")
    return sched


def verify_schedule(s: ThinSchedule) -> dict:
    n = s.stages
    eps, a, g = s.eps, s.a, s.gamma
    star_pairs = 0
    star_ok = True
    for j in range(n + 1):
        prod = Fraction(1)
        for k in range(j + 1, n + 1):
            prod *= eps[k - 1]
            lhs = Fraction(a[j] * math.factorial(g[k]), a[k]) ** 2
            star_ok &= lhs <= prod <= eps[j] ** (k - j)
            star_pairs += 1
    return {
        "eps_non_increasing": all(x >= y for x, y in zip(eps, eps[1:])),
        "ratio_below_eps": all(Fraction(a[j], a[j + 1]) <= eps[j] for j in range(n + 1)),
        "eps_at_most_one": all(e <= 1 for e in eps),
        "gamma_non_decreasing": all(x <= y for x, y in zip(g, g[1:])),
        "gamma_maximal": all(
            math.factorial(g[j + 1]) ** 2 * eps[j] <= 1 < math.factorial(g[j + 1] + 1) ** 2 * eps[j]
            for j in range(n)
        ),
        "star": star_ok,
        "star_pairs": star_pairs,
    }


@dataclass
class BuildCertificate:
    schedule: ThinSchedule
    in_b: list[bool]
    stages: list[dict] = field(default_factory=list)
    steps: list[dict] = field(default_factory=list)
    dagger: list[dict] = field(default_factory=list)
    final: list[dict] = field(default_factory=list)
    tail_bound: Optional[Fraction] = None

    @property
    def ok(self) -> bool:
        return (
            all(s["cond1"] and s["cond2"] for s in self.stages)
            and all(s["ok"] for s in self.steps)
            and all(d["exact_ok"] and d["ub_ok"] for d in self.dagger)
            and all(f["ok"] for f in self.final)
        )

    def certified_levels(self) -> dict[int, list[int]]:
        return {j: list(range(self.schedule.gamma[j] + 1)) for j in range(len(self.in_b))}

    def final_bound(self, j: int) -> Fraction:
        return dagger_upper(self.schedule.eps[j])

    def to_dict(self):
        return {
            "schedule": self.schedule.to_dict(),
            "in_B": self.in_b,
            "stages": self.stages,
            "telescoping_steps": {"count": len(self.steps), "all_ok": all(s["ok"] for s in self.steps)},
            "dagger": self.dagger,
            "final": self.final,
            "certified_levels": {str(j): v for j, v in self.certified_levels().items()},
            "tail_bound": _q(self.tail_bound) if self.tail_bound is not None else None,
            "ok": self.ok,
        }


def _extend(z_low: list[CirclePoint], depth: int) -> list[CirclePoint]:
    # canonical lift above the fixed levels: angle / (α+1)
    zs = list(z_low)
    while len(zs) <= depth:
        zs.append(minimal_lift(zs[-1], len(zs)))
    return zs


def build(schedule: ThinSchedule, b_mask: Union[Sequence[bool], Callable[[int], bool]],
          v: SolenoidElement, w: SolenoidElement,
          stages: Optional[int] = None) -> tuple[SolenoidElement, BuildCertificate]:
    """Run stages 0..L and certify the root and step conditions, the telescoping bound and the limits.

    b_mask(j) (or b_mask[j]) says whether a_j lies in B; targets are v on B
    and w on C. The returned element is the stage-L point z_L.
    """
    L = schedule.stages if stages is None else stages
    if L > schedule.stages:
        raise ValueError(f"schedule only covers {schedule.stages} stages")
    in_b = [bool(b_mask(j) if callable(b_mask) else b_mask[j]) for j in range(L + 1)]
    gam, a, eps = schedule.gamma, schedule.a, schedule.eps
    top = max(gam[: L + 1])
    for name, t in (("v", v), ("w", w)):
        if t.depth < top:
            raise TargetDepthTooShallow(f"{name} has depth {t.depth}, need >= {top}")
    if any(e >= 1 for e in eps[: L + 1]):
        raise DegenerateEpsilon("ε_j must stay below 1")
    cert = BuildCertificate(schedule, in_b)

    history: list[list[CirclePoint]] = []
    prev: Optional[list[CirclePoint]] = None
    for k in range(L + 1):
        g, ak = gam[k], a[k]
        target = v if in_b[k] else w
        anchor = prev[g] if prev is not None else IDENTITY
        root = nearest_root(target[g], ak, anchor)
        low = [root]
        for alpha in range(g, 0, -1):
            low.append(circle_pow(low[-1], alpha))
        zk = _extend(low[::-1], top)
        cond1 = all(circle_pow(zk[al], ak) == target[al] for al in range(g + 1))
        bound = Fraction(math.factorial(g), ak)
        dists = [circle_dist(zk[al], prev[al]) for al in range(g + 1)] if prev is not None else []
        cert.stages.append({
            "k": k, "a_k": str(ak), "in_B": in_b[k], "gamma_k": g, "chosen": str(root),
            "cond1": cond1,
            "cond2": all(d <= bound for d in dists),
            "cond2_bound": _q(bound),
            "cond2_distances": [_q(d) for d in dists],
        })
        history.append(zk)
        prev = zk

    # per-step: a_j d(z_{k,α}, z_{k-1,α}) <= √ε_j^{k-j}, by squaring
    for j in range(L + 1):
        for k in range(j + 1, L + 1):
            for al in range(gam[j] + 1):
                x = a[j] * circle_dist(history[k][al], history[k - 1][al])
                cert.steps.append({"j": j, "k": k, "alpha": al, "ok": x * x <= eps[j] ** (k - j)})

    for j in range(L + 1):
        s_hi = sqrt_upper(eps[j])
        ub = dagger_upper(eps[j])
        for ell in range(j + 1, L + 1):
            geo = sum((s_hi ** i for i in range(1, ell - j + 1)), Fraction(0))
            for al in range(gam[j] + 1):
                x = a[j] * circle_dist(history[ell][al], history[j][al])
                cert.dagger.append({
                    "j": j, "l": ell, "alpha": al, "value": _q(x),
                    "geometric_ub": _q(geo), "ub": _q(ub),
                    "exact_ok": below_dagger(x, eps[j]),
                    "ub_ok": x <= geo <= ub,
                })

    z = SolenoidElement(tuple(history[-1]))
    for j in range(L + 1):
        ub = dagger_upper(eps[j])
        target = v if in_b[j] else w
        for al in range(gam[j] + 1):
            d = circle_dist(circle_pow(z[al], a[j]), target[al])
            cert.final.append({
                "j": j, "a_j": str(a[j]), "in_B": in_b[j], "alpha": al,
                "distance": _q(d), "bound": _q(ub), "ok": d <= ub,
            })
    # the remaining limit moves levels α <= γ_L by at most (1/a_L)·√ε_L/(1-√ε_L)
    cert.tail_bound = dagger_upper(eps[L]) / a[L]
    return z, cert
