"""Exact Lebesgue measure of finite approximations to C^T_B, plus Haar Monte Carlo.

Subsets of T are finite unions of open intervals with rational endpoints.
Boundary points are never tracked, so touching intervals merge.
Monte Carlo angles are k / 2**53 with k a uniform 53-bit integer; membership
is decided by exact integer comparison against scaled endpoints.
"""

from __future__ import annotations

import bisect
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np

from .omega import OmegaSet

ANGLE_BITS = 53
SCALE = 1 << ANGLE_BITS
BLOCK = 8192
DEFAULT_BUDGET = 10**6

Interval = tuple[Fraction, Fraction]


class IntervalUnion:
    """Sorted, pairwise disjoint open intervals inside [0, 1)."""

    __slots__ = ("intervals",)

    def __init__(self, intervals: Iterable[tuple] = ()):
        clipped = []
        for lo, hi in intervals:
            lo, hi = max(Fraction(lo), Fraction(0)), min(Fraction(hi), Fraction(1))
            if lo < hi:
                clipped.append((lo, hi))
        clipped.sort()
        merged: list[Interval] = []
        for lo, hi in clipped:
            if merged and lo <= merged[-1][1]:
                if hi > merged[-1][1]:
                    merged[-1] = (merged[-1][0], hi)
            else:
                merged.append((lo, hi))
        self.intervals: tuple[Interval, ...] = tuple(merged)

    @classmethod
    def _trusted(cls, intervals: list[Interval]) -> IntervalUnion:
        u = cls.__new__(cls)
        u.intervals = tuple(intervals)
        return u

    @classmethod
    def full(cls) -> IntervalUnion:
        return cls([(0, 1)])

    @classmethod
    def empty(cls) -> IntervalUnion:
        return cls()

    def __len__(self) -> int:
        return len(self.intervals)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalUnion) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __repr__(self) -> str:
        body = ", ".join(f"({lo}, {hi})" for lo, hi in self.intervals)
        return f"IntervalUnion([{body}])"

    @property
    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.intervals), Fraction(0))

    def contains(self, t) -> bool:
        t = Fraction(t) % 1
        if t == 0:
            return self._wraps
        i = bisect.bisect_right(self.intervals, (t, Fraction(2))) - 1
        return i >= 0 and self.intervals[i][0] < t < self.intervals[i][1]

    @property
    def _wraps(self) -> bool:
        # on the circle, 0 is interior when arcs touch both ends of [0, 1)
        iv = self.intervals
        return bool(iv) and iv[0][0] == 0 and iv[-1][1] == 1

    def intersect(self, other: IntervalUnion) -> IntervalUnion:
        a, b = self.intervals, other.intervals
        out, i, j = [], 0, 0
        while i < len(a) and j < len(b):
            lo, hi = max(a[i][0], b[j][0]), min(a[i][1], b[j][1])
            if lo < hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalUnion._trusted(out)

    def union(self, other: IntervalUnion) -> IntervalUnion:
        return IntervalUnion(self.intervals + other.intervals)

    def complement(self) -> IntervalUnion:
        out, prev = [], Fraction(0)
        for lo, hi in self.intervals:
            if prev < lo:
                out.append((prev, lo))
            prev = hi
        if prev < 1:
            out.append((prev, Fraction(1)))
        return IntervalUnion._trusted(out)

    def shift(self, t) -> IntervalUnion:
        """Rotate by t (mod 1); intervals crossing 1 are split."""
        t = Fraction(t) % 1
        pieces = []
        for lo, hi in self.intervals:
            lo, hi = lo + t, hi + t
            if hi <= 1:
                pieces.append((lo, hi))
            elif lo >= 1:
                pieces.append((lo - 1, hi - 1))
            else:
                pieces += [(lo, Fraction(1)), (Fraction(0), hi - 1)]
        return IntervalUnion(pieces)

    def scaled_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer bounds [lo_k, hi_k] with k/2**53 ∈ (lo, hi) iff lo_k <= k <= hi_k."""
        los = [math.floor(lo * SCALE) + 1 for lo, _ in self.intervals]
        his = [math.ceil(hi * SCALE) - 1 for _, hi in self.intervals]
        return np.array(los, dtype=np.int64), np.array(his, dtype=np.int64)

    def contains_scaled(self, ks: np.ndarray, bounds=None) -> np.ndarray:
        """Vectorized exact membership of the angles ks / 2**53."""
        los, his = bounds if bounds is not None else self.scaled_bounds()
        if len(los) == 0:
            return np.zeros(np.shape(ks), dtype=bool)
        idx = np.searchsorted(los, ks, side="right") - 1
        safe = np.clip(idx, 0, None)
        out = (idx >= 0) & (ks <= his[safe])
        if self._wraps:
            out |= ks == 0
        return out


def near_one_preimage(n: int, eps) -> IntervalUnion:
    """{θ ∈ [0,1) : ||nθ|| < eps}: n arcs of width 2·eps/n centred at j/n."""
    eps = Fraction(eps)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 < eps <= Fraction(1, 2):
        raise ValueError(f"eps must lie in (0, 1/2], got {eps}")
    w = eps / n
    arcs = [(Fraction(0), w)]
    arcs += [(Fraction(j, n) - w, Fraction(j, n) + w) for j in range(1, n)]
    arcs.append((1 - w, Fraction(1)))
    return IntervalUnion(arcs)


def preimage_candidates(u: IntervalUnion, n: int, eps) -> int:
    """How many arcs of near_one_preimage(n, eps) can meet u (an upper bound on the output size)."""
    eps = Fraction(eps)
    return sum(math.ceil(hi * n + eps) - math.floor(lo * n - eps) + 1 for lo, hi in u.intervals)


def intersect_with_preimage(u: IntervalUnion, n: int, eps) -> IntervalUnion:
    """u ∩ near_one_preimage(n, eps), visiting only the arcs that overlap u."""
    eps = Fraction(eps)
    out = []
    for lo, hi in u.intervals:
        for j in range(math.floor(lo * n - eps), math.ceil(hi * n + eps) + 1):
            a, b = max(lo, (j - eps) / n), min(hi, (j + eps) / n)
            if a < b:
                out.append((a, b))
    return IntervalUnion(out)


def _parse_group(group: str, dim: Optional[int]) -> tuple[str, int]:
    g = group.replace(" ", "")
    if g in ("T", "O2", "O(2)"):
        return ("O2" if g.startswith("O") else "T"), 1
    m = re.fullmatch(r"T\^(\d+|k)", g)
    if not m:
        raise ValueError(f"unknown group {group!r}; expected T, T^k or O2")
    k = dim if m.group(1) == "k" else int(m.group(1))
    if not k or k < 1:
        raise ValueError("T^k needs a positive dimension")
    return "Tk", k


@dataclass(frozen=True)
class Estimate:
    estimate: float
    stderr: float
    hits: int
    samples: int
    seed: int
    group: str

    def to_dict(self):
        return {"estimate": self.estimate, "stderr": self.stderr, "hits": self.hits,
                "samples": self.samples, "seed": self.seed, "group": self.group}


def _draw(rng: np.random.Generator, kind: str, dim: int, size: int):
    if kind == "T":
        return rng.integers(0, SCALE, size=size, dtype=np.int64)
    if kind == "Tk":
        return rng.integers(0, SCALE, size=(size, dim), dtype=np.int64)
    flips = rng.integers(0, 2, size=size, dtype=np.int8).astype(bool)
    return flips, rng.integers(0, SCALE, size=size, dtype=np.int64)


def haar_batches(group: str, samples: int, seed: int, dim: Optional[int] = None):
    """Yield the sample blocks in order; block i depends only on (seed, i)."""
    kind, k = _parse_group(group, dim)
    nblocks = -(-samples // BLOCK)
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(nblocks)):
        size = min(BLOCK, samples - i * BLOCK)
        yield _draw(np.random.default_rng(child), kind, k, size)


def mc_haar_estimate(group: str, predicate: Callable, samples: int, seed: int, *,
                     dim: Optional[int] = None, workers: int = 1) -> Estimate:
    """Fraction of Haar-random elements satisfying `predicate`.

    Samples are integer-scaled: T gives an int64 array of k (angle k/2**53),
    T^k an (n, k) array, O2 a pair (flip mask, k). The predicate maps a batch
    to a boolean array. The result does not depend on `workers`.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    kind, k = _parse_group(group, dim)
    nblocks = -(-samples // BLOCK)
    children = np.random.SeedSequence(seed).spawn(nblocks)

    def run(i: int) -> int:
        size = min(BLOCK, samples - i * BLOCK)
        batch = _draw(np.random.default_rng(children[i]), kind, k, size)
        return int(np.count_nonzero(predicate(batch)))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            hits = sum(ex.map(run, range(nblocks)))
    else:
        hits = sum(map(run, range(nblocks)))
    p = hits / samples
    label = "T" if kind == "T" else "O2" if kind == "O2" else f"T^{k}"
    return Estimate(p, math.sqrt(p * (1 - p) / samples), hits, samples, seed, label)


def _frac_pair(x: Fraction) -> list[str]:
    return [str(x.numerator), str(x.denominator)]


@dataclass
class MeasureReport:
    set_descriptor: str
    eps: Fraction
    requested: int
    constraints: list[int] = field(default_factory=list)
    exact_sequence: list[Fraction] = field(default_factory=list)
    interval_counts: list[int] = field(default_factory=list)
    partial: bool = False
    stop_reason: Optional[str] = None
    mc: Optional[dict] = None
    final: Optional[IntervalUnion] = field(default=None, repr=False)

    @property
    def depth(self) -> int:
        return len(self.constraints)

    @property
    def monotone(self) -> bool:
        s = self.exact_sequence
        return all(a >= b for a, b in zip(s, s[1:]))

    def to_dict(self):
        return {
            "set": self.set_descriptor,
            "eps": str(self.eps),
            "requested_constraints": self.requested,
            "constraints": [str(n) for n in self.constraints],
            "depth": self.depth,
            "exact_sequence": [_frac_pair(x) for x in self.exact_sequence],
            "interval_counts": self.interval_counts,
            "non_increasing": self.monotone,
            "partial": self.partial,
            "stop_reason": self.stop_reason,
            "mc": self.mc,
        }


def c_set_approx(b: OmegaSet, eps, m: int, *, samples: int = 0, seed: int = 0,
                 budget: int = DEFAULT_BUDGET) -> MeasureReport:
    """Measure of ∩_{i<m} {θ : ||b_i θ|| < eps} over the first m nonzero elements of b.

    With samples > 0 every prefix value is cross-checked by Monte Carlo on one
    shared sample set; a value more than 4σ (σ from the exact measure) away is flagged.
    """
    eps = Fraction(eps)
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 0 < eps <= Fraction(1, 2):
        raise ValueError(f"eps must lie in (0, 1/2], got {eps}")
    rep = MeasureReport(str(b), eps, m)
    u = IntervalUnion.full()
    it = (n for n in b.iter_values() if n != 0)
    for n in it:
        if rep.depth >= m:
            break
        if preimage_candidates(u, n, eps) > budget:
            rep.partial, rep.stop_reason = True, f"interval budget {budget} exceeded at constraint n={n}"
            break
        u = intersect_with_preimage(u, n, eps)
        rep.constraints.append(n)
        rep.exact_sequence.append(u.measure)
        rep.interval_counts.append(len(u))
    else:
        if rep.depth < m:
            rep.partial, rep.stop_reason = True, "set exhausted"
    rep.final = u
    if samples > 0 and rep.constraints:
        rep.mc = _cross_check(rep, samples, seed)
    return rep


def _cross_check(rep: MeasureReport, samples: int, seed: int) -> dict:
    unions, u = [], IntervalUnion.full()
    for n in rep.constraints:
        u = intersect_with_preimage(u, n, rep.eps)
        unions.append((u, u.scaled_bounds()))
    counts = [0] * len(unions)
    for batch in haar_batches("T", samples, seed):
        for i, (ui, bounds) in enumerate(unions):
            counts[i] += int(np.count_nonzero(ui.contains_scaled(batch, bounds)))
    checks = []
    for exact, hits in zip(rep.exact_sequence, counts):
        p = float(exact)
        sigma = math.sqrt(p * (1 - p) / samples)
        est = hits / samples
        dev = abs(est - p)
        checks.append({
            "exact": str(exact), "estimate": est,
            "stderr": math.sqrt(est * (1 - est) / samples),
            "sigma_exact": sigma,
            "within_4sigma": dev <= 4 * sigma if sigma > 0 else hits == 0,
        })
    return {"samples": samples, "seed": seed, "checks": checks,
            "flagged": not all(c["within_4sigma"] for c in checks)}
