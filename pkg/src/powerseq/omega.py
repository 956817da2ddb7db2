"""Symbolic descriptors for infinite subsets of omega = {0, 1, 2, ...}.

Sets are never materialized. Each kind knows how to enumerate itself in
increasing order, test membership, and (where possible) expose one of two
exact normal forms:

* an *eventually periodic* form (`Periodic`): membership is decided by a finite
  head below `start` and by ``n % period in residues`` from `start` on;
* a *residue cycle* modulo m: past some index the residues of the elements
  mod m repeat with a fixed cycle. Factorial, shifted-factorial and power sets
  all have one, which is what makes divisibility and containment exact for them.

Verdicts built from those forms are exact; anything else is reported as
empirical.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Iterator, Optional

# Largest element (in bits) that enumeration will produce before giving up.
MAX_BITS = 1 << 17
# Candidates a filtered enumeration may reject in a row.
STEP_BUDGET = 2_000_000
# Largest head a periodic normal form may carry.
HEAD_LIMIT = 2_000_000


class ResourceLimitError(RuntimeError):
    """Enumeration exceeded the configured big-integer or step budget."""


def _guard(v: int) -> int:
    if v.bit_length() > MAX_BITS:
        raise ResourceLimitError(f"element exceeds {MAX_BITS}-bit budget")
    return v


@lru_cache(maxsize=4096)
def kempner(m: int) -> int:
    """Smallest k with m | k!."""
    if m < 1:
        raise ValueError("m must be positive")
    k, r = 0, 1 % m
    while r:
        k += 1
        r = r * k % m
    return k


def factorial_index(n: int) -> Optional[int]:
    """k >= 1 with k! == n, else None (1 maps to k=1)."""
    if n < 1:
        return None
    k, f = 1, 1
    while f < n:
        k += 1
        f *= k
    return k if f == n else None


# ---------------------------------------------------------------------------
# eventually periodic normal form


@dataclass(frozen=True)
class Periodic:
    period: int
    residues: frozenset
    start: int
    head: frozenset = frozenset()

    def contains(self, n: int) -> bool:
        if n < 0:
            return False
        if n < self.start:
            return n in self.head
        return n % self.period in self.residues

    @cached_property
    def _offsets(self) -> tuple[int, ...]:
        return tuple(o for o in range(self.period) if (self.start + o) % self.period in self.residues)

    @property
    def infinite(self) -> bool:
        return bool(self.residues)

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.residues), self.period)

    def iter_values(self) -> Iterator[int]:
        yield from sorted(self.head)
        offs = self._offsets
        if not offs:
            return
        base = self.start
        while True:
            for o in offs:
                yield base + o
            base += self.period

    def count_below(self, n: int) -> int:
        c = sum(1 for h in self.head if h < n)
        if n > self.start:
            full, rem = divmod(n - self.start, self.period)
            c += full * len(self._offsets) + sum(1 for o in self._offsets if o < rem)
        return c

    def representative(self, r: int, at_least: int = 0) -> int:
        """Smallest n >= max(start, at_least) with n = r mod period."""
        lo = max(self.start, at_least)
        return lo + ((r - lo) % self.period)

    @staticmethod
    def finite(values) -> Periodic:
        vals = frozenset(values)
        return Periodic(1, frozenset(), (max(vals) + 1) if vals else 0, vals)

    @staticmethod
    def combine(a: Periodic, b: Periodic, op: Callable[[bool, bool], bool]) -> Optional[Periodic]:
        period = math.lcm(a.period, b.period)
        start = max(a.start, b.start)
        if start > HEAD_LIMIT or period > HEAD_LIMIT:
            return None
        residues = frozenset(
            r for r in range(period)
            if op(a.contains(start + (r - start) % period), b.contains(start + (r - start) % period))
        )
        head = frozenset(n for n in range(start) if op(a.contains(n), b.contains(n)))
        return Periodic(period, residues, start, head)


# ---------------------------------------------------------------------------
# set kinds


class OmegaSet:
    """Base class for set descriptors. Subclasses are frozen dataclasses."""

    def iter_values(self) -> Iterator[int]:
        raise NotImplementedError

    def contains(self, n: int) -> bool:
        raise NotImplementedError

    def __contains__(self, n: int) -> bool:
        return self.contains(n)

    @cached_property
    def periodic(self) -> Optional[Periodic]:
        return None

    def finiteness(self) -> Optional[bool]:
        """True if certainly finite, False if certainly infinite, None if unknown."""
        p = self.periodic
        if p is not None:
            return not p.infinite
        return None

    @property
    def is_sparse(self) -> bool:
        """Certified to have asymptotic density 0."""
        p = self.periodic
        return p is not None and not p.infinite

    def residue_cycle(self, m: int) -> Optional[tuple[int, tuple[int, ...]]]:
        """(start, cycle): element i mod m equals cycle[(i - start) % len(cycle)] for i >= start."""
        p = self.periodic
        if p is None or not p.infinite:
            return None
        span = math.lcm(p.period, m)
        if span > HEAD_LIMIT:
            return None
        # one block of length lcm(period, m) past the head repeats forever mod m
        block = [p.start + base + o for base in range(0, span, p.period) for o in p._offsets]
        return len(p.head), tuple(v % m for v in block)

    def __or__(self, other: OmegaSet) -> OmegaSet:
        return Union(self, other)

    def __and__(self, other: OmegaSet) -> OmegaSet:
        return Intersection(self, other)

    def __sub__(self, other: OmegaSet) -> OmegaSet:
        return Difference(self, other)


@dataclass(frozen=True)
class Factorial(OmegaSet):
    """{k! : k in omega} = {1, 2, 6, 24, ...}; element i is (i+1)!."""

    def iter_values(self):
        f = 1
        for k in itertools.count(1):
            f *= k
            yield _guard(f)

    def contains(self, n):
        return factorial_index(n) is not None

    def finiteness(self):
        return False

    @property
    def is_sparse(self):
        return True

    def residue_cycle(self, m):
        return max(0, kempner(m) - 1), (0,)

    def __str__(self):
        return "factorial"


@dataclass(frozen=True)
class Arithmetic(OmegaSet):
    """{a + d*k : k in omega}."""

    a: int
    d: int

    def __post_init__(self):
        if self.a < 0 or self.d < 1:
            raise ValueError(f"arith({self.a},{self.d}) needs a >= 0 and d >= 1")

    @cached_property
    def periodic(self):
        return Periodic(self.d, frozenset({self.a % self.d}), self.a)

    def iter_values(self):
        return itertools.count(self.a, self.d)

    def contains(self, n):
        return n >= self.a and (n - self.a) % self.d == 0

    def __str__(self):
        return f"arith({self.a},{self.d})"


OMEGA = Arithmetic(0, 1)


@dataclass(frozen=True)
class Multiples(OmegaSet):
    """{m*k : k in omega}, including 0."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("mult(m) needs m >= 1")

    @cached_property
    def periodic(self):
        return Periodic(self.m, frozenset({0}), 0)

    def iter_values(self):
        return itertools.count(0, self.m)

    def contains(self, n):
        return n >= 0 and n % self.m == 0

    def __str__(self):
        return f"mult({self.m})"


EvenMultiples = Multiples


@dataclass(frozen=True)
class Residues(OmegaSet):
    """{n >= 0 : n mod m in residues}."""

    m: int
    residues: tuple[int, ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("residues(m; ...) needs m >= 1")
        r = self.residues
        if any(not 0 <= x < self.m for x in r) or any(a >= b for a, b in zip(r, r[1:])):
            raise ValueError(f"residues must be strictly increasing and in [0, {self.m}): {list(r)}")

    @cached_property
    def periodic(self):
        return Periodic(self.m, frozenset(self.residues), 0)

    def iter_values(self):
        return self.periodic.iter_values()

    def contains(self, n):
        return n >= 0 and n % self.m in self.periodic.residues

    def __str__(self):
        return f"residues({self.m}; " + ",".join(map(str, self.residues)) + ")"


@dataclass(frozen=True)
class FactorialShift(OmegaSet):
    """{k! + c : k in domain}, negative values dropped, duplicates (0! = 1!) collapsed."""

    c: int
    domain: OmegaSet = OMEGA

    def iter_with_k(self) -> Iterator[tuple[int, int]]:
        """(value, k) pairs; for the collapsed value 1+c the larger k is reported."""
        prev = None
        f, fk = 1, 0
        for k in self.domain.iter_values():
            while fk < k:
                fk += 1
                f *= fk
            v = _guard(f + self.c)
            if v < 0:
                continue
            if prev is not None and v == prev[0]:
                prev = (v, k)
                continue
            if prev is not None:
                yield prev
            prev = (v, k)
        if prev is not None:
            yield prev

    def iter_values(self):
        for v, _ in self.iter_with_k():
            yield v

    def contains(self, n):
        if n < 0:
            return False
        k = factorial_index(n - self.c)
        if k is None:
            return False
        if k == 1:
            return self.domain.contains(0) or self.domain.contains(1)
        return self.domain.contains(k)

    def finiteness(self):
        return self.domain.finiteness()

    @cached_property
    def periodic(self):
        if self.domain.finiteness():
            return Periodic.finite(self.iter_values())
        return None

    @property
    def is_sparse(self):
        return True

    def residue_cycle(self, m):
        if self.domain.finiteness() is not False:
            return None
        s = kempner(m)
        start = 0
        for _, k in self.iter_with_k():
            if k >= s:
                break
            start += 1
        return start, (self.c % m,)

    def __str__(self):
        if self.domain == OMEGA:
            return f"factshift({self.c})"
        return f"factshift({self.c},{self.domain})"


@dataclass(frozen=True)
class Powers(OmegaSet):
    """{b^j : j in omega}."""

    b: int

    def __post_init__(self):
        if self.b < 2:
            raise ValueError("powers(b) needs b >= 2")

    def iter_values(self):
        v = 1
        while True:
            yield _guard(v)
            v *= self.b

    def contains(self, n):
        if n < 1:
            return False
        while n % self.b == 0:
            n //= self.b
        return n == 1

    def finiteness(self):
        return False

    @property
    def is_sparse(self):
        return True

    def residue_cycle(self, m):
        seen: dict[int, int] = {}
        seq = []
        r = 1 % m
        while r not in seen:
            seen[r] = len(seq)
            seq.append(r)
            r = r * self.b % m
        s = seen[r]
        return s, tuple(seq[s:])

    def __str__(self):
        return f"powers({self.b})"


@dataclass(frozen=True)
class Explicit(OmegaSet):
    values: tuple[int, ...]
    finite: bool = True

    def __post_init__(self):
        if not self.finite:
            raise ValueError("explicit lists must be declared finite; infinitude cannot be certified")
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if any(v < 0 for v in vals):
            raise ValueError("explicit lists must be non-negative")
        if any(a >= b for a, b in zip(vals, vals[1:])):
            raise ValueError(f"explicit list must be strictly increasing: {list(vals)}")

    @cached_property
    def periodic(self):
        return Periodic.finite(self.values)

    def iter_values(self):
        return iter(self.values)

    def contains(self, n):
        return n in self.periodic.head

    def __str__(self):
        return "explicit[" + ",".join(map(str, self.values)) + "]"


def _iter_filtered(source: Iterator[int], keep: Callable[[int], bool]) -> Iterator[int]:
    misses = 0
    for v in source:
        if keep(v):
            misses = 0
            yield v
        else:
            misses += 1
            if misses > STEP_BUDGET:
                raise ResourceLimitError("filtered enumeration exceeded step budget")


@dataclass(frozen=True)
class Union(OmegaSet):
    left: OmegaSet
    right: OmegaSet

    @cached_property
    def periodic(self):
        a, b = self.left.periodic, self.right.periodic
        if a is not None and b is not None:
            return Periodic.combine(a, b, lambda x, y: x or y)
        return None

    def iter_values(self):
        if self.periodic is not None:
            yield from self.periodic.iter_values()
            return
        last = None
        for v in heapq.merge(self.left.iter_values(), self.right.iter_values()):
            if v != last:
                yield v
                last = v

    def contains(self, n):
        return self.left.contains(n) or self.right.contains(n)

    def finiteness(self):
        fl, fr = self.left.finiteness(), self.right.finiteness()
        if fl is False or fr is False:
            return False
        if fl and fr:
            return True
        return None

    @property
    def is_sparse(self):
        return self.left.is_sparse and self.right.is_sparse

    def __str__(self):
        return f"({self.left} ∪ {self.right})"


@dataclass(frozen=True)
class Intersection(OmegaSet):
    left: OmegaSet
    right: OmegaSet

    @cached_property
    def periodic(self):
        a, b = self.left.periodic, self.right.periodic
        if a is not None and b is not None:
            return Periodic.combine(a, b, lambda x, y: x and y)
        for fin, other in ((a, self.right), (b, self.left)):
            if fin is not None and not fin.infinite:
                return Periodic.finite(n for n in fin.head if other.contains(n))
        common = finite_meet(self.left, self.right)
        if common is not None:
            return Periodic.finite(common)
        return None

    def iter_values(self):
        if self.periodic is not None:
            yield from self.periodic.iter_values()
            return
        src, other = self.left, self.right
        if other.is_sparse and not src.is_sparse:
            src, other = other, src
        yield from _iter_filtered(src.iter_values(), other.contains)

    def contains(self, n):
        return self.left.contains(n) and self.right.contains(n)

    def finiteness(self):
        f = super().finiteness()
        if f is not None:
            return f
        if self.left.finiteness() or self.right.finiteness():
            return True
        return almost_disjoint(self.left, self.right).value

    @property
    def is_sparse(self):
        return self.left.is_sparse or self.right.is_sparse

    def __str__(self):
        return f"({self.left} ∩ {self.right})"


@dataclass(frozen=True)
class Difference(OmegaSet):
    left: OmegaSet
    right: OmegaSet

    @cached_property
    def periodic(self):
        a, b = self.left.periodic, self.right.periodic
        if a is not None and b is not None:
            return Periodic.combine(a, b, lambda x, y: x and not y)
        if a is not None and not a.infinite:
            return Periodic.finite(n for n in a.head if not self.right.contains(n))
        return None

    def iter_values(self):
        if self.periodic is not None:
            yield from self.periodic.iter_values()
            return
        yield from _iter_filtered(self.left.iter_values(), lambda n: not self.right.contains(n))

    def contains(self, n):
        return self.left.contains(n) and not self.right.contains(n)

    def finiteness(self):
        f = super().finiteness()
        if f is not None:
            return f
        if self.left.finiteness():
            return True
        return subset(self.left, self.right, almost=True).value

    @property
    def is_sparse(self):
        return self.left.is_sparse

    def __str__(self):
        return f"({self.left} ∖ {self.right})"


@dataclass(frozen=True)
class TailFrom(OmegaSet):
    """The inner set with its first `index` elements removed."""

    inner: OmegaSet
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("tail index must be >= 0")

    @cached_property
    def first(self) -> Optional[int]:
        """Smallest retained element, or None if nothing is retained."""
        return next(itertools.islice(self.inner.iter_values(), self.index, None), None)

    @cached_property
    def periodic(self):
        p = self.inner.periodic
        if p is None:
            return None
        if not p.infinite:
            return Periodic.finite(itertools.islice(p.iter_values(), self.index, None))
        lo = self.first
        return Periodic(p.period, p.residues, max(p.start, lo), frozenset(n for n in p.head if n >= lo))

    def iter_values(self):
        return itertools.islice(self.inner.iter_values(), self.index, None)

    def contains(self, n):
        lo = self.first
        return lo is not None and n >= lo and self.inner.contains(n)

    def finiteness(self):
        return self.inner.finiteness()

    @property
    def is_sparse(self):
        return self.inner.is_sparse

    def residue_cycle(self, m):
        rc = self.inner.residue_cycle(m)
        if rc is None:
            return None
        s, cyc = rc
        s2 = max(0, s - self.index)
        n = len(cyc)
        return s2, tuple(cyc[(s2 + self.index - s + u) % n] for u in range(n))

    def __str__(self):
        return f"tail({self.inner},{self.index})"


@dataclass(frozen=True)
class Positions(OmegaSet):
    """Elements of the inner set whose enumeration index has the given parity."""

    inner: OmegaSet
    parity: int

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")

    @cached_property
    def periodic(self):
        p = self.inner.periodic
        if p is None:
            return None
        if not p.infinite:
            return Periodic.finite(itertools.islice(p.iter_values(), self.parity, None, 2))
        per_block = len(p._offsets)
        period = p.period * (1 if per_block % 2 == 0 else 2)
        start = p.start
        if start > HEAD_LIMIT or period > HEAD_LIMIT:
            return None
        rank = p.count_below(start)
        head = frozenset(itertools.islice(itertools.islice(p.iter_values(), 0, rank), self.parity, None, 2))
        residues = set()
        for n in range(start, start + period):
            if p.contains(n):
                if rank % 2 == self.parity:
                    residues.add(n % period)
                rank += 1
        return Periodic(period, frozenset(residues), start, head)

    def iter_values(self):
        return itertools.islice(self.inner.iter_values(), self.parity, None, 2)

    def contains(self, n):
        if not self.inner.contains(n):
            return False
        p = self.inner.periodic
        if p is not None:
            return p.count_below(n) % 2 == self.parity
        for i, v in enumerate(self.inner.iter_values()):
            if v == n:
                return i % 2 == self.parity
            if v > n:
                return False
        return False

    def finiteness(self):
        return self.inner.finiteness()

    @property
    def is_sparse(self):
        return self.inner.is_sparse

    def residue_cycle(self, m):
        rc = self.inner.residue_cycle(m)
        if rc is None:
            return None
        s, cyc = rc
        n = len(cyc)
        t0 = max(0, -((self.parity - s) // 2))
        return t0, tuple(cyc[(2 * (t0 + u) + self.parity - s) % n] for u in range(n))

    def __str__(self):
        return f"{'evenpos' if self.parity == 0 else 'oddpos'}({self.inner})"


# ---------------------------------------------------------------------------
# containment engine


@dataclass(frozen=True)
class Decision:
    """Three-valued answer with the rule that produced it and an optional witness element."""

    value: Optional[bool]
    reason: str
    witness: Optional[int] = None

    def __bool__(self):
        raise TypeError("Decision is three-valued; inspect .value")


UNKNOWN = Decision(None, "no applicable rule")
PREFIX_CHECK = 64


def _as_factshift(s: OmegaSet):
    if isinstance(s, Factorial):
        return 0, OMEGA
    if isinstance(s, FactorialShift):
        return s.c, s.domain
    return None


def _element_at(s: OmegaSet, i: int) -> int:
    return next(itertools.islice(s.iter_values(), i, None))


def _cycle_vs_periodic(b: OmegaSet, p: Periodic, want_in: bool, almost: bool) -> Optional[Decision]:
    """Decide b ⊆ P (want_in) or b ∩ P = ∅ (not want_in), for b with a residue cycle."""
    rc = b.residue_cycle(p.period)
    if rc is None:
        return None
    start, cyc = rc
    # walk the prefix until the cycle is active and elements sit past P's head
    it = b.iter_values()
    i = 0
    for v in it:
        if i >= start and v >= p.start:
            break
        if not almost and p.contains(v) != want_in:
            return Decision(False, "prefix element violates", v)
        i += 1
    else:  # pragma: no cover - residue cycles exist only for infinite sets
        return Decision(True, "finite")
    bad = [u for u, r in enumerate(cyc) if (r in p.residues) != want_in]
    if not bad:
        return Decision(True, f"residues mod {p.period} eventually cycle through {list(cyc)}")
    # the first element at or after index i whose cycle slot is bad
    steps = min((u - (i - start)) % len(cyc) for u in bad)
    witness = v if steps == 0 else next(itertools.islice(it, steps - 1, None))
    return Decision(False, f"residue class mod {p.period} recurs infinitely often", witness)


CYCLE_MODULI = range(2, 65)


def _separating_modulus(b: OmegaSet, w: OmegaSet):
    """(m, cycle_b, cycle_w) for the first modulus whose eventual residues are disjoint."""
    for m in CYCLE_MODULI:
        rb, rw = b.residue_cycle(m), w.residue_cycle(m)
        if rb is None or rw is None:
            return None
        if not set(rb[1]) & set(rw[1]):
            return m, rb, rw
    return None


def finite_meet(b: OmegaSet, w: OmegaSet) -> Optional[list[int]]:
    """All common elements, when eventual residues separate the two sets."""
    sep = _separating_modulus(b, w)
    if sep is None:
        return None
    _, rb, rw = sep
    cands = set(itertools.islice(b.iter_values(), rb[0])) | set(itertools.islice(w.iter_values(), rw[0]))
    return sorted(v for v in cands if b.contains(v) and w.contains(v))


def _cycle_separation(b: OmegaSet, w: OmegaSet, want_disjoint: bool, almost: bool) -> Optional[Decision]:
    """Compare eventual residues of two sets that both carry residue cycles.

    For disjointness, a separating modulus leaves only the two finite prefixes
    to check. For containment it gives a refutation: a residue that b hits
    forever but w eventually never hits.
    """
    if want_disjoint:
        sep = _separating_modulus(b, w)
        if sep is None:
            return None
        if not almost:
            common = finite_meet(b, w)
            if common:
                return Decision(False, "common prefix element", common[0])
        return Decision(True, f"eventual residues mod {sep[0]} are disjoint")
    for m in CYCLE_MODULI:
        rb, rw = b.residue_cycle(m), w.residue_cycle(m)
        if rb is None or rw is None:
            return None
        extra = set(rb[1]) - set(rw[1])
        if extra:
            r = min(extra)
            # an element of b past both prefixes with residue r
            skip = max(rb[0], _index_past(b, _prefix_max(w, rw[0])))
            wit = next(_iter_filtered(itertools.islice(b.iter_values(), skip, None), lambda v: v % m == r))
            return Decision(False, f"b hits residue {r} mod {m} forever, w eventually never does", wit)
    return None


def _prefix_max(s: OmegaSet, count: int) -> int:
    vals = list(itertools.islice(s.iter_values(), count))
    return vals[-1] if vals else -1


def _index_past(s: OmegaSet, value: int) -> int:
    return sum(1 for _ in itertools.takewhile(lambda v: v <= value, s.iter_values()))


def subset(b: OmegaSet, w: OmegaSet, almost: bool = False) -> Decision:
    """Decide b ⊆ w (or b ⊆* w, i.e. b ∖ w finite, when almost=True)."""
    if b == w:
        return Decision(True, "identical descriptors")
    fb = b.finiteness()
    if almost and fb:
        return Decision(True, "finite sets are almost contained in anything")
    pb, pw = b.periodic, w.periodic
    if fb and pb is not None:
        for n in sorted(pb.head):
            if not w.contains(n):
                return Decision(False, "finite set element missing", n)
        return Decision(True, "finite set checked element by element")
    if pb is not None and pw is not None:
        return _periodic_subset(pb, pw, almost)
    if pw is not None:
        d = _cycle_vs_periodic(b, pw, True, almost)
        if d is not None:
            return d
    if pb is not None and pb.infinite and w.is_sparse:
        wit = next((n for n in _iter_filtered(pb.iter_values(), lambda n: not w.contains(n))), None)
        return Decision(False, "positive-density set cannot sit inside a density-0 set", wit)

    d = _structural_subset(b, w, almost)
    if d.value is not None:
        return d
    if fb is False and w.is_sparse:
        dc = _cycle_separation(b, w, False, almost)
        if dc is not None:
            return dc
    if not almost:
        for n in itertools.islice(b.iter_values(), PREFIX_CHECK):
            if not w.contains(n):
                return Decision(False, "bounded enumeration found a missing element", n)
    return d


def _periodic_subset(pb: Periodic, pw: Periodic, almost: bool) -> Decision:
    period = math.lcm(pb.period, pw.period)
    start = max(pb.start, pw.start)
    for r in range(period):
        n = start + (r - start) % period
        if pb.contains(n) and not pw.contains(n):
            return Decision(False, f"residue {r} mod {period} in first set only", n)
    if not almost:
        for n in range(start):
            if pb.contains(n) and not pw.contains(n):
                return Decision(False, "head element missing", n)
    return Decision(True, f"eventually periodic forms compared mod {period}")


def _structural_subset(b: OmegaSet, w: OmegaSet, almost: bool) -> Decision:
    if isinstance(b, Union):
        l, r = subset(b.left, w, almost), subset(b.right, w, almost)
        if l.value is False:
            return l
        if r.value is False:
            return r
        if l.value and r.value:
            return Decision(True, "both parts of the union are contained")
        return UNKNOWN
    if isinstance(w, Intersection):
        l, r = subset(b, w.left, almost), subset(b, w.right, almost)
        if l.value is False:
            return l
        if r.value is False:
            return r
        if l.value and r.value:
            return Decision(True, "contained in both parts of the intersection")
        return UNKNOWN
    if isinstance(b, (Intersection, Difference)):
        d = subset(b.left, w, almost)
        if d.value:
            return d
        if isinstance(b, Intersection):
            d = subset(b.right, w, almost)
            if d.value:
                return d
    if isinstance(b, (TailFrom, Positions)):
        d = subset(b.inner, w, almost)
        if d.value:
            return d
        if isinstance(b, TailFrom) and d.value is False and almost:
            return d
    if isinstance(w, Union):
        for part in (w.left, w.right):
            d = subset(b, part, almost)
            if d.value:
                return d
    if isinstance(w, TailFrom):
        d = subset(b, w.inner, almost)
        if almost or not d.value:
            return d
        firsts = list(itertools.islice(w.inner.iter_values(), w.index))
        for n in firsts:
            if b.contains(n):
                return Decision(False, "element removed by the tail", n)
        return Decision(True, "contained in the inner set and avoids its removed prefix")
    if isinstance(w, Difference):
        d = subset(b, w.left, almost)
        if d.value is False:
            return d
        dj = disjoint(b, w.right, almost)
        if d.value and dj.value:
            return Decision(True, "inside the minuend and disjoint from the subtrahend")
        if d.value and dj.value is False:
            return Decision(False, "meets the removed part", dj.witness)
        return UNKNOWN

    fb, fw = _as_factshift(b), _as_factshift(w)
    if fb is not None and fw is not None:
        (c, dom), (c2, dom2) = fb, fw
        if c != c2:
            wit = next(_iter_filtered(b.iter_values(), lambda n: not w.contains(n)))
            return Decision(False, "k!+c and k!+c' are eventually disjoint for c != c'", wit)
        d = subset(dom, dom2, almost)
        if d.value:
            return Decision(True, f"domain containment: {d.reason}")
        if d.value is False and almost:
            return Decision(False, "domain not almost contained; k -> k!+c is injective for k >= 2")
        if d.value is False and d.witness is not None and d.witness >= 2:
            return Decision(False, "domain element missing", math.factorial(d.witness) + c)
        return UNKNOWN
    if isinstance(b, Powers) and isinstance(w, Powers):
        if _is_power_of(b.b, w.b):
            return Decision(True, f"{b.b} is a power of {w.b}")
        wit = next(v for v in (b.b, b.b * b.b) if not w.contains(v))
        return Decision(False, f"{b.b} is not a power of {w.b}", wit)
    if isinstance(b, Positions) and isinstance(w, Positions) and b.inner == w.inner:
        if b.parity == w.parity:
            return Decision(True, "same positions")
        return Decision(False, "opposite positions are disjoint", next(b.iter_values(), None))
    return UNKNOWN


def _is_power_of(x: int, base: int) -> bool:
    while x % base == 0:
        x //= base
    return x == 1


def disjoint(b: OmegaSet, w: OmegaSet, almost: bool = False) -> Decision:
    """Decide b ∩ w = ∅ (or finite, when almost=True)."""
    fb, fw = b.finiteness(), w.finiteness()
    if almost and (fb or fw):
        return Decision(True, "one side is finite")
    pb, pw = b.periodic, w.periodic
    if pb is not None and pw is not None:
        meet = Periodic.combine(pb, pw, lambda x, y: x and y)
        if meet is not None:
            if meet.infinite:
                return Decision(False, "common residue class", meet.representative(min(meet.residues)))
            if not almost and meet.head:
                return Decision(False, "common element", min(meet.head))
            return Decision(True, "no common residue class")
    for x, y, py in ((b, w, pw), (w, b, pb)):
        if py is not None:
            d = _cycle_vs_periodic(x, py, False, almost)
            if d is not None:
                return d
    dc = _cycle_separation(b, w, True, almost)
    if dc is not None:
        return dc
    if isinstance(b, Union) or isinstance(w, Union):
        u, o = (b, w) if isinstance(b, Union) else (w, b)
        l, r = disjoint(u.left, o, almost), disjoint(u.right, o, almost)
        if l.value is False:
            return l
        if r.value is False:
            return r
        if l.value and r.value:
            return Decision(True, "both parts disjoint")
        return UNKNOWN
    for x, y in ((b, w), (w, b)):
        if isinstance(x, (Intersection, Difference)):
            d = disjoint(x.left, y, almost)
            if d.value:
                return d
        if isinstance(x, (TailFrom, Positions)):
            d = disjoint(x.inner, y, almost)
            if d.value:
                return d
    fsb, fsw = _as_factshift(b), _as_factshift(w)
    if fsb is not None and fsw is not None and fsb[0] != fsw[0]:
        gap = abs(fsb[0] - fsw[0])
        if almost:
            return Decision(True, "k!+c and k!+c' are eventually disjoint for c != c'")
        # k!+c = k'!+c' with k != k' forces |k! - k'!| = gap, so min(k,k')! * min(k,k') <= gap
        k = 1
        while math.factorial(k) * k <= gap:
            k += 1
        bound = math.factorial(k + 1) + max(fsb[0], fsw[0])
        for n in itertools.takewhile(lambda v: v <= bound, b.iter_values()):
            if w.contains(n):
                return Decision(False, "common element", n)
        return Decision(True, "eventually disjoint and small cases checked")
    return UNKNOWN


def almost_disjoint(b: OmegaSet, w: OmegaSet) -> Decision:
    return disjoint(b, w, almost=True)


# ---------------------------------------------------------------------------
# enumeration and classification


def enumerate_set(spec: OmegaSet, count: int) -> list[int]:
    """First `count` elements in increasing order (fewer if the set is finite)."""
    if count < 0:
        raise ValueError("count must be >= 0")
    return list(itertools.islice(spec.iter_values(), count))


def _positive_tail(spec: OmegaSet) -> OmegaSet:
    return TailFrom(spec, 1) if spec.contains(0) else spec


@dataclass(frozen=True)
class SequenceVerdict:
    """Outcome of a thinness / Hadamard classification."""

    answer: str  # "yes" | "no" | "empirical"
    reason: str
    q: Optional[Fraction] = None
    from_index: Optional[int] = None
    trace: tuple[Fraction, ...] = ()

    def to_dict(self):
        d = {"answer": self.answer, "reason": self.reason}
        if self.q is not None:
            d["q"] = str(self.q)
        if self.answer == "yes" and self.q is not None:
            d["from_index"] = self.from_index
        if self.trace:
            d["trace"] = [str(t) for t in self.trace]
        return d


def _ratio_trace(spec: OmegaSet, n: int = 24, inverse: bool = False) -> tuple[Fraction, ...]:
    vals = [v for v in enumerate_set(_positive_tail(spec), n + 1)]
    pairs = zip(vals, vals[1:])
    return tuple(Fraction(b, a) if inverse else Fraction(a, b) for a, b in pairs)


def _has_progression(spec: OmegaSet) -> bool:
    p = spec.periodic
    if p is not None:
        return p.infinite
    if isinstance(spec, Union):
        return _has_progression(spec.left) or _has_progression(spec.right)
    return False


def _require_infinite(spec: OmegaSet):
    if spec.finiteness():
        raise ValueError(f"{spec} is finite; the classification needs an infinite set")


def is_thin(spec: OmegaSet) -> SequenceVerdict:
    """Consecutive ratios a_k/a_{k+1} -> 0 (a leading 0 is dropped first)."""
    _require_infinite(spec)
    if _has_progression(spec):
        return SequenceVerdict("no", "contains an infinite arithmetic progression: bounded gaps force ratios -> 1 along a subsequence")
    match spec:
        case Factorial():
            return SequenceVerdict("yes", "k!/(k+1)! = 1/(k+1) -> 0")
        case FactorialShift() if spec.finiteness() is False:
            return SequenceVerdict("yes", "(k!+c)/(k'!+c) <= (k!+c)/((k+1)!+c) -> 0 for k' > k")
        case Powers(b=b):
            return SequenceVerdict("no", f"ratio is constantly 1/{b}")
        case TailFrom(inner=inner):
            return is_thin(inner)
        case Positions(inner=inner):
            v = is_thin(inner)
            if v.answer == "yes":
                return SequenceVerdict("yes", "subsequence of a thin sequence: " + v.reason)
            if isinstance(inner, Powers):
                return SequenceVerdict("no", f"ratio is constantly 1/{inner.b ** 2}")
        case Intersection(left=l, right=r) if spec.finiteness() is False:
            if any(p.finiteness() is False and is_thin(p).answer == "yes" for p in (l, r)):
                return SequenceVerdict("yes", "infinite subset of a thin set")
        case Difference(left=l) if spec.finiteness() is False:
            if is_thin(l).answer == "yes":
                return SequenceVerdict("yes", "infinite subset of a thin set")
    return SequenceVerdict("empirical", "no closed-form rule", trace=_ratio_trace(spec))


def _factshift_hadamard_index(spec: OmegaSet) -> Optional[int]:
    c, _ = _as_factshift(spec)
    it = spec.iter_with_k() if isinstance(spec, FactorialShift) else ((math.factorial(k), k) for k in itertools.count(1))
    for i, (v, k) in enumerate(it):
        if v > 0 and k >= 1 and (k - 1) * math.factorial(k) >= c:
            return i
    return None  # pragma: no cover


def is_hadamard(spec: OmegaSet) -> SequenceVerdict:
    """a_{k+1}/a_k >= q > 1 from `from_index` on (None = eventually, index not certified)."""
    _require_infinite(spec)
    if _has_progression(spec):
        return SequenceVerdict("no", "bounded gaps: ratios approach 1 along a subsequence")
    match spec:
        case Factorial() | FactorialShift() if spec.finiteness() is False:
            return SequenceVerdict(
                "yes", "(k+1)!+c >= 2(k!+c) once (k-1)k! >= c", Fraction(2), _factshift_hadamard_index(spec)
            )
        case Powers(b=b):
            return SequenceVerdict("yes", f"ratio is constantly {b}", Fraction(b), 0)
        case TailFrom(inner=inner, index=idx):
            v = is_hadamard(inner)
            if v.answer == "yes":
                fi = None if v.from_index is None else max(0, v.from_index - idx)
                return SequenceVerdict("yes", v.reason, v.q, fi)
            return v
        case Positions(inner=inner, parity=par):
            v = is_hadamard(inner)
            if v.answer == "yes":
                fi = None if v.from_index is None else max(0, -((par - v.from_index) // 2))
                return SequenceVerdict("yes", "every other element: ratio >= q^2", v.q * v.q, fi)
        case Intersection(left=l, right=r) if spec.finiteness() is False:
            for part in (l, r):
                if part.finiteness() is False:
                    v = is_hadamard(part)
                    if v.answer == "yes":
                        return SequenceVerdict("yes", "infinite subset of a Hadamard set", v.q, None)
        case Difference(left=l) if spec.finiteness() is False:
            v = is_hadamard(l)
            if v.answer == "yes":
                return SequenceVerdict("yes", "infinite subset of a Hadamard set", v.q, None)
    if is_thin(spec).answer == "yes":
        return SequenceVerdict("yes", "thin implies ratios eventually exceed 2", Fraction(2), None)
    return SequenceVerdict("empirical", "no closed-form rule", trace=_ratio_trace(spec, inverse=True))


@dataclass(frozen=True)
class DensityVerdict:
    kind: str  # "zero" | "one" | "value" | "oscillating" | "empirical"
    value: Optional[Fraction]
    proof: str
    exact: bool
    liminf: Optional[Fraction] = None
    limsup: Optional[Fraction] = None
    horizon: Optional[int] = None

    @staticmethod
    def of(value: Fraction, proof: str) -> DensityVerdict:
        kind = "zero" if value == 0 else "one" if value == 1 else "value"
        return DensityVerdict(kind, Fraction(value), proof, True)

    def to_dict(self):
        d = {"kind": self.kind, "exact": self.exact, "proof": self.proof}
        for key in ("value", "liminf", "limsup"):
            val = getattr(self, key)
            if val is not None:
                d[key] = str(val)
        if self.horizon is not None:
            d["horizon"] = self.horizon
        return d


_EMPTY_PERIODIC = Periodic(1, frozenset(), 0, frozenset())


def _periodic_up_to_null(spec: OmegaSet) -> Optional[Periodic]:
    """A periodic set differing from `spec` by a density-0 set, if one is found."""
    p = spec.periodic
    if p is not None:
        return p
    if spec.is_sparse:
        return _EMPTY_PERIODIC
    match spec:
        case TailFrom(inner=x):
            return _periodic_up_to_null(x)
        case Union(left=a, right=b) | Intersection(left=a, right=b) | Difference(left=a, right=b):
            pa, pb = _periodic_up_to_null(a), _periodic_up_to_null(b)
            if pa is None or pb is None:
                return None
            op = {Union: lambda u, v: u or v, Intersection: lambda u, v: u and v,
                  Difference: lambda u, v: u and not v}[type(spec)]
            return Periodic.combine(pa, pb, op)
    return None


def exact_density(spec: OmegaSet) -> Optional[DensityVerdict]:
    p = spec.periodic
    if p is not None:
        return DensityVerdict.of(p.density, f"eventually periodic: {len(p.residues)} residues mod {p.period}")
    if spec.is_sparse:
        return DensityVerdict.of(Fraction(0), "super-linear gap growth: O(log N) elements below N => density 0")
    match spec:
        case TailFrom(inner=x):
            return exact_density(x)
        case Union(left=a, right=b):
            da, db = exact_density(a), exact_density(b)
            if da is not None and da.value == 1 or db is not None and db.value == 1:
                return DensityVerdict.of(Fraction(1), "union with a density-1 set")
            if da is not None and db is not None and (da.value == 0 or db.value == 0):
                return DensityVerdict.of(da.value + db.value, "union with a density-0 set")
        case Intersection(left=a, right=b):
            da, db = exact_density(a), exact_density(b)
            if da is not None and db is not None:
                if da.value == 1 or db.value == 1:
                    return DensityVerdict.of(da.value * db.value, "intersection with a density-1 set")
        case Difference(left=a, right=b):
            da, db = exact_density(a), exact_density(b)
            if da is not None and db is not None:
                if db.value == 0:
                    return DensityVerdict.of(da.value, "removing a density-0 set")
                if da.value == 1:
                    return DensityVerdict.of(1 - db.value, "density-1 set minus a set of known density")
                if db.value == 1:
                    return DensityVerdict.of(Fraction(0), "contained in the complement of a density-1 set")
    p = _periodic_up_to_null(spec)
    if p is not None:
        return DensityVerdict.of(p.density, f"periodic mod {p.period} up to a density-0 set")
    return None


def density(spec: OmegaSet, horizon: int = 10**5) -> DensityVerdict:
    """Exact density when a closed-form rule applies, otherwise a labelled window estimate."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    v = exact_density(spec)
    if v is not None:
        return v
    # window estimate with liminf / limsup trackers over [horizon/2, horizon]
    lo_n = max(1, horizon // 2)
    count = 0
    lo = hi = None
    for e in spec.iter_values():
        if e >= horizon:
            break
        if e >= lo_n:
            before = Fraction(count, e) if e > 0 else None
            after = Fraction(count + 1, e + 1)
            for r in (before, after):
                if r is not None:
                    lo = r if lo is None or r < lo else lo
                    hi = r if hi is None or r > hi else hi
        count += 1
    est = Fraction(count, horizon)
    lo = est if lo is None else min(lo, est)
    hi = est if hi is None else max(hi, est)
    kind = "oscillating" if hi - lo > Fraction(1, 10) else "empirical"
    return DensityVerdict(kind, est, "window estimate |B ∩ [0,N)|/N", False, lo, hi, horizon)


@dataclass(frozen=True)
class DivisibilityProfile:
    """How many n in the set are NOT divisible by `modulus`."""

    modulus: int
    status: str  # "finite" | "infinite" | "unknown"
    reason: str
    exceptions: Optional[int] = None
    bound_index: Optional[int] = None  # from this enumeration index on, every element is divisible
    last_exception: Optional[int] = None
    eventually_all: bool = False  # past some index every element is an exception
    exception_values: tuple[int, ...] = ()

    def to_dict(self):
        d = {"modulus": self.modulus, "status": self.status, "reason": self.reason}
        if self.status == "finite":
            d.update(exceptions=self.exceptions, bound_index=self.bound_index)
        if self.status == "infinite":
            d["eventually_all"] = self.eventually_all
        return d


def _finite_profile(spec: OmegaSet, m: int, candidates, reason: str) -> DivisibilityProfile:
    """`candidates` must include every element of spec not divisible by m."""
    bad = sorted({v for v in candidates if v % m and spec.contains(v)})
    bound_index = 0
    if bad:
        # bad[-1] is an element, so the scan stops there
        for i, v in enumerate(spec.iter_values()):
            if v >= bad[-1]:
                bound_index = i + 1
                break
    return DivisibilityProfile(m, "finite", reason, len(bad), bound_index,
                               bad[-1] if bad else None, exception_values=tuple(bad))


@lru_cache(maxsize=8192)
def divisibility_profile(spec: OmegaSet, m: int) -> DivisibilityProfile:
    if m < 1:
        raise ValueError("modulus must be >= 1")
    p = spec.periodic
    if p is not None:
        return _periodic_profile(spec, p, m)
    rc = spec.residue_cycle(m)
    if rc is not None:
        start, cyc = rc
        if all(r == 0 for r in cyc):
            prefix = list(itertools.islice(spec.iter_values(), start))
            bad = [v for v in prefix if v % m]
            return _finite_profile(spec, m, bad, f"elements are divisible by {m} from index {start} on")
        ea = all(r != 0 for r in cyc)
        return DivisibilityProfile(
            m, "infinite", f"residues mod {m} eventually cycle through {list(cyc)}", eventually_all=ea
        )
    return _structural_profile(spec, m)


def _periodic_profile(spec: OmegaSet, p: Periodic, m: int) -> DivisibilityProfile:
    period = math.lcm(p.period, m)
    member_res = [r for r in range(period) if p.contains(p.start + (r - p.start) % period)]
    bad = [r for r in member_res if r % m]
    if bad:
        return DivisibilityProfile(
            m, "infinite", f"residue class {bad[0]} mod {period} is in the set and not divisible by {m}",
            eventually_all=len(bad) == len(member_res),
        )
    heads = [n for n in range(p.start) if p.contains(n) and n % m]
    return _finite_profile(spec, m, heads, f"every residue class mod {period} in the set is divisible by {m}")


def _structural_profile(spec: OmegaSet, m: int) -> DivisibilityProfile:
    unknown = DivisibilityProfile(m, "unknown", f"no closed-form rule for {spec}")

    def recount(finite_parts, reason):
        cands = [v for pp in finite_parts for v in pp.exception_values]
        return _finite_profile(spec, m, cands, reason)

    match spec:
        case Union(left=a, right=b):
            pa, pb = divisibility_profile(a, m), divisibility_profile(b, m)
            if pa.status == "finite" and pb.status == "finite":
                return recount([pa, pb], "both parts have finitely many exceptions")
            inf = [x for x in (pa, pb) if x.status == "infinite"]
            if inf:
                ea = pa.eventually_all and pb.eventually_all
                return DivisibilityProfile(m, "infinite", "a part has infinitely many exceptions", eventually_all=ea)
        case Intersection(left=a, right=b) | Difference(left=a, right=b):
            parts = [divisibility_profile(a, m)]
            if isinstance(spec, Intersection):
                parts.append(divisibility_profile(b, m))
            fin = [x for x in parts if x.status == "finite"]
            if fin:
                return recount(fin, "subset of a set with finitely many exceptions")
            if spec.finiteness() is False and any(x.eventually_all for x in parts):
                return DivisibilityProfile(m, "infinite", "infinite subset of a set whose elements are eventually all exceptions", eventually_all=True)
        case TailFrom(inner=x) | Positions(inner=x):
            px = divisibility_profile(x, m)
            if px.status == "finite":
                return recount([px], "subset of a set with finitely many exceptions")
            if px.status == "infinite" and (isinstance(spec, TailFrom) or px.eventually_all):
                return DivisibilityProfile(m, "infinite", px.reason, eventually_all=px.eventually_all)
    return unknown


def partition_even_odd_positions(spec: OmegaSet) -> tuple[Positions, Positions]:
    """Split by enumeration index: (indices 0, 2, 4, ...), (indices 1, 3, 5, ...)."""
    _require_infinite(spec)
    return Positions(spec, 0), Positions(spec, 1)
