"""Finite covers S_1, S_2, ... and the sets B_x on a finite grid of circle points.

For each k the stage set S_k must contain, for every k-tuple of grid points,
some n with d(f_n(x_i), g(x_i)) < 1/k for all i. A tuple is covered by n iff
its support lies in the good set G_{n,k} = {x : d(f_n(x), g(x)) < 1/k}, so the
search runs over supports (subsets of size <= k) encoded as bitmasks.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .circle import IDENTITY, CirclePoint, circle_dist, circle_pow, torsion_points


class HorizonExhausted(RuntimeError):
    def __init__(self, k: int, witness: tuple[CirclePoint, ...], horizon: int):
        self.k, self.witness, self.horizon = k, witness, horizon
        pts = ", ".join(str(x) for x in witness)
        super().__init__(f"no n below {horizon} covers the tuple ({pts}) at k={k}")


@dataclass
class GridInstance:
    grid: list[CirclePoint]
    f: Callable[[int, CirclePoint], CirclePoint] = lambda n, x: circle_pow(x, n)
    g: Callable[[CirclePoint], CirclePoint] = lambda x: IDENTITY
    indices: Optional[list[int]] = None  # candidate n; None means all of ω
    label: str = "f_n = E_n, g = E_0"

    def __post_init__(self):
        if not self.grid:
            raise ValueError("grid must be nonempty")
        if len(set(self.grid)) != len(self.grid):
            raise ValueError("grid points must be distinct")

    @classmethod
    def torsion(cls, max_order: int) -> GridInstance:
        return cls(torsion_points(max_order))

    @classmethod
    def from_table(cls, grid: list[CirclePoint], table: dict, limit: Optional[Iterable] = None) -> GridInstance:
        """f_n given by a JSON-style map n -> angles aligned with `grid`; g defaults to E_0."""
        values = {}
        for key, angles in table.items():
            if len(angles) != len(grid):
                raise ValueError(f"row {key} has {len(angles)} angles for {len(grid)} grid points")
            values[int(key)] = {x: CirclePoint(a) for x, a in zip(grid, angles)}
        g_vals = {x: CirclePoint(a) for x, a in zip(grid, limit)} if limit is not None else None
        return cls(
            list(grid),
            f=lambda n, x: values[n][x],
            g=(lambda x: g_vals[x]) if g_vals else (lambda x: IDENTITY),
            indices=sorted(values),
            label="tabulated",
        )

    @classmethod
    def from_json_file(cls, path: str, grid: list[CirclePoint]) -> GridInstance:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        limit = data.pop("g", None) if isinstance(data, dict) else None
        return cls.from_table(grid, data, limit)

    def distance(self, n: int, x: CirclePoint) -> Fraction:
        return circle_dist(self.f(n, x), self.g(x))

    def good_mask(self, n: int, k: int) -> int:
        bound = Fraction(1, k)
        m = 0
        for i, x in enumerate(self.grid):
            if self.distance(n, x) < bound:
                m |= 1 << i
        return m

    def candidates(self, horizon: int) -> Iterable[int]:
        if self.indices is None:
            return range(horizon)
        return (n for n in self.indices if n < horizon)


@dataclass
class CoverResult:
    instance: GridInstance
    S: list[list[int]]
    horizon: int
    B: dict[CirclePoint, list[int]] = field(default_factory=dict)

    @property
    def k_max(self) -> int:
        return len(self.S)

    def A(self, k: int) -> list[int]:
        """Indices removed from ω to form A_k (the union of S_j for j < k)."""
        return sorted(n for s in self.S[: k - 1] for n in s)

    def to_dict(self):
        return {
            "instance": self.instance.label,
            "grid": [str(x) for x in self.instance.grid],
            "horizon": self.horizon,
            "S": {str(k + 1): s for k, s in enumerate(self.S)},
            "A_removed": {str(k): self.A(k) for k in range(1, self.k_max + 1)},
            "B": {str(x): b for x, b in self.B.items()},
        }


def _supports(size: int, k: int) -> set[int]:
    out = set()
    for r in range(1, min(k, size) + 1):
        for combo in itertools.combinations(range(size), r):
            out.add(sum(1 << i for i in combo))
    return out


def select_covers(inst: GridInstance, horizon: int, k_max: int) -> CoverResult:
    """Greedy minimal-index covers: scan n ∈ A_k upward, keep n if it covers a new tuple."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    used: set[int] = set()
    stages = []
    for k in range(1, k_max + 1):
        uncovered = _supports(len(inst.grid), k)
        chosen = []
        for n in inst.candidates(horizon):
            if not uncovered:
                break
            if n in used:
                continue
            good = inst.good_mask(n, k)
            hit = {s for s in uncovered if s & ~good == 0}
            if hit:
                chosen.append(n)
                uncovered -= hit
        if uncovered:
            mask = min(uncovered)
            pts = tuple(x for i, x in enumerate(inst.grid) if mask >> i & 1)
            raise HorizonExhausted(k, pts, horizon)
        used.update(chosen)
        stages.append(chosen)
    res = CoverResult(inst, stages, horizon)
    res.B = {x: sorted(n for k, s in enumerate(stages, 1) for n in s if inst.distance(n, x) < Fraction(1, k))
             for x in inst.grid}
    return res


def verify_cover(res: CoverResult, max_tuples: int = 10**6) -> dict:
    """Replay disjointness and the cover condition over every tuple in grid^k.

    Past `max_tuples` the replay runs over distinct supports instead, which is equivalent.
    """
    inst = res.instance
    disjoint = all(not set(a) & set(b) for a, b in itertools.combinations(res.S, 2))
    per_k = {}
    for k, s in enumerate(res.S, 1):
        bound = Fraction(1, k)
        close = {n: {x for x in inst.grid if inst.distance(n, x) < bound} for n in s}
        if len(inst.grid) ** k <= max_tuples:
            method, space = "product", itertools.product(inst.grid, repeat=k)
        else:
            # coverage depends only on the set of points in a tuple
            method = "supports"
            space = (c for r in range(1, k + 1) for c in itertools.combinations(inst.grid, r))
        tuples, failure = 0, None
        for tup in space:
            tuples += 1
            if not any(all(x in close[n] for x in tup) for n in s):
                failure = [str(x) for x in tup]
                break
        per_k[str(k)] = {"method": method, "tuples": tuples, "ok": failure is None, "failure": failure}
    return {"disjoint": disjoint, "per_k": per_k, "ok": disjoint and all(v["ok"] for v in per_k.values())}


def _meet(res: CoverResult, tup: Iterable[CirclePoint]) -> set[int]:
    sets = [set(res.B[x]) for x in tup]
    return set.intersection(*sets) if sets else set().union(*res.S)


def filter_base_check(res: CoverResult, tup: list[CirclePoint], k_range: Optional[Iterable[int]] = None) -> dict:
    """Check that B_{x_0} ∩ ... ∩ B_{x_{l-1}} meets S_k for each k >= l in k_range."""
    for x in tup:
        if x not in res.B:
            raise ValueError(f"{x} is not a grid point")
    ell = len(tup)
    if k_range is not None and max(k_range, default=0) > res.k_max:
        raise ValueError(f"stages only go up to k={res.k_max}")
    ks = range(max(ell, 1), res.k_max + 1) if k_range is None else [k for k in k_range if k >= ell]
    meet = _meet(res, tup)
    witnesses = {}
    for k in ks:
        hits = meet & set(res.S[k - 1])
        witnesses[str(k)] = min(hits) if hits else None
    return {
        "tuple": [str(x) for x in tup],
        "k_checked": list(ks),
        "witnesses": witnesses,
        "ok": all(v is not None for v in witnesses.values()),
    }


def g_ell_membership(res: CoverResult, candidate: Iterable[int], ell: int) -> tuple[bool, Optional[list[CirclePoint]]]:
    """Is some intersection of ell sets B_x contained in `candidate`? Returns a witness tuple."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    cand = set(candidate)
    for tup in itertools.combinations_with_replacement(res.instance.grid, ell):
        if _meet(res, tup) <= cand:
            return True, list(tup)
    return False, None
