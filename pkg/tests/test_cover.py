import itertools
import json
from fractions import Fraction as F

import pytest

from powerseq.circle import CirclePoint, circle_dist, circle_pow, IDENTITY
from powerseq.cover import (
    GridInstance,
    HorizonExhausted,
    filter_base_check,
    g_ell_membership,
    select_covers,
    verify_cover,
)


def covers(n, tup, k):
    return all(circle_dist(circle_pow(x, n), IDENTITY) < F(1, k) for x in tup)


def test_twelve_covers_orders_up_to_four():
    inst = GridInstance.torsion(4)
    assert all(covers(12, (x,), 1) for x in inst.grid)
    res = select_covers(inst, 100, 1)
    assert verify_cover(res)["ok"]


def test_single_point_grid():
    res = select_covers(GridInstance([CirclePoint(F(1, 2))]), 100, 1)
    assert res.S == [[0]]
    # after removing 0, the next stage takes the smallest even index
    res = select_covers(GridInstance([CirclePoint(F(1, 2))]), 100, 3)
    assert res.S == [[0], [2], [4]]


def test_order_six_grid():
    inst = GridInstance.torsion(6)
    res = select_covers(inst, 10_000, 3)
    assert res.S == [[0], [1, 2, 4], [3, 5, 6, 8, 9, 10, 12, 15, 16]]
    rep = verify_cover(res)
    assert rep["ok"] and rep["disjoint"]
    assert all(v["method"] == "product" for v in rep["per_k"].values())


def test_cover_condition_brute_force():
    inst = GridInstance.torsion(5)
    res = select_covers(inst, 10_000, 3)
    for k, s in enumerate(res.S, 1):
        for tup in itertools.product(inst.grid, repeat=k):
            assert any(covers(n, tup, k) for n in s)
    used = [n for s in res.S for n in s]
    assert len(used) == len(set(used))


def test_supports_fallback_agrees():
    res = select_covers(GridInstance.torsion(6), 10_000, 3)
    assert verify_cover(res, max_tuples=1)["ok"]
    assert verify_cover(res, max_tuples=1)["per_k"]["3"]["method"] == "supports"


def test_horizon_exhausted():
    with pytest.raises(HorizonExhausted) as info:
        select_covers(GridInstance.torsion(6), 1, 2)
    assert info.value.k == 2 and info.value.horizon == 1


def test_filter_base_checks():
    res = select_covers(GridInstance.torsion(6), 10_000, 3)
    grid = res.instance.grid
    for x in grid:
        assert filter_base_check(res, [x])["ok"]
        assert filter_base_check(res, [x, x])["witnesses"] == filter_base_check(res, [x], k_range=[2, 3])["witnesses"]
    for pair in itertools.product(grid, repeat=2):
        assert filter_base_check(res, list(pair))["ok"]
    small = select_covers(GridInstance.torsion(2), 1000, 2)
    assert filter_base_check(small, small.instance.grid)["ok"]


def test_filter_base_check_errors():
    res = select_covers(GridInstance.torsion(3), 1000, 2)
    with pytest.raises(ValueError):
        filter_base_check(res, [CirclePoint(F(1, 7))])
    with pytest.raises(ValueError):
        filter_base_check(res, [CirclePoint(F(1, 2))], k_range=[5])


def test_b_sets_match_definition():
    res = select_covers(GridInstance.torsion(4), 1000, 3)
    for x in res.instance.grid:
        expect = sorted(n for k, s in enumerate(res.S, 1) for n in s if covers(n, (x,), k))
        assert res.B[x] == expect


def test_g_ell_monotone():
    res = select_covers(GridInstance.torsion(4), 1000, 3)
    everything = {n for s in res.S for n in s}
    for cand in [everything, set(res.S[0]), set(res.S[1]) | set(res.S[2]), set()]:
        prev = False
        for ell in (1, 2, 3):
            ok, wit = g_ell_membership(res, cand, ell)
            assert ok >= prev
            if ok:
                assert len(wit) == ell
            prev = ok
    with pytest.raises(ValueError):
        g_ell_membership(res, everything, 0)


def test_table_instance(tmp_path):
    grid = [CirclePoint(0), CirclePoint(F(1, 2))]
    table = {"0": ["1/3", "1/2"], "1": ["0", "0"], "2": ["0", "1/2"]}
    path = tmp_path / "t.json"
    path.write_text(json.dumps({**table, "g": ["0", "0"]}))
    inst = GridInstance.from_json_file(str(path), grid)
    # at k = 1 every distance is below 1, so index 0 covers
    res = select_covers(inst, 10, 2)
    assert res.S == [[0], [1]]
    with pytest.raises(HorizonExhausted):
        select_covers(inst, 10, 3)
    with pytest.raises(ValueError):
        GridInstance.from_table(grid, {"0": ["0"]})


def test_grid_validation():
    with pytest.raises(ValueError):
        GridInstance([])
    with pytest.raises(ValueError):
        GridInstance([CirclePoint(F(1, 2)), CirclePoint(F(1, 2))])
