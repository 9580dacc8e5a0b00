import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpmatch.core import InputError, IntervalRelation, MatchRelation, brute_count
from gpmatch.intervals import RangePartition, count_exact_i, greedy_partition, threshold_count

from conftest import random_intervals


def test_greedy_examples():
    assert greedy_partition([5], 3) == [(0, 1)]
    assert greedy_partition([1, 1, 1, 1], 2) == [(0, 2), (2, 4)]
    assert greedy_partition([3, 1, 3], 3) == [(0, 1), (1, 2), (2, 3)]
    with pytest.raises(InputError):
        greedy_partition([1], 1)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 20), max_size=60), st.integers(2, 30))
def test_greedy_invariants(values, b):
    runs = greedy_partition(values, b)
    assert [i for s, e in runs for i in range(s, e)] == list(range(len(values)))
    for s, e in runs:
        assert e - s == 1 or sum(values[s:e]) <= b
    assert len(runs) <= 2 * sum(values) / b + 1


def test_examples():
    ident = IntervalRelation.threshold(3, 3, 1)
    assert count_exact_i([1, 2, 1], [1, 2, 1], ident).values.tolist() == [0]
    one = IntervalRelation(3, 3, {1: [(1, 1)]})
    assert count_exact_i([1, 2, 1, 2], [1, 1], one).values.tolist() == [1, 1, 1]
    assert threshold_count([1, 5, 9], [4], 2).values.tolist() == [1, 0, 1]


def test_threshold_special_cases(rng):
    T = rng.integers(0, 20, 100)
    P = rng.integers(0, 20, 9)
    ham = threshold_count(T, P, 1).values
    assert np.array_equal(ham, brute_count(T, P, MatchRelation.identity(20)).values)
    assert not threshold_count(T, P, 25).values.any()
    with pytest.raises(InputError):
        threshold_count(T, P, 0)


def test_exact_random_with_forced_blocks(rng):
    for k in range(150):
        n = int(rng.integers(1, 400))
        m = int(rng.integers(1, min(n, 40) + 1))
        st_, sp = int(rng.integers(1, 65)), int(rng.integers(1, 65))
        ir = random_intervals(rng, st_, sp)
        T = rng.integers(0, st_, n)
        P = rng.integers(0, sp, m)
        want = brute_count(T, P, ir.to_relation()).values
        b = None if k % 2 else int(rng.integers(2, 60))
        assert np.array_equal(count_exact_i(T, P, ir, b=b).values, want)


def test_phases_are_exclusive(rng):
    for _ in range(60):
        n = int(rng.integers(2, 120))
        m = int(rng.integers(1, min(n, 12) + 1))
        ir = random_intervals(rng, 30, 10)
        T = rng.integers(0, 30, n)
        P = rng.integers(0, 10, m)
        t = count_exact_i(T, P, ir, b=int(rng.integers(2, 20)), trace=True)
        p1, p2 = t.meta["pairs1"], t.meta["pairs2"]
        assert len(p2) == len(set(p2))
        assert not p1 & set(p2)
        truth = {(i, j) for i in range(n - m + 1) for j in range(m) if not ir.edge(int(T[i + j]), int(P[j]))}
        assert p1 | set(p2) == truth
        assert t.meta["phase2_work"] <= 2 * t.meta["I"] * t.meta["b"]


def test_range_partition_spans():
    T = np.array([0, 0, 0, 5, 6, 9, 9, 20])
    part, _ = RangePartition.build(T, 2)
    assert part.chars.tolist() == [0, 5, 6, 9, 20]
    assert [(int(s), int(e)) for s, e in zip(part.starts, part.stops)] == [(0, 1), (1, 3), (3, 4), (4, 5)]
    assert part.range_of_char(5) == 1 and part.range_of_char(7) is None and part.range_of_char(0) == 0
    assert part.members(np.array([7]), np.array([8])).tolist() == [False, False, False, False]
    assert part.members(np.array([6]), np.array([12])).tolist() == [False, True, True, False]


def test_brute_path_when_I_large():
    ir = IntervalRelation(40, 1, {0: [(2 * i, 2 * i) for i in range(20)]})
    T = np.arange(40)
    t = count_exact_i(T, [0, 0], ir)  # I = 40 > m^2 = 4
    assert t.meta.get("fallback") == "brute"
    assert np.array_equal(t.values, brute_count(T, [0, 0], ir).values)
