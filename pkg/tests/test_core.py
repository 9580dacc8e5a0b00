import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpmatch.core import (BAND, InputError, IntervalRelation, MatchRelation, MismatchTable,
                          brute_count, brute_report, densify, merge_intervals, param_I)

from conftest import random_instance, random_intervals


def test_edge_identity_and_file_order():
    ident = MatchRelation.identity(3)
    assert ident.edge(1, 1)
    assert not ident.edge(0, 1)
    rel = MatchRelation(3, 2, [(0, 1), (2, 1)])
    assert rel.edge(2, 1)


def test_edge_out_of_range():
    with pytest.raises(InputError):
        MatchRelation.identity(3).edge(3, 0)


def test_degree():
    assert MatchRelation.identity(5).degree(3, "text") == 1
    assert MatchRelation(2, 2, []).degree(0, "pattern") == 0
    assert MatchRelation(3, 2, [(0, 1), (2, 1)]).degree(1, "pattern") == 2
    with pytest.raises(InputError):
        MatchRelation(3, 2, []).degree(5, "pattern")


def test_kth_neighbor_fixed_order():
    rel = MatchRelation(3, 2, [(0, 1), (2, 1)])
    assert rel.kth_neighbor(1, 1, "pattern") == 0
    assert rel.kth_neighbor(1, 2, "pattern") == 2
    with pytest.raises(InputError):
        rel.kth_neighbor(0, 1, "pattern")
    # insertion order, not sorted order
    rev = MatchRelation(3, 2, [(2, 1), (0, 1)])
    assert rev.kth_neighbor(1, 1, "pattern") == 2


def test_params():
    assert MatchRelation.identity(7).params() == (1, 7)
    assert MatchRelation.complete(3, 4).params() == (4, 12)


@pytest.mark.parametrize("sigma,delta", [(10, 1), (10, 3), (5, 9), (20, 4)])
def test_threshold_degree_against_enumeration(sigma, delta):
    rel = MatchRelation.threshold(sigma, delta)
    D = max(sum(1 for a in range(sigma) if abs(a - b) < delta) for b in range(sigma))
    assert rel.D == D
    assert rel.D == min(2 * delta - 1, sigma)


def test_param_I():
    P = np.array([0, 1, 2, 3])
    assert param_I(IntervalRelation.threshold(10, 10, 2), P) == 4
    two = IntervalRelation(10, 4, {b: [(0, 1), (5, 6)] for b in range(4)})
    assert param_I(two, P) == 8
    merged = IntervalRelation(10, 1, {0: [(1, 3), (4, 6)]})
    assert merged.intervals(0) == [(1, 6)]
    assert param_I(merged, [0]) == 1


def test_merge_intervals_normalises():
    assert merge_intervals([(4, 6), (1, 3), (8, 9), (5, 5)]) == [(1, 6), (8, 9)]


def test_brute_count_examples():
    ident = MatchRelation.identity(3)
    assert brute_count([1, 2, 1], [1, 2, 1], ident).values.tolist() == [0]
    assert brute_count([1, 2, 1, 2], [1, 1], ident).values.tolist() == [1, 1, 1]
    empty = MatchRelation(3, 3, [])
    assert brute_count([0, 1, 2, 0], [1, 1], empty).values.tolist() == [2, 2, 2]


def test_brute_report_examples():
    ident = MatchRelation.identity(3)
    assert brute_report([1, 2, 1], [1, 2, 1], ident) == [1]
    assert brute_report([1, 2, 1, 2, 1], [1, 2], ident) == [1, 3]
    assert brute_report([1], [1, 1], ident) == []


def _slow_count(T, P, rel):
    n, m = len(T), len(P)
    return [sum(not rel.edge(int(T[i + j]), int(P[j])) for j in range(m)) for i in range(n - m + 1)]


def test_brute_count_matches_edge_oracle(rng):
    for _ in range(50):
        T, P, rel = random_instance(rng, n_max=60, m_max=8)
        assert brute_count(T, P, rel).values.tolist() == _slow_count(T, P, rel)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 7)), max_size=40))
def test_degree_sums_equal_S(pairs):
    rel = MatchRelation(10, 8, pairs)
    S = rel.S
    assert sum(rel.degree(a, "text") for a in range(10)) == S
    assert sum(rel.degree(b, "pattern") for b in range(8)) == S
    assert S == len(set(pairs))


def test_report_is_zero_set_of_count(rng):
    for _ in range(30):
        T, P, rel = random_instance(rng, n_max=80, m_max=6, density=0.5)
        h = brute_count(T, P, rel).values
        assert brute_report(T, P, rel) == [i + 1 for i in range(len(h)) if h[i] == 0]


def test_interval_and_graph_representations_agree(rng):
    for _ in range(30):
        ir = random_intervals(rng, 20, 10)
        T = rng.integers(0, 20, 60)
        P = rng.integers(0, 10, 7)
        a = brute_count(T, P, ir).values
        b = brute_count(T, P, ir.to_relation()).values
        assert a.tolist() == b.tolist()
        assert IntervalRelation.from_relation(ir.to_relation()).param_I(P) == ir.param_I(P)


def test_repeatable(rng):
    T, P, rel = random_instance(rng)
    assert brute_count(T, P, rel).values.tolist() == brute_count(T, P, rel).values.tolist()
    assert [rel.kth_neighbor(0, k + 1) for k in range(rel.degree(0))] == rel.neighbors(0).tolist()


def test_out_of_alphabet_text():
    with pytest.raises(InputError):
        brute_count([5], [0], MatchRelation.identity(3))


def test_band_bounds():
    t = MismatchTable([6, 0], BAND, w=3, eps=0.5)
    lo, hi = t.bounds()
    assert lo.tolist() == [2.0, 0.0] and hi.tolist() == [4.0, 0.0]
    assert t.estimate().tolist() == [2, 0]


def test_densify_roundtrip():
    (T, P), codes = densify([100, 7, 100], [7, 9])
    assert codes[T].tolist() == [100, 7, 100]
    assert codes[P].tolist() == [7, 9]
