import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gpmatch.core import InputError
from gpmatch.discrepancy import (SetSystem, build_partition, colour, compute_epsilon, exact_objective,
                                 halving_process, max_intersection, objective_upper, random_set_system)


def test_epsilon_worked_example():
    p = compute_epsilon(1, 8)
    assert p.t1 == 2 and p.t2 == 2
    # four steps in exact arithmetic except the single square root
    alpha3 = 16 * math.sqrt(2) * 0.5
    want = 1 - 2 / (2 + alpha3)
    assert abs(float(p.eps) - want) < 1e-15
    assert abs(float(p.eps) - 0.8497788951776651) < 1e-12
    assert float(p.eps) <= want  # rounded down to the fixed-point grid


GRID = [(z, k) for z in (1, 2, 3, 8, 64, 256, 1000) for k in (4, 8, 16, 64, 256, 4096) if (1 << k) > 3 * z]


@pytest.mark.parametrize("z,k", GRID)
def test_epsilon_properties(z, k):
    p = compute_epsilon(z, k)
    assert 0 < p.eps < 1
    assert p.one_minus > Fraction(1, 33)
    assert p.log_ratio / math.sqrt(math.log2(3 * z) / k) > 2
    assert p.eps > Fraction(1, (k * z) ** 2)


def test_epsilon_precondition():
    with pytest.raises(InputError):
        compute_epsilon(8, 4)  # 2^4 < 24


def test_single_even_set_balances():
    for size in (2, 10, 64, 300):
        col = colour(SetSystem(size, [np.arange(size)]))
        assert col.max_discrepancy == 0
        # greedy alternates: tie -> +1 then -1
        assert col.chi[:4].tolist() == [1, -1, 1, -1][: min(4, size)]


def test_disjoint_singletons():
    sys_ = SetSystem(10, [[i] for i in range(10)])
    col = colour(sys_)
    assert (np.abs(col.discrepancies) == 1).all()


def test_short_circuit_when_k_small():
    sys_ = SetSystem(6, [[0, 1, 2]] * 8)  # k=3 <= log2(24)
    col = colour(sys_)
    assert (col.chi == 1).all() and col.audit_ok is None


def test_random_system_bound_and_exact_audit():
    sys_ = random_set_system(64, 64, 4096, np.random.default_rng(0))
    col = colour(sys_)
    assert col.max_discrepancy <= col.alpha * math.sqrt(64 * math.log2(192))
    assert exact_objective(col.plus, col.minus, col.params.eps) <= 3 * 64
    assert col.audit_ok


def test_upper_bound_dominates_exact(rng):
    eps = compute_epsilon(4, 40).eps
    plus = rng.integers(0, 40, 12)
    minus = rng.integers(0, 40, 12)
    ex = exact_objective(plus, minus, eps)
    assert objective_upper(plus, minus, eps) >= ex
    direct = sum((1 + eps) ** int(p) * (1 - eps) ** int(q) + (1 + eps) ** int(q) * (1 - eps) ** int(p)
                 for p, q in zip(plus, minus))
    assert ex == direct


def test_deterministic():
    sys_ = random_set_system(16, 32, 512, np.random.default_rng(3))
    assert np.array_equal(colour(sys_).chi, colour(sys_).chi)
    assert np.array_equal(build_partition(sys_).labels, build_partition(sys_).labels)


def test_tiny_precision_still_audited():
    # a coarse floor forces the pending-exponent path; the audit still certifies
    sys_ = random_set_system(8, 64, 512, np.random.default_rng(5))
    col = colour(sys_, delta_bits=8)
    assert col.audit_ok
    assert col.pending.max() > 0


def test_partition_trivial_when_k_small():
    sys_ = random_set_system(32, 256, 8192, np.random.default_rng(1))
    f = build_partition(sys_)
    assert f.iterations == 0 and f.label_space == 1
    assert f.bound <= f.threshold


def test_partition_recurses_on_large_set():
    k = 1 << 15
    f = build_partition(SetSystem(k, [np.arange(k)]))
    assert f.iterations >= 1
    assert f.bound <= f.threshold
    assert f.bound == max_intersection(SetSystem(k, [np.arange(k)]), f.labels)
    assert f.labels.max() < f.label_space <= 4 * k
    assert f.history == sorted(f.history, reverse=True)


@settings(max_examples=40, deadline=None)
@given(st.integers(5, 1 << 20))
def test_halving_process(x):
    seq = halving_process(x)
    assert seq[-1] <= 4
    assert len(seq) - 1 <= 2 * math.log2(x) + 20
    assert all(b < a for a, b in zip(seq, seq[1:]))


def test_set_system_file_roundtrip(tmp_path):
    sys_ = random_set_system(5, 4, 30, np.random.default_rng(2))
    sys_.write(tmp_path / "s.txt")
    back = SetSystem.read(tmp_path / "s.txt")
    assert back.z == 5 and back.k == 4 and back.universe_size == 30
    assert all(np.array_equal(a, b) for a, b in zip(sys_.sets, back.sets))


def test_set_system_rejects_oversize():
    with pytest.raises(InputError):
        SetSystem(5, [[0, 1, 2]], k=2)
    with pytest.raises(InputError):
        SetSystem(3, [[0, 3]])
