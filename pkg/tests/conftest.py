import numpy as np
import pytest

from gpmatch.core import IntervalRelation, MatchRelation


def random_relation(rng, sigma_t, sigma_p, density):
    mask = rng.random((sigma_t, sigma_p)) < density
    a, b = np.nonzero(mask)
    return MatchRelation(sigma_t, sigma_p, zip(a.tolist(), b.tolist()))


def random_intervals(rng, sigma_t, sigma_p, per_char=3):
    ivl = {}
    for b in range(sigma_p):
        k = int(rng.integers(0, per_char + 1))
        cuts = np.sort(rng.choice(sigma_t + 1, size=min(2 * k, sigma_t + 1), replace=False))
        ivl[b] = [(int(lo), int(hi) - 1) for lo, hi in zip(cuts[::2], cuts[1::2])]
    return IntervalRelation(sigma_t, sigma_p, ivl)


def plant(rng, T, P, rel):
    start = int(rng.integers(0, len(T) - len(P) + 1))
    for j, b in enumerate(P.tolist()):
        nb = rel.neighbors(b)
        if len(nb):
            T[start + j] = nb[int(rng.integers(0, len(nb)))]
    return start + 1


def random_instance(rng, n_max=300, m_max=16, sigma_max=32, density=None, with_plant=True):
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, min(n, m_max) + 1))
    st = int(rng.integers(1, sigma_max + 1))
    sp = int(rng.integers(1, sigma_max + 1))
    d = rng.random() * 0.3 if density is None else density
    rel = random_relation(rng, st, sp, d)
    T = rng.integers(0, st, n)
    P = rng.integers(0, sp, m)
    if with_plant and rng.random() < 0.5:
        plant(rng, T, P, rel)
    return T, P, rel


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
