"""Monte Carlo reporting and approximate counting via alphabet hashing.

Each round hashes the text alphabet into a small number of buckets with a
2-wise independent function and reduces the problem to one binary
don't-care instance per bucket.  Reporting errs only by false positives;
counting only ever underestimates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convolution import correlate_sum
from .core import (EXACT, LOWER, InputError, MatchRelation, MismatchTable, as_symbols,
                   brute_count, num_alignments)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def find_prime(lo: int, hi: int) -> int:
    """Smallest prime in ``[lo, hi]``."""
    lo = max(int(lo), 2)
    for q in range(lo, int(hi) + 1):
        if is_prime(q):
            return q
    raise InputError(f"no prime in [{lo}, {hi}]")


@dataclass(frozen=True)
class HashFunction:
    """``h(x) = ((a*x + b) mod p) mod buckets``; buckets are 0-indexed here."""

    a: int
    b: int
    p: int
    buckets: int

    def __call__(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        if self.p < (1 << 31):
            # a*x < 2^62 with both factors below 2^31
            return ((self.a * xs + self.b) % self.p) % self.buckets
        return np.array([((self.a * int(x) + self.b) % self.p) % self.buckets for x in xs],
                        dtype=np.int64)


@dataclass
class MonteCarloConfig:
    c: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.c < 1:
            raise InputError("error exponent c must be a positive integer")

    def rounds(self, n: int) -> int:
        return max(1, math.ceil(self.c * math.log2(max(n, 1))))

    def round_generators(self, n: int) -> list[np.random.Generator]:
        seeds = np.random.SeedSequence(self.seed).spawn(self.rounds(n))
        return [np.random.Generator(np.random.Philox(s)) for s in seeds]


def draw_hash(rng: np.random.Generator, p: int, buckets: int) -> HashFunction:
    a = int(rng.integers(0, p))
    b = int(rng.integers(0, p))
    return HashFunction(a, b, p, buckets)


def _log2n(n: int) -> float:
    return max(math.log2(n), 1.0)


class _Reducer:
    """Shared per-instance state for the hashing reduction."""

    def __init__(self, T: np.ndarray, P: np.ndarray, rel: MatchRelation):
        self.T, self.P, self.rel = T, P, rel
        self.n, self.m = len(T), len(P)
        self.text_chars, self.text_inv = np.unique(T, return_inverse=True)
        self.pchars, self.pinv = np.unique(P, return_inverse=True)
        base = max(self.n, rel.sigma_t)
        self.prime = find_prime(base, 2 * base)

    def hashed_mismatches(self, h: HashFunction, light: np.ndarray | None = None) -> np.ndarray:
        """Mismatch counts of the hashed instance, summed over all buckets.

        ``light`` masks the pattern positions that take part; the rest act as
        don't cares.
        """
        q = h.buckets
        Tp = h(self.text_chars)[self.text_inv]
        used = np.unique(Tp)  # empty buckets are all-DC in the text: skipped
        member = np.zeros((len(self.pchars), q), dtype=bool)
        for k, b in enumerate(self.pchars):
            nb = self.rel.neighbors(int(b))
            if len(nb):
                member[k, h(nb)] = True
        X = (Tp[None, :] == used[:, None]).astype(np.uint8)
        Y = ~member[:, used].T[:, self.pinv]
        if light is not None:
            Y &= light[None, :]
        return correlate_sum(X, Y.astype(np.uint8))

    def heavy_mismatches(self, heavy_chars) -> np.ndarray:
        """Exact mismatches caused by the given pattern characters."""
        rows_x, rows_y = [], []
        for b in heavy_chars:
            b = int(b)
            rows_x.append(~self.rel.matches(self.T, b))
            rows_y.append(self.P == b)
        if not rows_x:
            return np.zeros(num_alignments(self.n, self.m), dtype=np.int64)
        return correlate_sum(np.array(rows_x, dtype=np.uint8), np.array(rows_y, dtype=np.uint8))


def _prep(T, P, rel):
    return as_symbols(T, rel.sigma_t, "text"), as_symbols(P, rel.sigma_p, "pattern")


def _survivors_d(red: _Reducer, cfg: MonteCarloConfig, D: int, light=None,
                 alive: np.ndarray | None = None) -> np.ndarray:
    L = num_alignments(red.n, red.m)
    if alive is None:
        alive = np.ones(L, dtype=bool)
    q = 2 * max(D, 1)
    for rng in cfg.round_generators(red.n):
        if not alive.any():
            break
        h = draw_hash(rng, red.prime, q)
        alive &= red.hashed_mismatches(h, light) == 0
    return alive


def report_d(T, P, rel: MatchRelation, cfg: MonteCarloConfig | None = None) -> list[int]:
    """Occurrences (1-indexed), with one-sided error probability <= 1/n^c."""
    cfg = cfg or MonteCarloConfig()
    T, P = _prep(T, P, rel)
    n, m = len(T), len(P)
    if m > n:
        return []
    if rel.D > m:
        return brute_count(T, P, rel).zeros()
    alive = _survivors_d(_Reducer(T, P, rel), cfg, rel.D)
    return [int(i) + 1 for i in np.flatnonzero(alive)]


def heavy_threshold_report(S: int, n: int) -> int:
    return max(1, math.ceil(math.sqrt(S / _log2n(n))))


def report_s(T, P, rel: MatchRelation, cfg: MonteCarloConfig | None = None) -> list[int]:
    """Reporting for parameter S: heavy pattern characters exactly, light ones hashed."""
    cfg = cfg or MonteCarloConfig()
    T, P = _prep(T, P, rel)
    n, m = len(T), len(P)
    if m > n:
        return []
    if math.sqrt(rel.S) > m:
        return brute_count(T, P, rel).zeros()
    red = _Reducer(T, P, rel)
    thr = heavy_threshold_report(rel.S, n)
    heavy = [b for b in red.pchars if rel.degree(int(b)) >= thr]
    alive = red.heavy_mismatches(heavy) == 0
    light = ~np.isin(P, heavy)
    if light.any():
        alive = _survivors_d(red, cfg, thr, light, alive)
    return [int(i) + 1 for i in np.flatnonzero(alive)]


def _approx_rounds(red: _Reducer, cfg: MonteCarloConfig, D: int, eps: float,
                   light=None) -> np.ndarray:
    lo = math.ceil(2 * max(D, 1) / eps)
    q = find_prime(lo, 2 * lo)
    best = np.zeros(num_alignments(red.n, red.m), dtype=np.int64)
    for rng in cfg.round_generators(red.n):
        h = draw_hash(rng, red.prime, q)
        np.maximum(best, red.hashed_mismatches(h, light), out=best)
    return best


def heavy_threshold_count(S: int, n: int, eps: float) -> int:
    return max(1, math.ceil(math.sqrt(eps * S / _log2n(n))))


def choose_strategy(rel: MatchRelation, n: int, eps: float) -> str:
    lg = _log2n(n)
    by_d = max(rel.D, 1) * lg / eps
    by_s = math.sqrt(max(rel.S, 1) * lg / eps)
    return "by-D" if by_d <= by_s else "by-S"


def count_approx(T, P, rel: MatchRelation, eps: float, cfg: MonteCarloConfig | None = None,
                 strategy: str = "auto") -> MismatchTable:
    """(1-eps)-approximate counts that never exceed the true counts."""
    if not 0 < eps < 1:
        raise InputError("eps must lie in (0, 1)")
    if strategy not in ("auto", "by-D", "by-S"):
        raise InputError(f"unknown strategy {strategy!r}")
    cfg = cfg or MonteCarloConfig()
    T, P = _prep(T, P, rel)
    n, m = len(T), len(P)
    if m > n:
        return MismatchTable(np.zeros(0, dtype=np.int64), LOWER, eps=eps)
    if strategy == "auto":
        strategy = choose_strategy(rel, n, eps)
    red = _Reducer(T, P, rel)
    if strategy == "by-D":
        if 2 * rel.D / eps > n:
            return MismatchTable(brute_count(T, P, rel).values, EXACT, meta={"fallback": "brute"})
        vals = _approx_rounds(red, cfg, rel.D, eps)
        return MismatchTable(vals, LOWER, eps=eps, meta={"strategy": strategy})
    thr = heavy_threshold_count(rel.S, n, eps)
    heavy = [b for b in red.pchars if rel.degree(int(b)) >= thr]
    vals = red.heavy_mismatches(heavy)
    light = ~np.isin(P, heavy)
    if light.any():
        if 2 * thr / eps > n:
            L = num_alignments(n, m)
            extra = np.zeros(L, dtype=np.int64)
            for j in np.flatnonzero(light):
                extra += ~rel.matches(T[j:j + L], int(P[j]))
            vals = vals + extra
        else:
            vals = vals + _approx_rounds(red, cfg, thr, eps, light)
    return MismatchTable(vals, LOWER, eps=eps, meta={"strategy": strategy, "heavy": len(heavy)})


def report_d_round(T, P, rel: MatchRelation, seed: int) -> list[int]:
    """Alignments surviving one hashing round of :func:`report_d`."""
    T, P = _prep(T, P, rel)
    if len(P) > len(T):
        return []
    red = _Reducer(T, P, rel)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    h = draw_hash(rng, red.prime, 2 * max(rel.D, 1))
    return [int(i) + 1 for i in np.flatnonzero(red.hashed_mismatches(h) == 0)]
