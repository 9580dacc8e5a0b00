"""Texts, patterns, matching relations and the brute-force oracle.

Alignments are 1-indexed throughout the public API: alignment ``i`` compares
``T[i .. i+m-1]`` against ``P[1 .. m]``.  Internally every array is 0-indexed
and ``values[i-1]`` holds the count for alignment ``i``.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_ALPHABET = 2 ** 32
# Above this many text characters a dense per-column boolean lookup is not
# materialised; membership falls back to sorted-array searches.
_DENSE_LIMIT = 1 << 22

TEXT = "text"
PATTERN = "pattern"


class InputError(ValueError):
    """Malformed input: bad character code, bad parameter, bad file."""


def as_symbols(symbols, alphabet_size: int | None = None, name: str = "sequence") -> np.ndarray:
    arr = np.asarray(symbols, dtype=np.int64).ravel()
    if arr.size == 0:
        raise InputError(f"{name} must be non-empty")
    if arr.min() < 0:
        raise InputError(f"{name} contains negative character codes")
    if alphabet_size is not None:
        if alphabet_size > MAX_ALPHABET:
            raise InputError(f"alphabet size {alphabet_size} exceeds 2^32")
        if arr.max() >= alphabet_size:
            raise InputError(f"{name} code {int(arr.max())} outside alphabet of size {alphabet_size}")
    return arr


def densify(*sequences: Sequence[int]) -> tuple[list[np.ndarray], np.ndarray]:
    """Remap a sparse integer alphabet onto ``[0, sigma)``.

    Returns the remapped sequences and the sorted original codes, so that
    ``codes[new]`` recovers the original character.
    """
    arrays = [np.asarray(s, dtype=np.int64).ravel() for s in sequences]
    codes = np.unique(np.concatenate(arrays)) if arrays else np.zeros(0, np.int64)
    return [np.searchsorted(codes, a) for a in arrays], codes


def num_alignments(n: int, m: int) -> int:
    return max(n - m + 1, 0)


class MatchRelation:
    """Bipartite matching graph between text and pattern characters.

    Neighbour order is the order of first appearance in the edge list it was
    built from, which fixes :meth:`kth_neighbor` for the lifetime of the
    object.  Instances are never mutated after construction.
    """

    def __init__(self, sigma_t: int, sigma_p: int, pairs: Iterable[tuple[int, int]] = ()):
        if sigma_t < 1 or sigma_p < 1:
            raise InputError("alphabet sizes must be positive")
        if sigma_t > MAX_ALPHABET or sigma_p > MAX_ALPHABET:
            raise InputError("alphabet sizes are limited to 2^32")
        self.sigma_t = int(sigma_t)
        self.sigma_p = int(sigma_p)
        self._edges: set[int] = set()
        self._pair_list: list[tuple[int, int]] = []
        text_adj: dict[int, list[int]] = {}
        pattern_adj: dict[int, list[int]] = {}
        for a, b in pairs:
            a, b = int(a), int(b)
            self._check(a, TEXT)
            self._check(b, PATTERN)
            key = a * self.sigma_p + b
            if key in self._edges:
                continue
            self._edges.add(key)
            self._pair_list.append((a, b))
            text_adj.setdefault(a, []).append(b)
            pattern_adj.setdefault(b, []).append(a)
        self._text_adj = {a: np.array(v, dtype=np.int64) for a, v in text_adj.items()}
        self._pattern_adj = {b: np.array(v, dtype=np.int64) for b, v in pattern_adj.items()}
        self._sorted_cache: dict[int, np.ndarray] = {}
        self._column_cache: dict[int, np.ndarray] = {}
        self.S = len(self._edges)
        degs = [len(v) for v in text_adj.values()] + [len(v) for v in pattern_adj.values()]
        self.D = max(degs, default=0)

    # -- construction helpers -------------------------------------------------
    @classmethod
    def identity(cls, sigma: int) -> "MatchRelation":
        return cls(sigma, sigma, ((a, a) for a in range(sigma)))

    @classmethod
    def complete(cls, sigma_t: int, sigma_p: int) -> "MatchRelation":
        return cls(sigma_t, sigma_p, ((a, b) for b in range(sigma_p) for a in range(sigma_t)))

    @classmethod
    def threshold(cls, sigma: int, delta: int) -> "MatchRelation":
        """``a`` matches ``b`` iff ``|a - b| < delta`` over ``[0, sigma)``."""
        if delta < 1:
            raise InputError("delta must be >= 1")
        pairs = ((a, b) for b in range(sigma)
                 for a in range(max(0, b - delta + 1), min(sigma, b + delta)))
        return cls(sigma, sigma, pairs)

    # -- oracles ----------------------------------------------------------------
    def _check(self, v: int, side: str) -> None:
        if side not in (TEXT, PATTERN):
            raise InputError(f"side must be '{TEXT}' or '{PATTERN}'")
        bound = self.sigma_t if side == TEXT else self.sigma_p
        if not 0 <= v < bound:
            raise InputError(f"{side} character {v} outside [0, {bound})")

    def edge(self, a: int, b: int) -> bool:
        self._check(a, TEXT)
        self._check(b, PATTERN)
        return a * self.sigma_p + b in self._edges

    def degree(self, v: int, side: str = PATTERN) -> int:
        self._check(v, side)
        adj = self._text_adj if side == TEXT else self._pattern_adj
        got = adj.get(v)
        return 0 if got is None else len(got)

    def kth_neighbor(self, v: int, k: int, side: str = PATTERN) -> int:
        """1-indexed ``k``-th partner of ``v``."""
        deg = self.degree(v, side)
        if not 1 <= k <= deg:
            raise InputError(f"k={k} out of range for degree {deg}")
        adj = self._text_adj if side == TEXT else self._pattern_adj
        return int(adj[v][k - 1])

    def neighbors(self, v: int, side: str = PATTERN) -> np.ndarray:
        self._check(v, side)
        adj = self._text_adj if side == TEXT else self._pattern_adj
        return adj.get(v, np.zeros(0, dtype=np.int64))

    def params(self) -> tuple[int, int]:
        return self.D, self.S

    def pairs(self) -> list[tuple[int, int]]:
        """Edges in their original insertion order (duplicates dropped)."""
        return list(self._pair_list)

    # -- bulk membership ----------------------------------------------------------
    def sorted_neighbors(self, b: int) -> np.ndarray:
        got = self._sorted_cache.get(b)
        if got is None:
            got = np.sort(self.neighbors(b, PATTERN))
            self._sorted_cache[b] = got
        return got

    def matches(self, text_chars: np.ndarray, b: int) -> np.ndarray:
        """Vectorised ``edge(text_chars[k], b)``."""
        if self.sigma_t <= _DENSE_LIMIT:
            col = self._column_cache.get(b)
            if col is None:
                col = np.zeros(self.sigma_t, dtype=bool)
                col[self.neighbors(b, PATTERN)] = True
                self._column_cache[b] = col
            return col[text_chars]
        return np.isin(text_chars, self.sorted_neighbors(b))

    def __repr__(self) -> str:
        return f"MatchRelation(sigma_t={self.sigma_t}, sigma_p={self.sigma_p}, D={self.D}, S={self.S})"


def merge_intervals(intervals: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """Sort closed intervals and merge overlapping or adjacent ones."""
    out: list[list[int]] = []
    for lo, hi in sorted((int(lo), int(hi)) for lo, hi in intervals):
        if lo > hi:
            raise InputError(f"empty interval [{lo}, {hi}]")
        if out and lo <= out[-1][1] + 1:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


def intervals_of(chars: Iterable[int]) -> list[tuple[int, int]]:
    return merge_intervals((c, c) for c in chars)


class IntervalRelation:
    """Matching relation given as, per pattern character, a minimal list of
    disjoint sorted closed intervals over the text alphabet."""

    def __init__(self, sigma_t: int, sigma_p: int, intervals: dict[int, Iterable[tuple[int, int]]]):
        if sigma_t < 1 or sigma_p < 1:
            raise InputError("alphabet sizes must be positive")
        self.sigma_t = int(sigma_t)
        self.sigma_p = int(sigma_p)
        self._ivl: dict[int, list[tuple[int, int]]] = {}
        for b, ivs in intervals.items():
            b = int(b)
            if not 0 <= b < self.sigma_p:
                raise InputError(f"pattern character {b} outside [0, {self.sigma_p})")
            merged = merge_intervals(ivs)
            for lo, hi in merged:
                if lo < 0 or hi >= self.sigma_t:
                    raise InputError(f"interval [{lo}, {hi}] outside text alphabet")
            if merged:
                self._ivl[b] = merged
        self._arrays: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    @classmethod
    def from_relation(cls, rel: MatchRelation) -> "IntervalRelation":
        return cls(rel.sigma_t, rel.sigma_p,
                   {b: intervals_of(rel.neighbors(b)) for b in range(rel.sigma_p) if rel.degree(b)})

    @classmethod
    def threshold(cls, sigma_t: int, sigma_p: int, delta: int) -> "IntervalRelation":
        if delta < 1:
            raise InputError("delta must be >= 1")
        ivl = {}
        for b in range(sigma_p):
            lo, hi = max(0, b - delta + 1), min(sigma_t - 1, b + delta - 1)
            if lo <= hi:
                ivl[b] = [(lo, hi)]
        return cls(sigma_t, sigma_p, ivl)

    def intervals(self, b: int) -> list[tuple[int, int]]:
        if not 0 <= b < self.sigma_p:
            raise InputError(f"pattern character {b} outside [0, {self.sigma_p})")
        return self._ivl.get(b, [])

    def bounds(self, b: int) -> tuple[np.ndarray, np.ndarray]:
        got = self._arrays.get(b)
        if got is None:
            ivs = self.intervals(b)
            got = (np.array([lo for lo, _ in ivs], dtype=np.int64),
                   np.array([hi for _, hi in ivs], dtype=np.int64))
            self._arrays[b] = got
        return got

    def edge(self, a: int, b: int) -> bool:
        if not 0 <= a < self.sigma_t:
            raise InputError(f"text character {a} outside [0, {self.sigma_t})")
        ivs = self.intervals(b)
        k = bisect.bisect_right(ivs, (a, float("inf"))) - 1
        return k >= 0 and ivs[k][0] <= a <= ivs[k][1]

    def matches(self, text_chars: np.ndarray, b: int) -> np.ndarray:
        los, his = self.bounds(b)
        if los.size == 0:
            return np.zeros(np.shape(text_chars), dtype=bool)
        k = np.searchsorted(los, text_chars, side="right") - 1
        ok = k >= 0
        kk = np.where(ok, k, 0)
        return ok & (text_chars <= his[kk])

    def to_relation(self) -> MatchRelation:
        pairs = ((a, b) for b, ivs in sorted(self._ivl.items()) for lo, hi in ivs for a in range(lo, hi + 1))
        return MatchRelation(self.sigma_t, self.sigma_p, pairs)

    def param_I(self, P) -> int:
        P = as_symbols(P, self.sigma_p, "pattern")
        counts = np.bincount(P, minlength=0)
        return int(sum(int(c) * len(self._ivl.get(b, ())) for b, c in enumerate(counts) if c))

    def __repr__(self) -> str:
        return f"IntervalRelation(sigma_t={self.sigma_t}, sigma_p={self.sigma_p}, chars={len(self._ivl)})"


def param_I(ir: IntervalRelation, P) -> int:
    return ir.param_I(P)


EXACT = "exact"
LOWER = "lower-estimate"
BAND = "scaled-band"


@dataclass
class MismatchTable:
    """Per-alignment mismatch counts.

    ``kind`` is one of ``exact``, ``lower-estimate`` or ``scaled-band``.  For
    the scaled band, ``values[i]`` is certified to lie in
    ``[(1-eps)*w*h, w*h]`` for the true count ``h``.
    """

    values: np.ndarray
    kind: str = EXACT
    w: int = 1
    eps: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.values)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Interval ``[lo, hi]`` guaranteed to contain the true counts.

        Lower estimates only certify the lower end; ``hi`` is then ``None``.
        """
        v = self.values.astype(float)
        if self.kind == EXACT:
            return v, v
        if self.kind == BAND:
            # an exactly counted share enters the values scaled by w
            ex = np.asarray(self.meta.get("exact_part", 0), dtype=float)
            light = v - self.w * ex
            return ex + light / self.w, ex + light / ((1.0 - self.eps) * self.w)
        return v, None

    def estimate(self) -> np.ndarray:
        if self.kind == BAND:
            return np.rint(self.values / self.w).astype(np.int64)
        return self.values.copy()

    def zeros(self) -> list[int]:
        """1-indexed alignments with a zero entry."""
        return [int(i) + 1 for i in np.flatnonzero(self.values == 0)]


def brute_count(T, P, rel) -> MismatchTable:
    """Exact mismatch counts by direct comparison, ``O(nm)``.

    ``rel`` may be a :class:`MatchRelation` or an :class:`IntervalRelation`.
    """
    T = as_symbols(T, rel.sigma_t, "text")
    P = as_symbols(P, rel.sigma_p, "pattern")
    n, m = len(T), len(P)
    L = num_alignments(n, m)
    out = np.zeros(L, dtype=np.int64)
    if L == 0:
        return MismatchTable(out)
    for j in range(m):
        out += ~rel.matches(T[j:j + L], int(P[j]))
    return MismatchTable(out)


def brute_report(T, P, rel) -> list[int]:
    return brute_count(T, P, rel).zeros()
