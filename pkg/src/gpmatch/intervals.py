"""Exact counting when every pattern character matches a few intervals of text characters.

The distinct text characters are grouped, in sorted order, into ranges whose
total frequency is at most ``b`` unless they are a single character.  A first
pass counts, per alignment, positions whose whole range is disjoint from the
pattern character's intervals.  The remaining mismatches sit in ranges that
straddle an interval endpoint; a second pass walks their occurrences
directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convolution import correlate_sum
from .core import EXACT, InputError, IntervalRelation, MismatchTable, as_symbols, brute_count, num_alignments


def greedy_partition(values, b: int) -> list[tuple[int, int]]:
    """Split ``values`` left to right into ``[start, stop)`` runs.

    A value above ``b`` is a run of its own; otherwise a run is the longest
    prefix of what remains whose sum stays within ``b``.
    """
    if b <= 1:
        raise InputError("block parameter b must exceed 1")
    vals = [int(v) for v in values]
    if any(v < 0 for v in vals):
        raise InputError("values must be non-negative")
    out, i = [], 0
    while i < len(vals):
        if vals[i] > b:
            out.append((i, i + 1))
            i += 1
            continue
        j, total = i, 0
        while j < len(vals) and total + vals[j] <= b:
            total += vals[j]
            j += 1
        out.append((i, j))
        i = j
    return out


@dataclass
class RangePartition:
    b: int
    chars: np.ndarray  # distinct text characters, ascending
    counts: np.ndarray
    starts: np.ndarray  # range r covers chars[starts[r]:stops[r]]
    stops: np.ndarray
    range_of: np.ndarray  # range id of chars[k]

    @classmethod
    def build(cls, T: np.ndarray, b: int) -> tuple["RangePartition", np.ndarray]:
        chars, inv, counts = np.unique(T, return_inverse=True, return_counts=True)
        runs = greedy_partition(counts, b)
        starts = np.array([s for s, _ in runs], dtype=np.int64)
        stops = np.array([e for _, e in runs], dtype=np.int64)
        range_of = np.repeat(np.arange(len(runs)), stops - starts)
        return cls(b, chars, counts, starts, stops, range_of), inv

    @property
    def size(self) -> int:
        return len(self.starts)

    @property
    def span_lo(self) -> np.ndarray:
        return self.chars[self.starts]

    @property
    def span_hi(self) -> np.ndarray:
        return self.chars[self.stops - 1]

    def singleton(self, r: int) -> bool:
        return self.stops[r] - self.starts[r] == 1

    def range_of_char(self, a: int) -> int | None:
        """Range whose span ``[first, last]`` holds ``a``, if any."""
        r = int(np.searchsorted(self.span_lo, a, side="right")) - 1
        return r if r >= 0 and a <= self.span_hi[r] else None

    def members(self, los: np.ndarray, his: np.ndarray) -> np.ndarray:
        """Ranges whose span meets at least one of the closed intervals."""
        mark = np.zeros(self.size + 1, dtype=np.int64)
        first = np.searchsorted(self.span_hi, los, side="left")
        last = np.searchsorted(self.span_lo, his, side="right")
        ok = first < last
        np.add.at(mark, first[ok], 1)
        np.add.at(mark, last[ok], -1)
        return np.cumsum(mark[:-1]) > 0


def block_parameter(n: int, m: int, I: int) -> int:
    return max(2, math.ceil(n * math.sqrt(math.log2(m) / I)))


@dataclass
class _Plan:
    part: RangePartition
    Tr: np.ndarray  # reduced text
    pchars: np.ndarray
    pinv: np.ndarray
    member: np.ndarray  # member[k, r]: range r meets the intervals of pchars[k]


def _plan(T, P, ir, b) -> _Plan:
    part, inv = RangePartition.build(T, b)
    pchars, pinv = np.unique(P, return_inverse=True)
    member = np.array([part.members(*ir.bounds(int(c))) for c in pchars], dtype=bool)
    return _Plan(part, part.range_of[inv], pchars, pinv, member.reshape(len(pchars), part.size))


def _phase1(plan: _Plan, n: int, m: int) -> np.ndarray:
    used = np.unique(plan.Tr)
    X = (plan.Tr[None, :] == used[:, None]).astype(np.uint8)
    Y = (~plan.member[:, used].T[:, plan.pinv]).astype(np.uint8)
    return correlate_sum(X, Y)


def _phase2_positions(plan: _Plan, ir: IntervalRelation, occ: list[np.ndarray], k: int) -> np.ndarray:
    """Text positions of characters that mismatch ``pchars[k]`` although their range meets it."""
    b = int(plan.pchars[k])
    part = plan.part
    los, his = ir.bounds(b)
    hit = set()
    for a in np.concatenate([los, his]).tolist():
        r = part.range_of_char(a)
        if r is not None and not part.singleton(r):
            hit.add(r)
    chunks = []
    for r in sorted(hit):
        ks = np.arange(part.starts[r], part.stops[r])
        for c in ks[~ir.matches(part.chars[ks], b)]:
            chunks.append(occ[c])
    return np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)


def count_exact_i(T, P, ir: IntervalRelation, b: int | None = None, trace: bool = False) -> MismatchTable:
    """Exact mismatch counts for an interval relation.

    With ``trace`` the table's ``meta`` also records each pass's counts and
    the ``(i, j)`` pairs (0-indexed) each pass charged.
    """
    T = as_symbols(T, ir.sigma_t, "text")
    P = as_symbols(P, ir.sigma_p, "pattern")
    n, m = len(T), len(P)
    if m > n:
        return MismatchTable(np.zeros(0, dtype=np.int64))
    I = ir.param_I(P)
    if b is None and (I > m * m or I == 0):
        return MismatchTable(brute_count(T, P, ir).values, EXACT, meta={"fallback": "brute", "I": I})
    b = block_parameter(n, m, I) if b is None else int(b)
    plan = _plan(T, P, ir, b)
    L = num_alignments(n, m)
    first = _phase1(plan, n, m)
    # occurrence lists per distinct character, from one stable sort
    _, inv = np.unique(T, return_inverse=True)
    order = np.argsort(inv, kind="stable")
    occ = np.split(order, np.cumsum(plan.part.counts)[:-1])
    second = np.zeros(L, dtype=np.int64)
    work = 0
    pairs2 = []
    for k in range(len(plan.pchars)):
        pos = _phase2_positions(plan, ir, occ, k)
        if pos.size == 0:
            continue
        js = np.flatnonzero(plan.pinv == k)
        work += pos.size * js.size
        align = (pos[None, :] - js[:, None]).ravel()
        ok = (align >= 0) & (align < L)
        second += np.bincount(align[ok], minlength=L)
        if trace:
            jj = np.repeat(js, pos.size)
            pairs2 += list(zip(align[ok].tolist(), jj[ok].tolist()))
    meta = {"b": b, "I": I, "ranges": plan.part.size, "phase2_work": work}
    if trace:
        miss = ~plan.member[plan.pinv][np.arange(m)[None, :], plan.Tr[np.arange(L)[:, None] + np.arange(m)[None, :]]]
        meta.update(phase1=first, phase2=second,
                     pairs1=set(zip(*[x.tolist() for x in np.nonzero(miss)])), pairs2=pairs2)
    return MismatchTable(first + second, EXACT, meta=meta)


def threshold_count(T, P, delta: int, sigma_t: int | None = None, sigma_p: int | None = None) -> MismatchTable:
    """Counts where ``a`` matches ``b`` iff ``|a - b| < delta``."""
    if delta < 1:
        raise InputError("delta must be >= 1")
    T = as_symbols(T, name="text")
    P = as_symbols(P, name="pattern")
    sigma_t = int(T.max()) + 1 if sigma_t is None else sigma_t
    sigma_p = int(P.max()) + 1 if sigma_p is None else sigma_p
    return count_exact_i(T, P, IntervalRelation.threshold(sigma_t, sigma_p, delta))
