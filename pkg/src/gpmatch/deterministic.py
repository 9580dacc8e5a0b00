"""Deterministic approximate counting through superimposed codes.

Every text character is expanded into the indicator of its code and every
pattern character into the complement of the union of its partners' codes.
The number of code positions of ``T[i+j]`` left uncovered by ``P[j]``'s
partners is zero for a match and at least ``(1-eps)w`` for a mismatch, so
summing over ``j`` gives ``(1-eps) w h <= h' <= w h``.  Only chunk-aligned
offsets matter, so each code position is correlated as its own interleaved
row rather than expanding the strings to length ``n * l``.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .convolution import correlate_sum
from .core import (BAND, EXACT, InputError, MatchRelation, MismatchTable, as_symbols,
                   brute_count, num_alignments)
from .discrepancy import SetSystem
from .superimposed import CodeFamily, build_code


def as_eps(eps) -> Fraction:
    e = eps if isinstance(eps, Fraction) else Fraction(eps).limit_denominator(1 << 30)
    if not 0 < e < 1:
        raise InputError("eps must lie in (0, 1)")
    return e


def _prep(T, P, rel):
    return as_symbols(T, rel.sigma_t, "text"), as_symbols(P, rel.sigma_p, "pattern")


def coded_counts(T: np.ndarray, P: np.ndarray, rel: MatchRelation, eps: Fraction,
                 active: np.ndarray | None = None) -> tuple[np.ndarray, CodeFamily]:
    """``h'`` over the pattern positions in ``active`` (others act as don't cares)."""
    n, m = len(T), len(P)
    if active is None:
        active = np.ones(m, dtype=bool)
    pchars = np.unique(P[active])
    universe = np.unique(np.concatenate([rel.neighbors(int(b)) for b in pchars] + [np.zeros(0, np.int64)]))
    index = np.full(rel.sigma_t, len(universe), dtype=np.int64)  # default: the sentinel
    index[universe] = np.arange(len(universe))
    sets = [index[rel.neighbors(int(b))] for b in pchars]
    code = build_code(SetSystem(len(universe), sets), eps)
    text_codes = code.codes[index[T]]  # (n, w)
    rows = np.unique(text_codes)
    row_of = np.full(code.length, -1, dtype=np.int64)
    row_of[rows] = np.arange(len(rows))
    X = np.zeros((len(rows), n), dtype=np.uint8)
    X[row_of[text_codes], np.arange(n)[:, None]] = 1
    Y = np.zeros((len(rows), m), dtype=np.uint8)
    for b, s in zip(pchars, sets):
        uncovered = np.ones(len(rows), dtype=bool)
        hit = row_of[code.codes[s].ravel()]
        uncovered[hit[hit >= 0]] = False
        Y[:, np.flatnonzero(active & (P == b))] = uncovered[:, None]
    return correlate_sum(X, Y), code


def _code_meta(code: CodeFamily) -> dict:
    return {"d": code.d, "length": code.length, "bound": code.bound, "degenerate": code.degenerate}


def count_det_d(T, P, rel: MatchRelation, eps) -> MismatchTable:
    """Counts ``h'`` with ``(1-eps) w h <= h' <= w h`` at every alignment."""
    eps = as_eps(eps)
    T, P = _prep(T, P, rel)
    n, m = len(T), len(P)
    if m > n:
        return MismatchTable(np.zeros(0, dtype=np.int64))
    if rel.D > m or eps < Fraction(1, m):
        return MismatchTable(brute_count(T, P, rel).values, EXACT, meta={"fallback": "brute"})
    vals, code = coded_counts(T, P, rel, eps)
    return MismatchTable(vals, BAND, w=code.weight, eps=float(eps), meta=_code_meta(code))


def heavy_threshold_det(S: int, n: int, m: int, eps) -> float:
    """``eps sqrt(S) / log2(n)^(5/2)`` clamped to ``[1, m]``."""
    raw = float(eps) * math.sqrt(S) / max(math.log2(n), 1.0) ** 2.5
    return min(max(raw, 1.0), float(m))


def count_det_s(T, P, rel: MatchRelation, eps, threshold: float | None = None) -> MismatchTable:
    """Heavy pattern characters counted exactly, light ones through codes.

    The values are ``w * heavy + h'_light``, so the band of :func:`count_det_d`
    still holds; ``meta["exact_part"]`` holds the heavy counts for a tighter
    interval.
    """
    eps = as_eps(eps)
    T, P = _prep(T, P, rel)
    n, m = len(T), len(P)
    if m > n:
        return MismatchTable(np.zeros(0, dtype=np.int64))
    if eps < Fraction(1, m):
        return MismatchTable(brute_count(T, P, rel).values, EXACT, meta={"fallback": "brute"})
    thr = heavy_threshold_det(rel.S, n, m, eps) if threshold is None else threshold
    pchars = np.unique(P)
    heavy = [int(b) for b in pchars if rel.degree(int(b)) >= thr]
    L = num_alignments(n, m)
    if heavy:
        X = np.array([~rel.matches(T, b) for b in heavy], dtype=np.uint8)
        Y = np.array([P == b for b in heavy], dtype=np.uint8)
        exact = correlate_sum(X, Y)
    else:
        exact = np.zeros(L, dtype=np.int64)
    light = ~np.isin(P, heavy)
    meta = {"threshold": thr, "heavy": len(heavy)}
    if not light.any():
        return MismatchTable(exact, EXACT, meta=meta)
    vals, code = coded_counts(T, P, rel, eps, light)
    meta.update(_code_meta(code), exact_part=exact)
    return MismatchTable(code.weight * exact + vals, BAND, w=code.weight, eps=float(eps), meta=meta)


def report_det(T, P, rel: MatchRelation) -> list[int]:
    """Exact occurrences: ``h' = 0`` iff ``h = 0`` under any certified band."""
    T, P = _prep(T, P, rel)
    if len(P) > len(T):
        return []
    if rel.D <= math.sqrt(rel.S):
        return count_det_d(T, P, rel, Fraction(1, 2)).zeros()
    return count_det_s(T, P, rel, Fraction(1, 2)).zeros()
