"""Instance generators: random regimes and the two lower-bound constructions.

All character codes are 0-indexed.  The don't care character of the matrix
reduction is code 0 on both sides.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InputError, IntervalRelation, MatchRelation, num_alignments


@dataclass
class Instance:
    T: np.ndarray
    P: np.ndarray
    rel: MatchRelation | IntervalRelation
    info: dict | None = None

    def params(self) -> dict:
        return relation_params(self.rel, self.P)


def relation_params(rel, P) -> dict:
    """``D``, ``S`` and, when the relation is interval based or ``P`` is given, ``I``."""
    if isinstance(rel, IntervalRelation):
        diff = np.zeros(rel.sigma_t + 1, dtype=np.int64)
        pdeg = []
        for b in range(rel.sigma_p):
            los, his = rel.bounds(b)
            np.add.at(diff, los, 1)
            np.add.at(diff, his + 1, -1)
            pdeg.append(int((his - los + 1).sum()))
        tdeg = np.cumsum(diff[:-1])
        D = max(max(pdeg, default=0), int(tdeg.max(initial=0)))
        return {"D": D, "S": int(sum(pdeg)), "I": rel.param_I(P)}
    D, S = rel.params()
    I = IntervalRelation.from_relation(rel).param_I(P) if P is not None else None
    return {"D": D, "S": S, "I": I}


def _plant(rng, T, P, rel) -> None:
    """Overwrite a random window of ``T`` with partners of ``P`` where possible."""
    m = len(P)
    start = int(rng.integers(0, len(T) - m + 1))
    for j, b in enumerate(P.tolist()):
        if isinstance(rel, IntervalRelation):
            ivs = rel.intervals(b)
            if ivs:
                lo, hi = ivs[int(rng.integers(0, len(ivs)))]
                T[start + j] = int(rng.integers(lo, hi + 1))
        elif rel.degree(b):
            nb = rel.neighbors(b)
            T[start + j] = int(nb[int(rng.integers(0, len(nb)))])


def gen_random(n: int, m: int, sigma_t: int, sigma_p: int, *, density: float | None = None,
               degree_cap: int | None = None, intervals_per_char: int | None = None,
               seed: int = 0, plant: bool = False) -> Instance:
    """Uniform text and pattern with a relation of the requested kind.

    Exactly one of ``density`` (independent edges), ``degree_cap`` (union of
    random partial matchings, so every degree is at most the cap) or
    ``intervals_per_char`` (up to that many random intervals per pattern
    character) selects the regime.
    """
    if min(n, m, sigma_t, sigma_p) < 1:
        raise InputError("sizes must be positive")
    chosen = [x is not None for x in (density, degree_cap, intervals_per_char)]
    if sum(chosen) != 1:
        raise InputError("choose exactly one of density, degree_cap, intervals_per_char")
    rng = np.random.default_rng(seed)
    if density is not None:
        if not 0 < density <= 1:
            raise InputError("density must lie in (0, 1]")
        mask = rng.random((sigma_t, sigma_p)) < density
        a, b = np.nonzero(mask)
        rel = MatchRelation(sigma_t, sigma_p, zip(a.tolist(), b.tolist()))
    elif degree_cap is not None:
        if degree_cap < 1:
            raise InputError("degree cap must be at least 1")
        k = min(sigma_t, sigma_p)
        pairs = []
        for _ in range(degree_cap):
            ta = rng.permutation(sigma_t)[:k]
            pb = rng.permutation(sigma_p)[:k]
            pairs += list(zip(ta.tolist(), pb.tolist()))
        rel = MatchRelation(sigma_t, sigma_p, pairs)
    else:
        if intervals_per_char < 1:
            raise InputError("intervals per character must be at least 1")
        ivl = {}
        for b in range(sigma_p):
            k = int(rng.integers(0, intervals_per_char + 1))
            cuts = np.sort(rng.choice(sigma_t + 1, size=min(2 * k, sigma_t + 1), replace=False))
            ivl[b] = [(int(lo), int(hi) - 1) for lo, hi in zip(cuts[::2], cuts[1::2])]
        rel = IntervalRelation(sigma_t, sigma_p, ivl)
    T = rng.integers(0, sigma_t, n)
    P = rng.integers(0, sigma_p, m)
    if plant and m <= n:
        _plant(rng, T, P, rel)
    return Instance(T, P, rel)


def gen_adversarial_diagonal(n: int, m: int, grant: bool = False, seed: int = 0) -> Instance:
    """The related-quadruple construction over ``[n] x [2m]``.

    ``T = 0 1 .. n/2-1 0 1 .. n/2-1`` and ``P = 0 1 .. m-1``.  For every
    ``a < n/2, b < m`` either ``(a, b)`` and ``(n/2+a, m+b)`` are edges or
    ``(n/2+a, b)`` and ``(a, m+b)`` are, so every degree is fixed regardless
    of the choices.  Each diagonal is forced to hold a non-edge, except, with
    ``grant``, diagonal ``n/2 - 1``, which only one alignment reads when
    ``m >= 2``.
    """
    if n % 2 or n < 2 * m or m < 1:
        raise InputError("need n even and n >= 2m >= 2")
    h = n // 2
    rng = np.random.default_rng(seed)
    first = rng.random((h, m)) < 0.5  # option 1: (a, b) is an edge
    granted = h - 1 if grant else None
    for d in range(h):
        rows = (d + np.arange(m)) % h
        if d == granted:
            first[rows, np.arange(m)] = True
        elif first[rows, np.arange(m)].all():
            j = int(rng.integers(0, m))
            first[rows[j], j] = False
    pairs = []
    for a in range(h):
        for b in range(m):
            if first[a, b]:
                pairs += [(a, b), (h + a, m + b)]
            else:
                pairs += [(h + a, b), (a, m + b)]
    T = np.concatenate([np.arange(h), np.arange(h)])
    P = np.arange(m)
    return Instance(T, P, MatchRelation(n, 2 * m, pairs), {"granted_diagonal": granted})


DONT_CARE = 0


def _encode(M: np.ndarray, by_column: bool) -> np.ndarray:
    idx = np.arange(1, M.shape[1] + 1)[None, :] if by_column else np.arange(1, M.shape[0] + 1)[:, None]
    return np.where(M.astype(bool), idx, DONT_CARE)


def encode_matrices(A, B) -> tuple[np.ndarray, np.ndarray]:
    """Ones of ``A`` become their column number, ones of ``B`` their row number; zeros become 0."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    return _encode(A, True), _encode(B, False)


def boolean_product(A, B) -> np.ndarray:
    return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64) > 0).astype(np.int64)


def gen_matrix_reduction(A, B) -> Instance:
    """Instance whose non-occurrences at designated alignments spell ``A x B``.

    Text: rows of ``A`` separated by ``z - y + 1`` don't cares and padded by
    ``z^2`` on both sides.  Pattern: columns of ``B`` separated by ``z - y``
    don't cares.  Every non-0 character matches everything except itself.
    ``info["alignment"][i, j]`` is the 1-indexed alignment that places row
    ``i`` of ``A`` against column ``j`` of ``B``.  When ``B`` has fewer
    columns than rows it is padded with zero columns, which only adds
    alignments that are never reported.
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0] or A.size == 0 or B.size == 0:
        raise InputError("need matrices of shapes (x, y) and (y, z)")
    if not np.isin(A, (0, 1)).all() or not np.isin(B, (0, 1)).all():
        raise InputError("matrices must be 0/1")
    x, y = A.shape
    z_orig = B.shape[1]
    z = max(z_orig, y)
    B = np.pad(B, ((0, 0), (0, z - z_orig)))
    Ae, Be = encode_matrices(A, B)
    gap_t = np.zeros(z - y + 1, dtype=np.int64)
    gap_p = np.zeros(z - y, dtype=np.int64)
    pad = np.zeros(z * z, dtype=np.int64)
    text = [pad]
    for i in range(x):
        if i:
            text.append(gap_t)
        text.append(Ae[i])
    text.append(pad)
    pat = []
    for j in range(z):
        if j:
            pat.append(gap_p)
        pat.append(Be[:, j])
    T = np.concatenate(text)
    P = np.concatenate(pat)
    sigma = y + 1
    pairs = [(a, b) for a in range(sigma) for b in range(sigma)
             if a == DONT_CARE or b == DONT_CARE or a != b]
    ii, jj = np.meshgrid(np.arange(x), np.arange(z_orig), indexing="ij")
    align = z * z + ii * (z + 1) - jj * z + 1
    assert align.max() <= num_alignments(len(T), len(P))
    return Instance(T, P, MatchRelation(sigma, sigma, pairs), {"alignment": align, "z": z})
