"""Exact 0/1 cross-correlation and don't-care mismatch counting.

Binary don't-care strings are int8 arrays over ``ZERO``, ``ONE`` and ``DC``.
Every correlation here is a sum of 0/1 products bounded by the pattern
length, so results are rounded back to integers; the number-theoretic
backend is used automatically once the pattern is too long for that rounding
to stay safe in double precision.
"""
from __future__ import annotations

import numpy as np

from .core import InputError, MismatchTable

ZERO, ONE, DC = 0, 1, 2
_CHARS = {"0": ZERO, "1": ONE, "?": DC}

FFT_MAX_PATTERN = 1 << 24

# NTT-friendly primes p = c * 2^k + 1 with primitive root 3; product > 2^57.
_NTT_PRIMES = (998244353, 167772161)
_NTT_ROOT = 3


def dc_string(s) -> np.ndarray:
    """Parse ``"01?"`` text (or pass through an int array) into a DC string."""
    if isinstance(s, str):
        try:
            arr = np.array([_CHARS[c] for c in s], dtype=np.int8)
        except KeyError as exc:
            raise InputError(f"invalid don't-care character {exc}") from None
    else:
        arr = np.asarray(s, dtype=np.int8)
        if arr.size and (arr.min() < 0 or arr.max() > DC):
            raise InputError("don't-care strings hold only ZERO, ONE, DC")
    if arr.size == 0:
        raise InputError("don't-care strings must be non-empty")
    return arr


def dc_to_str(arr) -> str:
    return "".join("01?"[int(c)] for c in arr)


def _next_pow2(x: int) -> int:
    return 1 << max(0, int(x - 1).bit_length())


# -- floating point backend ----------------------------------------------------

def _fft_correlate_sum(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    k, n = X.shape
    m = Y.shape[1]
    L_out = n - m + 1
    mp = _next_pow2(m)
    L = 2 * mp
    if n <= L:
        N = _next_pow2(n)
        F = np.fft.rfft(X, N) * np.conj(np.fft.rfft(Y, N))
        return np.fft.irfft(F.sum(axis=0), N)[:L_out]
    nb = -(-L_out // mp)
    Xp = np.zeros((k, nb * mp + mp), dtype=np.float64)
    Xp[:, :n] = X
    blocks = np.lib.stride_tricks.sliding_window_view(Xp, L, axis=1)[:, ::mp][:, :nb]
    Fy = np.conj(np.fft.rfft(Y, L))
    acc = np.zeros((nb, L // 2 + 1), dtype=np.complex128)
    # one instance at a time keeps peak memory at O(n) per row
    for c in range(k):
        acc += np.fft.rfft(blocks[c], L, axis=-1) * Fy[c]
    out = np.fft.irfft(acc, L, axis=-1)[:, :mp].ravel()
    return out[:L_out]


# -- number theoretic backend ----------------------------------------------------

def _ntt(a: np.ndarray, p: int, invert: bool = False) -> np.ndarray:
    """Iterative radix-2 NTT along the last axis (length a power of two)."""
    a = a.copy()
    N = a.shape[-1]
    bits = N.bit_length() - 1
    rev = np.zeros(N, dtype=np.int64)
    for b in range(bits):
        rev |= ((np.arange(N) >> b) & 1) << (bits - 1 - b)
    a = a[..., rev]
    length = 2
    while length <= N:
        w = pow(_NTT_ROOT, (p - 1) // length, p)
        if invert:
            w = pow(w, p - 2, p)
        half = length // 2
        tw = np.ones(half, dtype=np.uint64)
        s = 1
        while s < half:
            tw[s:2 * s] = tw[:s] * np.uint64(pow(w, s, p)) % np.uint64(p)
            s *= 2
        a = a.reshape(a.shape[:-1] + (N // length, length))
        u = a[..., :half].copy()
        v = a[..., half:] * tw % np.uint64(p)
        a[..., :half] = (u + v) % np.uint64(p)
        a[..., half:] = (u + np.uint64(p) - v) % np.uint64(p)
        a = a.reshape(a.shape[:-2] + (N,))
        length <<= 1
    if invert:
        a = a * np.uint64(pow(N, p - 2, p)) % np.uint64(p)
    return a


def _ntt_correlate_sum(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    k, n = X.shape
    m = Y.shape[1]
    N = _next_pow2(n + m)
    residues = []
    for p in _NTT_PRIMES:
        xa = np.zeros((k, N), dtype=np.uint64)
        xa[:, :n] = X
        ya = np.zeros((k, N), dtype=np.uint64)
        ya[:, :m] = Y[:, ::-1]
        prod = _ntt(xa, p) * _ntt(ya, p) % np.uint64(p)
        tot = np.zeros(N, dtype=np.uint64)
        for row in prod:
            tot = (tot + row) % np.uint64(p)
        conv = _ntt(tot, p, invert=True)
        residues.append(conv[m - 1:n].astype(np.int64))
    p1, p2 = _NTT_PRIMES
    inv = pow(p1, -1, p2)
    r1, r2 = residues
    # Garner reconstruction; values are < p1 * p2 < 2^63 by construction
    t = ((r2 - r1) % p2).astype(np.uint64) * np.uint64(inv) % np.uint64(p2)
    return r1 + np.int64(p1) * t.astype(np.int64)


def correlate_sum(X, Y, backend: str = "auto") -> np.ndarray:
    """``sum_c corr(X[c], Y[c])`` for stacked 0/1 rows, integer exact.

    ``out[i] = sum_c sum_j X[c, i+j] * Y[c, j]`` (0-indexed), length
    ``n - m + 1``.
    """
    X = np.atleast_2d(np.asarray(X))
    Y = np.atleast_2d(np.asarray(Y))
    if X.shape[0] != Y.shape[0]:
        raise InputError("text and pattern stacks must have the same number of rows")
    n, m = X.shape[1], Y.shape[1]
    if m == 0 or n < m:
        return np.zeros(max(n - m + 1, 0), dtype=np.int64)
    if X.shape[0] == 0:
        return np.zeros(n - m + 1, dtype=np.int64)
    if backend == "auto":
        backend = "ntt" if m > FFT_MAX_PATTERN else "fft"
    if backend == "fft":
        out = _fft_correlate_sum(X.astype(np.float64), Y.astype(np.float64))
        return np.rint(out).astype(np.int64)
    if backend == "ntt":
        return _ntt_correlate_sum(X.astype(np.uint64), Y.astype(np.uint64))
    raise InputError(f"unknown backend {backend!r}")


def cross_correlate(x, y, backend: str = "auto") -> np.ndarray:
    """``out[i] = sum_j x[i+j] * y[j]`` for 0/1 sequences, ``len(y) <= len(x)``."""
    x = np.asarray(x)
    y = np.asarray(y)
    if len(y) > len(x):
        raise InputError("pattern longer than text")
    return correlate_sum(x[None, :], y[None, :], backend)


def dc_mismatch_count(T, P, backend: str = "auto") -> MismatchTable:
    """Per-alignment count of ``(0,1)`` / ``(1,0)`` pairs; ``?`` matches all."""
    T = dc_string(T)
    P = dc_string(P)
    if len(P) > len(T):
        return MismatchTable(np.zeros(0, dtype=np.int64))
    X = np.stack([T == ZERO, T == ONE]).astype(np.uint8)
    Y = np.stack([P == ONE, P == ZERO]).astype(np.uint8)
    return MismatchTable(correlate_sum(X, Y, backend))


def naive_dc_mismatch_count(T, P) -> np.ndarray:
    """Direct ``O(nm)`` scan, kept independent of the transform path."""
    T = dc_string(T)
    P = dc_string(P)
    n, m = len(T), len(P)
    out = np.zeros(max(n - m + 1, 0), dtype=np.int64)
    for i in range(len(out)):
        w = T[i:i + m]
        out[i] = int(np.sum((w != DC) & (P != DC) & (w != P)))
    return out
