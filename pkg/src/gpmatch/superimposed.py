"""Data-dependent superimposed codes from irreducible polynomials over GF(2).

Polynomials are bitmasks: bit ``i`` is the coefficient of ``x^i``.  Element
``u`` (0-indexed) is identified with ``q = u + 1`` and with the polynomial
whose coefficients are the binary digits of ``q``.  For every irreducible
``p`` of degree ``d`` the code of ``u`` holds one position, built from the
remainder ``pol(u) mod p``, the index of ``p``, and the partition label of
``u``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import InputError
from .discrepancy import SetSystem, build_partition

SIEVE_MAX_DEGREE = 24


def degree(p: int) -> int:
    """Degree of ``p``; -1 for the zero polynomial."""
    return int(p).bit_length() - 1


def clmul(a: int, b: int) -> int:
    """Carry-less product, i.e. multiplication in GF(2)[x]."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mod(a: int, p: int) -> int:
    if p == 0:
        raise InputError("division by the zero polynomial")
    dp = degree(p)
    while degree(a) >= dp:
        a ^= p << (degree(a) - dp)
    return a


def _mulmod(a: int, b: int, p: int) -> int:
    return poly_mod(clmul(a, b), p)


def _powx_mod(e: int, p: int) -> int:
    """``x^(2^e) mod p``."""
    r = poly_mod(2, p)
    for _ in range(e):
        r = _mulmod(r, r, p)
    return r


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(p: int) -> bool:
    """Rabin's test: ``x^(2^d) = x mod p`` and no proper sub-field root."""
    d = degree(p)
    if d < 1:
        return False
    if _powx_mod(d, p) != poly_mod(2, p):
        return False
    for r in _prime_factors(d):
        if _gcd(p, _powx_mod(d // r, p) ^ 2) != 1:
            return False
    return True


def _clmul_vec(g: int, hs: np.ndarray) -> np.ndarray:
    out = np.zeros_like(hs)
    i = 0
    while g:
        if g & 1:
            out ^= hs << np.uint64(i)
        g >>= 1
        i += 1
    return out


def irreducible_polys(d: int) -> list[int]:
    """All irreducible polynomials of degree ``d`` in ascending mask order.

    Up to degree 24 a sieve strikes out every product of a smaller
    irreducible with a cofactor; beyond that each candidate is tested
    individually, which is correct but only practical for small counts.
    """
    if not 1 <= d <= 63:
        raise InputError("degree must lie in [1, 63]")
    if d > SIEVE_MAX_DEGREE:
        return [p for p in range(1 << d, 1 << (d + 1)) if is_irreducible(p)]
    alive = np.ones(1 << d, dtype=bool)  # index = mask - 2^d
    for e in range(1, d // 2 + 1):
        cof = np.arange(1 << (d - e), 1 << (d - e + 1), dtype=np.uint64)
        for g in irreducible_polys(e):
            alive[(_clmul_vec(g, cof) - np.uint64(1 << d)).astype(np.int64)] = False
    return [int(i) + (1 << d) for i in np.flatnonzero(alive)]


def irreducible_polys_bruteforce(d: int) -> list[int]:
    """Trial division by every polynomial of degree 1..d/2."""
    out = []
    for p in range(1 << d, 1 << (d + 1)):
        if all(poly_mod(p, g) for g in range(2, 1 << (d // 2 + 1))):
            out.append(p)
    return out


def mod_table(p: int, t: int) -> np.ndarray:
    """``table[q] = q mod p`` for every ``q`` of degree at most ``t``.

    Filled degree by degree: a ``q`` of degree ``e >= deg p`` shares its
    remainder with ``q - p x^(e - deg p)``, which has smaller degree.
    """
    dp = degree(p)
    if dp < 0 or dp > t or t > 40:
        raise InputError("need deg(p) <= t <= 40")
    table = np.arange(1 << (t + 1), dtype=np.int64)
    for e in range(dp, t + 1):
        block = slice(1 << e, 1 << (e + 1))
        table[block] = table[np.arange(1 << e, 1 << (e + 1)) ^ (p << (e - dp))]
    return table


@dataclass
class CodeFamily:
    """Row ``u`` of ``codes`` is ``C_u``; the last row belongs to the sentinel."""

    codes: np.ndarray
    length: int
    weight: int
    eps: Fraction
    labels: np.ndarray
    d: int
    t: int
    bound: int
    polys: list
    degenerate: bool

    @property
    def sentinel(self) -> int:
        return len(self.codes) - 1

    def code(self, u: int) -> np.ndarray:
        return self.codes[u]


def choose_degree(t: int, bound: int, eps: Fraction) -> tuple[int | None, list]:
    """Smallest ``d <= t`` whose union bound ``floor(t/d) * B <= eps * #irr(d)`` holds."""
    for d in range(1, t + 1):
        polys = irreducible_polys(d)
        if (t // d) * bound <= eps * len(polys):
            return d, polys
    return None, []


def build_code(sys: SetSystem, eps) -> CodeFamily:
    """Code of weight ``w`` where each ``u`` outside ``S_i`` keeps ``(1-eps)w`` private positions."""
    eps = Fraction(eps).limit_denominator(1 << 30) if not isinstance(eps, Fraction) else eps
    if not 0 < eps < 1:
        raise InputError("eps must lie in (0, 1)")
    N = sys.universe_size + 1  # elements plus the sentinel
    full = SetSystem(N, sys.sets, sys.k)
    part = build_partition(full)
    t = degree(N)
    d, polys = choose_degree(t, part.bound, eps)
    if d is None:
        codes = np.arange(N, dtype=np.int64)[:, None]
        return CodeFamily(codes, N, 1, eps, part.labels, t + 1, t, part.bound, [], True)
    q = np.arange(1, N + 1, dtype=np.int64)
    low = (1 << d) - 1
    codes = np.empty((N, len(polys)), dtype=np.int64)
    for col, p in enumerate(polys):
        rem = mod_table(p, t)[q]
        codes[:, col] = rem + ((p & low) << d) + (part.labels << (2 * d))
    length = (1 << (2 * d)) * part.label_space
    return CodeFamily(codes, length, len(polys), eps, part.labels, d, t, part.bound, polys, False)


@dataclass
class CodeReport:
    ok: bool
    tau: Fraction
    min_surviving: int
    worst_set: int | None
    worst_element: int | None


def verify_code(code: CodeFamily, sys: SetSystem, eps=None) -> CodeReport:
    """Check every ``(S_i, u)`` with ``u`` outside ``S_i`` against ``tau = (1-eps)w``."""
    eps = code.eps if eps is None else Fraction(eps)
    tau = (1 - eps) * code.weight
    codes = np.asarray(code.codes)
    best, worst = None, (None, None)
    for i, s in enumerate(sys.sets):
        covered = np.zeros(code.length, dtype=bool)
        covered[codes[s].ravel()] = True
        surv = code.weight - covered[codes].sum(axis=1)
        surv[s] = np.iinfo(np.int64).max
        u = int(np.argmin(surv))
        if len(s) < len(codes) and (best is None or surv[u] < best):
            best, worst = int(surv[u]), (i, u)
    if best is None:
        best = code.weight
    return CodeReport(best >= tau, tau, best, *worst)


def union_bound_ok(code: CodeFamily) -> bool:
    return code.degenerate or (code.t // code.d) * code.bound <= code.eps * code.weight
