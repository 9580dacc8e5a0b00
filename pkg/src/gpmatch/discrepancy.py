"""Deterministic low-discrepancy colourings and the recursive partition built on them.

The colouring is the greedy potential method: elements are coloured one by
one, each time picking the sign that keeps

    G = sum_i (1+e)^p_i (1-e)^n_i + (1+e)^n_i (1-e)^p_i

smallest.  Leaf values live in a segment tree as fixed-point integers; leaves
that would fall below the precision floor keep a count of pending ``(1-e)``
factors and read as zero until a ``(1+e)`` factor revives them.  Every run
ends with an exact integer audit of ``G``; should it ever exceed ``3z`` the
run is repeated with a squared precision floor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import InputError

DELTA_BITS = 200
# Fractional bits kept beyond the floor, so values near it are not all noise.
GUARD_BITS = 56
MAX_DELTA_BITS = 6400


@dataclass
class SetSystem:
    """``z`` sets over the universe ``{0, ..., universe_size - 1}``."""

    universe_size: int
    sets: list
    k: int | None = None

    def __post_init__(self):
        if self.universe_size < 0:
            raise InputError("universe size must be non-negative")
        clean = []
        for s in self.sets:
            arr = np.unique(np.asarray(s, dtype=np.int64))
            if arr.size and (arr[0] < 0 or arr[-1] >= self.universe_size):
                raise InputError("set element outside the universe")
            clean.append(arr)
        if not clean:
            raise InputError("a set system needs at least one set")
        self.sets = clean
        biggest = max(len(s) for s in clean)
        if self.k is None:
            self.k = max(biggest, 1)
        elif biggest > self.k:
            raise InputError(f"set of size {biggest} exceeds k={self.k}")

    @property
    def z(self) -> int:
        return len(self.sets)

    def incidence(self) -> list[list[int]]:
        inc: list[list[int]] = [[] for _ in range(self.universe_size)]
        for i, s in enumerate(self.sets):
            for u in s.tolist():
                inc[u].append(i)
        return inc

    def restrict(self, elements: np.ndarray) -> "SetSystem":
        """Sets intersected with ``elements``, relabelled to ``0..len-1``."""
        elements = np.asarray(elements, dtype=np.int64)
        pos = np.full(self.universe_size, -1, dtype=np.int64)
        pos[elements] = np.arange(len(elements))
        sub = [pos[s][pos[s] >= 0] for s in self.sets]
        return SetSystem(len(elements), sub)

    # -- file format: header ``sys z k |U|`` then one set per line ----------------
    @classmethod
    def read(cls, path) -> "SetSystem":
        lines = [ln.split() for ln in Path(path).read_text().splitlines()]
        lines = [ln for ln in lines if ln and not ln[0].startswith("#")]
        if not lines or lines[0][0] != "sys" or len(lines[0]) != 4:
            raise InputError("set-system file must start with 'sys <z> <k> <|U|>'")
        try:
            z, k, u = (int(x) for x in lines[0][1:])
            sets = [[int(x) for x in ln] for ln in lines[1:]]
        except ValueError:
            raise InputError("set-system file holds non-integer tokens") from None
        sets += [[] for _ in range(z - len(sets))]
        if len(sets) != z:
            raise InputError(f"header declares {z} sets, file has {len(sets)}")
        return cls(u, sets, k)

    def write(self, path) -> None:
        rows = [f"sys {self.z} {self.k} {self.universe_size}"]
        rows += [" ".join(map(str, s.tolist())) for s in self.sets]
        Path(path).write_text("\n".join(rows) + "\n")


def random_set_system(z: int, k: int, universe_size: int, rng: np.random.Generator) -> SetSystem:
    """``z`` uniformly random ``k``-subsets of the universe."""
    sets = [rng.choice(universe_size, size=min(k, universe_size), replace=False) for _ in range(z)]
    return SetSystem(universe_size, sets, k)


@dataclass(frozen=True)
class EpsilonParams:
    eps: Fraction
    one_minus: Fraction
    alpha: float
    t1: int
    t2: int
    frac_bits: int

    @property
    def log_ratio(self) -> float:
        return math.log2((1 + self.eps) / self.one_minus)


def colourable(z: int, k: int) -> bool:
    """Whether ``k > log2(3z)``, i.e. whether colouring is needed at all."""
    return (1 << k) > 3 * z if k < 4096 else True


def compute_epsilon(z: int, k: int, frac_bits: int = DELTA_BITS + GUARD_BITS) -> EpsilonParams:
    """Step parameter of the potential and the constant it implies.

    The value is rounded down to ``frac_bits`` binary digits; all later
    guarantees are stated for the rounded value, which is what the colouring
    actually uses.
    """
    if z < 1 or k < 1:
        raise InputError("z and k must be positive")
    if not colourable(z, k):
        raise InputError(f"k={k} must exceed log2(3z) for z={z}")
    t1 = 0
    while (1 << t1) < 3 * z:
        t1 += 1
    alpha1 = Fraction(t1, k)
    # first t2 with alpha1 <= 2^-t2 < 2*alpha1
    t2 = 0
    while Fraction(1, 1 << t2) >= 2 * alpha1:
        t2 += 1
    # alpha3 = 16*sqrt(2)*2^(-t2/2) = sqrt(2^(9-t2)); A = floor(alpha3 * 2^F)
    F = frac_bits
    e2 = 9 - t2 + 2 * F
    A = math.isqrt(1 << e2)
    e_int = (A << F) // ((2 << F) + A)
    eps = Fraction(e_int, 1 << F)
    one_minus = 1 - eps
    ratio = math.log2((1 + eps) / one_minus)
    alpha = ratio / math.sqrt(math.log2(3 * z) / k)
    return EpsilonParams(eps, one_minus, alpha, t1, t2, F)


@dataclass
class Colouring:
    chi: np.ndarray
    plus: np.ndarray
    minus: np.ndarray
    params: EpsilonParams | None
    G: float
    G_audit: Fraction | None
    audit_ok: bool | None
    pending: np.ndarray
    delta_bits: int
    retries: int = 0

    @property
    def alpha(self) -> float:
        return self.params.alpha if self.params is not None else 1.0

    @property
    def discrepancies(self) -> np.ndarray:
        return self.plus - self.minus

    @property
    def max_discrepancy(self) -> int:
        return int(np.abs(self.discrepancies).max(initial=0))

    def bound(self, k: int, z: int) -> float:
        return self.alpha * math.sqrt(k * math.log2(3 * z))


def _greedy(sys: SetSystem, e_int: int, F: int, floor_int: int):
    one = 1 << F
    A = one + e_int
    B = one - e_int
    z = sys.z
    nleaves = 2 * z
    size = 1
    while size < nleaves:
        size *= 2
    tree = [0] * (2 * size)
    for j in range(nleaves):
        tree[size + j] = one
    for pos in range(size - 1, 0, -1):
        tree[pos] = tree[2 * pos] + tree[2 * pos + 1]
    val = [one] * nleaves
    pend = [0] * nleaves

    def up(s, r):
        s = (s * A) >> F
        while r:
            s2 = (s * B) >> F
            if s2 < floor_int:
                break
            s, r = s2, r - 1
        return s, r

    def down(s, r):
        if r:
            return s, r + 1
        s2 = (s * B) >> F
        if s2 < floor_int:
            return s, 1
        return s2, 0

    chi = np.ones(sys.universe_size, dtype=np.int8)
    for u, ids in enumerate(sys.incidence()):
        if not ids:
            continue
        d_plus = d_minus = 0
        cand = []
        for i in ids:
            j = 2 * i
            s1, r1, s2, r2 = val[j], pend[j], val[j + 1], pend[j + 1]
            old = (0 if r1 else s1) + (0 if r2 else s2)
            pa, pb = up(s1, r1), down(s2, r2)
            ma, mb = down(s1, r1), up(s2, r2)
            d_plus += (0 if pa[1] else pa[0]) + (0 if pb[1] else pb[0]) - old
            d_minus += (0 if ma[1] else ma[0]) + (0 if mb[1] else mb[0]) - old
            cand.append((pa, pb, ma, mb))
        take_plus = d_plus <= d_minus
        if not take_plus:
            chi[u] = -1
        for i, (pa, pb, ma, mb) in zip(ids, cand):
            a, b = (pa, pb) if take_plus else (ma, mb)
            j = 2 * i
            val[j], pend[j] = a
            val[j + 1], pend[j + 1] = b
            pos = size + j
            tree[pos] = 0 if a[1] else a[0]
            tree[pos + 1] = 0 if b[1] else b[0]
            pos >>= 1
            while pos:
                tree[pos] = tree[2 * pos] + tree[2 * pos + 1]
                pos >>= 1
    return chi, Fraction(tree[1], one), np.array(pend, dtype=np.int64)


def exact_objective(plus, minus, eps: Fraction) -> Fraction:
    """``G`` recomputed exactly from the per-set counts."""
    # 1 + eps and 1 - eps share eps's denominator
    den = eps.denominator
    an, bn = den + eps.numerator, den - eps.numerator
    pairs = list(zip(np.asarray(plus).tolist(), np.asarray(minus).tolist()))
    top = max((p + q for p, q in pairs), default=0)
    pa, pb = [1], [1]
    for _ in range(top):
        pa.append(pa[-1] * an)
        pb.append(pb[-1] * bn)
    total = 0
    for p, q in pairs:
        total += (pa[p] * pb[q] + pa[q] * pb[p]) * den ** (top - p - q)
    return Fraction(total, den ** top)


def _mul_up(x: tuple[int, int], y: tuple[int, int], bits: int) -> tuple[int, int]:
    """Product of ``m * 2^e`` pairs, mantissa rounded up to ``bits`` bits."""
    m = x[0] * y[0]
    e = x[1] + y[1]
    shift = m.bit_length() - bits
    if shift > 0:
        m = -((-m) >> shift)
        e += shift
    return m, e


def _pow_up(x: tuple[int, int], n: int, bits: int) -> tuple[int, int]:
    r = (1, 0)
    while n:
        if n & 1:
            r = _mul_up(r, x, bits)
        n >>= 1
        if n:
            x = _mul_up(x, x, bits)
    return r


def _as_fraction(v: tuple[int, int]) -> Fraction:
    m, e = v
    return Fraction(m << e) if e >= 0 else Fraction(m, 1 << -e)


def objective_upper(plus, minus, eps: Fraction, bits: int = 128) -> Fraction:
    """Rigorous upper bound on ``G``: every rounding goes upward."""
    A = (eps.denominator + eps.numerator, 0)
    B = (eps.denominator - eps.numerator, 0)
    scale = Fraction(1, eps.denominator)
    total = Fraction(0)
    for p, q in zip(np.asarray(plus).tolist(), np.asarray(minus).tolist()):
        t1 = _mul_up(_pow_up(A, p, bits), _pow_up(B, q, bits), bits)
        t2 = _mul_up(_pow_up(A, q, bits), _pow_up(B, p, bits), bits)
        total += (_as_fraction(t1) + _as_fraction(t2)) * scale ** (p + q)
    return total


def audit(plus, minus, eps: Fraction, z: int) -> tuple[bool, Fraction]:
    """Certify ``G <= 3z``: cheap rigorous bound first, exact sum if inconclusive."""
    up = objective_upper(plus, minus, eps)
    if up <= 3 * z:
        return True, up
    G = exact_objective(plus, minus, eps)
    return G <= 3 * z, G


def set_counts(sys: SetSystem, chi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    plus = np.array([int(np.sum(chi[s] > 0)) for s in sys.sets], dtype=np.int64)
    sizes = np.array([len(s) for s in sys.sets], dtype=np.int64)
    return plus, sizes - plus


def colour(sys: SetSystem, delta_bits: int = DELTA_BITS, check: bool = True) -> Colouring:
    """Colour the universe so every set has discrepancy <= alpha*sqrt(k log2 3z)."""
    z, k = sys.z, sys.k
    if not colourable(z, k):
        chi = np.ones(sys.universe_size, dtype=np.int8)
        plus, minus = set_counts(sys, chi)
        return Colouring(chi, plus, minus, None, float("nan"), None, None,
                         np.zeros(0, dtype=np.int64), 0)
    retries = 0
    while True:
        F = delta_bits + GUARD_BITS
        params = compute_epsilon(z, k, F)
        e_int = params.eps.numerator * ((1 << F) // params.eps.denominator)
        chi, G, pend = _greedy(sys, e_int, F, 1 << GUARD_BITS)
        plus, minus = set_counts(sys, chi)
        ok, G_audit = audit(plus, minus, params.eps, z) if check else (None, None)
        if ok is not False or delta_bits >= MAX_DELTA_BITS:
            break
        delta_bits *= 2
        retries += 1
    col = Colouring(chi, plus, minus, params, float(G), G_audit, ok, pend, delta_bits, retries)
    if col.max_discrepancy > col.bound(k, z):
        raise RuntimeError(f"discrepancy {col.max_discrepancy} exceeds bound {col.bound(k, z):.3f}")
    return col


# -- recursive partition ---------------------------------------------------------

def halving_process(x: int) -> list[int]:
    """Iterates of ``x <- floor(x (1/2 + 1/sqrt(x)))`` until ``x <= 4``."""
    seq = [int(x)]
    while seq[-1] > 4:
        v = seq[-1]
        r = math.isqrt(v)
        # floor(v/2 + sqrt(v)) computed exactly: v/2 + sqrt(v) = (v + 2 sqrt v)/2
        s = math.isqrt(4 * v)  # floor(2 sqrt v)
        seq.append((v + s) // 2 if r * r != v else (v + 2 * r) // 2)
    return seq


@dataclass
class PartitionFn:
    labels: np.ndarray
    label_space: int
    bound: int
    alpha: float
    threshold: float
    iterations: int
    converged: bool = True
    history: list = field(default_factory=list)

    def __call__(self, u: int) -> int:
        return int(self.labels[u])

    @property
    def parts(self) -> int:
        return int(len(np.unique(self.labels))) if len(self.labels) else 0


def max_intersection(sys: SetSystem, labels: np.ndarray) -> int:
    best = 0
    for s in sys.sets:
        if len(s):
            best = max(best, int(np.bincount(labels[s]).max()))
    return best


def build_partition(sys: SetSystem) -> PartitionFn:
    """Split the universe so that every part meets every set in few elements.

    Parts are halved by colouring until every ``|X_c & S_i|`` is at most
    ``4 alpha^2 log2(3z)``.  Labels are binary strings: a part labelled ``c``
    splits into ``2c`` (colour -1) and ``2c + 1`` (colour +1).
    """
    z, k = sys.z, sys.k
    alpha = compute_epsilon(z, k).alpha if colourable(z, k) else 1.0
    threshold = 4 * alpha * alpha * math.log2(3 * z)
    labels = np.zeros(sys.universe_size, dtype=np.int64)
    space, iterations = 1, 0
    B = max_intersection(sys, labels)
    history = [B]
    converged = True
    while B > threshold:
        new = labels * 2
        for c in np.unique(labels):
            members = np.flatnonzero(labels == c)
            col = colour(sys.restrict(members))
            new[members[col.chi > 0]] += 1
        B_new = max_intersection(sys, new)
        if B_new >= B:
            converged = False
            break
        labels, B = new, B_new
        space *= 2
        iterations += 1
        history.append(B)
    return PartitionFn(labels, space, B, alpha, threshold, iterations, converged, history)
