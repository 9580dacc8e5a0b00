"""Plain-text file formats for texts, patterns and relations.

Relation files start with ``rel <sigma_T> <sigma_P>`` followed by one ``a b``
pair per line; interval files start with ``ivl <sigma_T> <sigma_P>`` followed
by lines ``b lo1 hi1 lo2 hi2 ...`` of closed intervals.  Texts and patterns
are whitespace separated decimal codes.  Lines starting with ``#`` are
ignored.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import InputError, IntervalRelation, MatchRelation


def _lines(path) -> list[list[str]]:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    rows = [ln.split() for ln in raw.splitlines()]
    return [r for r in rows if r and not r[0].startswith("#")]


def _ints(tokens, path) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise InputError(f"{path}: expected integers, got {' '.join(tokens)!r}") from None


def read_symbols(path) -> np.ndarray:
    vals = _ints([t for row in _lines(path) for t in row], path)
    if not vals:
        raise InputError(f"{path}: empty sequence")
    arr = np.array(vals, dtype=np.int64)
    if arr.min() < 0:
        raise InputError(f"{path}: negative character code")
    return arr


def write_symbols(path, symbols) -> None:
    Path(path).write_text(" ".join(str(int(s)) for s in symbols) + "\n")


def read_relation(path) -> MatchRelation | IntervalRelation:
    rows = _lines(path)
    if not rows or rows[0][0] not in ("rel", "ivl") or len(rows[0]) != 3:
        raise InputError(f"{path}: header must be 'rel <sigma_T> <sigma_P>' or 'ivl <sigma_T> <sigma_P>'")
    kind = rows[0][0]
    sigma_t, sigma_p = _ints(rows[0][1:], path)
    if kind == "rel":
        pairs = []
        for row in rows[1:]:
            if len(row) != 2:
                raise InputError(f"{path}: relation lines hold exactly two codes")
            pairs.append(tuple(_ints(row, path)))
        return MatchRelation(sigma_t, sigma_p, pairs)
    ivl: dict[int, list] = {}
    for row in rows[1:]:
        vals = _ints(row, path)
        if len(vals) % 2 != 1:
            raise InputError(f"{path}: interval lines are 'b lo1 hi1 ...'")
        ivl.setdefault(vals[0], []).extend(zip(vals[1::2], vals[2::2]))
    return IntervalRelation(sigma_t, sigma_p, ivl)


def write_relation(path, rel: MatchRelation | IntervalRelation) -> None:
    if isinstance(rel, IntervalRelation):
        rows = [f"ivl {rel.sigma_t} {rel.sigma_p}"]
        for b in range(rel.sigma_p):
            ivs = rel.intervals(b)
            if ivs:
                rows.append(" ".join([str(b)] + [f"{lo} {hi}" for lo, hi in ivs]))
    else:
        rows = [f"rel {rel.sigma_t} {rel.sigma_p}"] + [f"{a} {b}" for a, b in rel.pairs()]
    Path(path).write_text("\n".join(rows) + "\n")
