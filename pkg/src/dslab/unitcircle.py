"""Finite unions of closed arcs on R/Z with exact rational endpoints.

Sets are kept modulo null sets: zero-length pieces are dropped and arcs that
touch are merged.  An arc through 0 is stored as [0, b] and [a, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels

ZERO = Fraction(0)
ONE = Fraction(1)
PREIMAGE_BUDGET = 2**20


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an int, Fraction or 'p/q' string")
    return Fraction(x)


def _normalize(pieces: Iterable[tuple[Fraction, Fraction]]) -> tuple[tuple[Fraction, Fraction], ...]:
    ps = sorted((lo, hi) for lo, hi in pieces if hi > lo)
    out: list[list[Fraction]] = []
    for lo, hi in ps:
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1][1] = hi
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


def _split(lo: Fraction, hi: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Reduce the real interval [lo, hi] (length < 1) into pieces of [0, 1]."""
    k = lo.__floor__()
    lo, hi = lo - k, hi - k
    if hi <= ONE:
        return [(lo, hi)]
    return [(lo, ONE), (ZERO, hi - 1)]


@dataclass(frozen=True)
class CircleSet:
    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def empty(cls) -> "CircleSet":
        return cls(())

    @classmethod
    def full(cls) -> "CircleSet":
        return cls(((ZERO, ONE),))

    @classmethod
    def from_intervals(cls, pieces: Iterable[tuple]) -> "CircleSet":
        """Build from intervals given as real (lo, hi) pairs; each is reduced mod 1."""
        out = []
        for lo, hi in pieces:
            lo, hi = _frac(lo), _frac(hi)
            if hi < lo:
                raise ValueError(f"interval with hi < lo: [{lo}, {hi}]")
            if hi - lo >= 1:
                return cls.full()
            out.extend(_split(lo, hi))
        return cls(_normalize(out))

    @classmethod
    def from_arcs(cls, arcs: Iterable[tuple]) -> "CircleSet":
        """Union of closed arcs given as (centre, radius)."""
        out = []
        for c, r in arcs:
            c, r = _frac(c), _frac(r)
            if r < 0:
                raise ValueError(f"negative radius {r}")
            if r == 0:
                continue
            if 2 * r >= 1:
                return cls.full()
            out.extend(_split(c - r, c + r))
        return cls(_normalize(out))

    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.intervals), ZERO)

    def is_empty(self) -> bool:
        return not self.intervals

    def union(self, other: "CircleSet") -> "CircleSet":
        return CircleSet(_normalize(self.intervals + other.intervals))

    def intersect(self, other: "CircleSet") -> "CircleSet":
        a, b = self.intervals, other.intervals
        i = j = 0
        out = []
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if hi > lo:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return CircleSet(_normalize(out))

    def complement(self) -> "CircleSet":
        out = []
        prev = ZERO
        for lo, hi in self.intervals:
            out.append((prev, lo))
            prev = hi
        out.append((prev, ONE))
        return CircleSet(_normalize(out))

    def difference(self, other: "CircleSet") -> "CircleSet":
        return self.intersect(other.complement())

    def translate(self, t) -> "CircleSet":
        t = _frac(t)
        if self.intervals == ((ZERO, ONE),):
            return self
        out = []
        for lo, hi in self.intervals:
            out.extend(_split(lo + t, hi + t))
        return CircleSet(_normalize(out))

    def preimage_mul(self, b: int, budget: int = PREIMAGE_BUDGET) -> "CircleSet":
        """{x : b x mod 1 in self} = union over j < b of (self + j) / b."""
        b = int(b)
        if b < 1:
            raise ValueError("multiplier must be a positive integer")
        if b * len(self.intervals) > budget:
            raise ValueError(f"preimage needs {b * len(self.intervals)} pieces, budget is {budget}")
        out = [((lo + j) / b, (hi + j) / b) for j in range(b) for lo, hi in self.intervals]
        return CircleSet(_normalize(out))

    def contains(self, x) -> bool:
        x = _frac(x) % 1
        return any(lo <= x <= hi for lo, hi in self.intervals) or (
            x == 0 and bool(self.intervals) and self.intervals[-1][1] == ONE)

    def components(self) -> int:
        """Number of arcs, counting a piece through 0 once."""
        k = len(self.intervals)
        if k >= 2 and self.intervals[0][0] == ZERO and self.intervals[-1][1] == ONE:
            return k - 1
        return k

    def __or__(self, other):
        return self.union(other)

    def __and__(self, other):
        return self.intersect(other)

    def __len__(self) -> int:
        return len(self.intervals)

    def __str__(self) -> str:
        if not self.intervals:
            return "{}"
        return " U ".join(f"[{lo}, {hi}]" for lo, hi in self.intervals)


def union_all(sets: Iterable[CircleSet]) -> CircleSet:
    pieces: list = []
    for s in sets:
        pieces.extend(s.intervals)
    return CircleSet(_normalize(pieces))


def _split_int(lo: np.ndarray, hi: np.ndarray, den: np.ndarray):
    """Integer-endpoint version of _split for arcs lo/den .. hi/den."""
    k = np.floor_divide(lo, den)
    lo = lo - k * den
    hi = hi - k * den
    wrap = hi > den
    lo_out = np.concatenate([lo, np.zeros(int(wrap.sum()), np.int64)])
    hi_out = np.concatenate([np.where(wrap, den, hi), hi[wrap] - den[wrap]])
    den_out = np.concatenate([den, den[wrap]])
    return lo_out, hi_out, den_out


def _exact_sum(num: np.ndarray, den: np.ndarray) -> Fraction:
    if num.size == 0:
        return ZERO
    uden, inv = np.unique(den, return_inverse=True)
    acc = np.zeros(uden.size, dtype=object)
    np.add.at(acc, inv, num.astype(object))
    L = math.lcm(*(int(d) for d in uden))
    return Fraction(sum(int(a) * (L // int(d)) for a, d in zip(acc, uden)), L)


def union_measure_int(lo: Sequence[int], hi: Sequence[int], den: Sequence[int]) -> Fraction:
    """Exact measure of the union of arcs [lo_i/den_i, hi_i/den_i] (mod 1).

    All denominators must be below 2**32.  Uses the compiled sweep, so it
    handles millions of arcs where ``union_all`` would be too slow.
    """
    lo = np.asarray(lo, np.int64)
    hi = np.asarray(hi, np.int64)
    den = np.asarray(den, np.int64)
    if lo.size == 0:
        return ZERO
    if (den <= 0).any() or (den >= 2**32).any():
        raise ValueError("denominators must lie in [1, 2**32)")
    if (hi < lo).any():
        raise ValueError("arc with hi < lo")
    if ((hi - lo) >= den).any():
        return ONE
    keep = hi > lo
    lo, hi, den = _split_int(lo[keep], hi[keep], den[keep])
    first, last = kernels.arc_components(lo, hi, den)
    return _exact_sum(hi[last], den[last]) - _exact_sum(lo[first], den[first])
