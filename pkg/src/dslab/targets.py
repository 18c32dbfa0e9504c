"""Approximating functions and the arc families E_q built from them."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from . import psiexpr
from .numtheory import ResidueSet, enumerate_Iq, omega, phi_qb
from .unitcircle import CircleSet, union_measure_int

ZERO = Fraction(0)


@dataclass
class ApproxFn:
    """A finitely supported psi: q -> non-negative rational."""

    values: dict[int, Fraction]
    provenance: str = ""

    def __post_init__(self):
        clean = {}
        for q, v in self.values.items():
            q, v = int(q), Fraction(v)
            if q < 1:
                raise ValueError(f"psi is defined on positive integers, got q={q}")
            if v < 0:
                raise ValueError(f"psi({q}) = {v} is negative")
            if v:
                clean[q] = v
        self.values = dict(sorted(clean.items()))

    def __call__(self, q: int) -> Fraction:
        return self.values.get(int(q), ZERO)

    @property
    def support(self) -> list[int]:
        return list(self.values)

    @property
    def horizon(self) -> int:
        return max(self.values, default=0)

    def items(self):
        return self.values.items()

    @classmethod
    def from_rule(cls, rule, qmax: int, qmin: int = 1, provenance: str | None = None) -> "ApproxFn":
        f = psiexpr.as_callable(rule)
        prov = provenance if provenance is not None else (rule if isinstance(rule, str) else "rule")
        return cls({q: f(q) for q in range(qmin, qmax + 1)}, f"{prov} for {qmin}<=q<={qmax}")

    @classmethod
    def from_csv(cls, path) -> "ApproxFn":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if rows and set(rows[0]) != {"q", "psi_num", "psi_den"}:
            raise ValueError("psi table needs the header q,psi_num,psi_den")
        return cls({int(r["q"]): Fraction(int(r["psi_num"]), int(r["psi_den"])) for r in rows},
                   f"table {path}")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["q", "psi_num", "psi_den"])
            for q, v in self.values.items():
                w.writerow([q, v.numerator, v.denominator])


@dataclass(frozen=True)
class InhomShift:
    """gamma, either a rational or a truncated continued fraction with an error bound."""

    value: Fraction
    depth: int | None = None
    error_bound: Fraction = ZERO

    @classmethod
    def from_cf(cls, cf, depth: int | None = None) -> "InhomShift":
        from .contfrac import approx_error_upper
        k = len(cf.a) - 1 if depth is None else depth
        val = cf.truncate(k).value()
        err = approx_error_upper(cf, k) if k + 1 < len(cf.a) else ZERO
        return cls(val, k, err)


def _gamma(g) -> Fraction:
    if isinstance(g, InhomShift):
        return g.value
    if isinstance(g, float):
        raise TypeError("gamma must be rational")
    return Fraction(g)


def _radius(psi, q: int) -> Fraction:
    if callable(psi):
        return Fraction(psi(q))
    return Fraction(psi)


def _arcs(q: int, gamma, psi, residues: Iterable[int]) -> CircleSet:
    g = _gamma(gamma)
    r = _radius(psi, q) / q
    return CircleSet.from_arcs(((a + g) / q, r) for a in residues)


def build_Eq(q: int, gamma, psi) -> CircleSet:
    return _arcs(q, gamma, psi, range(q))


def build_Eq_prime(q: int, gamma, psi) -> CircleSet:
    return _arcs(q, gamma, psi, (a for a in range(q) if math.gcd(a, q) == 1))


def build_Eq_I(q: int, gamma, psi, I: Iterable[int]) -> CircleSet:
    return _arcs(q, gamma, psi, I)


def star_centres(q: int, A: int, B: int) -> list[int]:
    """Numerators a of the centres a/(Bq): a in Z_{Bq}^*, a = A (mod B)."""
    A0 = A % B
    return [a for a in range(1, B * q + 1) if a % B == A0 and math.gcd(a, B * q) == 1]


def build_Eq_star(q: int, A: int, B: int, psi) -> CircleSet:
    if math.gcd(A, B) != 1:
        raise ValueError(f"A={A} and B={B} are not coprime")
    r = _radius(psi, q) / q
    return CircleSet.from_arcs((Fraction(a, B * q), r) for a in star_centres(q, A, B))


@dataclass(frozen=True)
class TargetFamily:
    """q -> E_q for one choice of residue rule.

    kind is 'all' (every a), 'coprime' ((a, q) = 1), 'residue'
    ((A + aB, q) = 1) or 'star' (centres a/(Bq)).
    """

    kind: str
    psi: Callable[[int], Fraction]
    gamma: Fraction = ZERO
    A: int = 0
    B: int = 1

    def __post_init__(self):
        if self.kind not in ("all", "coprime", "residue", "star"):
            raise ValueError(f"unknown target kind {self.kind!r}")
        if math.gcd(self.A, self.B) != 1:
            raise ValueError(f"A={self.A} and B={self.B} are not coprime")
        object.__setattr__(self, "gamma", _gamma(self.gamma))

    def residues(self, q: int) -> list[int]:
        if self.kind == "all":
            return list(range(q))
        if self.kind == "coprime":
            return [a for a in range(q) if math.gcd(a, q) == 1]
        if self.kind == "residue":
            return list(enumerate_Iq(q, self.A, self.B))
        return star_centres(q, self.A, self.B)

    def __call__(self, q: int) -> CircleSet:
        if self.kind == "star":
            return build_Eq_star(q, self.A, self.B, self.psi)
        return build_Eq_I(q, self.gamma, self.psi, self.residues(q))

    def arcs_int(self, q: int):
        """Arcs of E_q as integer arrays (lo, hi, den) over a common denominator."""
        psi = _radius(self.psi, q)
        a = np.array(self.residues(q), dtype=object)
        if self.kind == "star":
            # centre a/(Bq), radius psi/q  ->  (a*pd -+ B*pn) / (B q pd)
            pn, pd = psi.numerator, psi.denominator
            den = self.B * q * pd
            lo, hi = a * pd - self.B * pn, a * pd + self.B * pn
        else:
            g = self.gamma
            pn, pd = psi.numerator, psi.denominator
            gn, gd = g.numerator, g.denominator
            den = q * gd * pd
            lo, hi = a * gd * pd + gn * pd - pn * gd, a * gd * pd + gn * pd + pn * gd
        n = len(a)
        return lo, hi, np.full(n, den, dtype=object)


def tail_union_measure(family, m: int, Q: int) -> Fraction:
    """Exact measure of the union of E_q over m <= q <= Q."""
    if m > Q:
        return ZERO
    if isinstance(family, TargetFamily):
        los, his, dens = [], [], []
        for q in range(m, Q + 1):
            lo, hi, den = family.arcs_int(q)
            if len(lo) == 0 or hi[0] == lo[0]:
                continue
            if int(den[0]) >= 2**32 or int(hi[0] - lo[0]) >= int(den[0]):
                break
            los.append(lo), his.append(hi), dens.append(den)
        else:
            if not los:
                return ZERO
            return union_measure_int(np.concatenate(los).astype(np.int64),
                                     np.concatenate(his).astype(np.int64),
                                     np.concatenate(dens).astype(np.int64))
    from .unitcircle import union_all
    return union_all(family(q) for q in range(m, Q + 1)).measure()


@dataclass(frozen=True)
class LargePsiParts:
    main: Fraction
    T: Fraction
    exact: Fraction
    set_measure: Fraction


def large_psi_measure_parts(q: int, A: int, B: int, psi, gamma=None) -> LargePsiParts:
    """Measure of E_q^I as 2 psi phi(q,B)/q minus the overlap correction T/q.

    T sums 2 psi - gap over the cyclic gaps of I_q that are at most 2 psi.
    The set itself is built too, and its measure is returned for comparison.
    """
    psi = _radius(psi, q)
    I = enumerate_Iq(q, A, B)
    els = sorted(I)
    gaps = [b - a for a, b in zip(els, els[1:])]
    if els:
        gaps.append(els[0] + q - els[-1])
    two = 2 * psi
    T = sum((two - g for g in gaps if g <= two), ZERO)
    main = two * phi_qb(q, B) / q
    g = Fraction(A, B) if gamma is None else gamma
    return LargePsiParts(main, T, main - T / q, build_Eq_I(q, g, psi, els).measure())


def discrepancy_Iq(q: int, I, grid: int) -> tuple[Fraction, int]:
    """max over y = j/grid of |#{a in I : a/q < y} - y |I||, and the bound 4 * 2**omega(q)."""
    els = sorted(I.elements if isinstance(I, ResidueSet) else I)
    arr = np.array(els, dtype=np.int64)
    size = len(els)
    worst = ZERO
    for j in range(grid + 1):
        y = Fraction(j, grid)
        # a/q < j/grid  <=>  a*grid < j*q
        cnt = int(np.searchsorted(arr * grid, j * q, side="left"))
        worst = max(worst, abs(cnt - y * size))
    return worst, 4 * 2 ** omega(q)
