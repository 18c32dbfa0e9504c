"""Borel-Cantelli checks on finite spaces and on the circle, and Monte Carlo hit counting."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import kernels, rng
from .exact import fsum_exact
from .numtheory import prime_factor_table
from .targets import tail_union_measure  # noqa: F401  (re-exported)
from .unitcircle import CircleSet, union_all

ZERO = Fraction(0)
FRAC_BITS = 60
PSI_INT_CAP = 2**40


# ---------------------------------------------------------------- finite spaces

@dataclass(frozen=True)
class FinSpace:
    """Atoms with positive rational weights and an eventually periodic event sequence.

    Event i (i >= 1) is preperiod[i-1] while i <= len(preperiod), then cycles
    through period.
    """

    weights: tuple[Fraction, ...]
    preperiod: tuple[frozenset, ...]
    period: tuple[frozenset, ...]

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        if any(x <= 0 for x in w) or sum(w) != 1:
            raise ValueError("atom weights must be positive and sum to 1")
        if not self.period:
            raise ValueError("period must contain at least one event")
        pre = tuple(frozenset(e) for e in self.preperiod)
        per = tuple(frozenset(e) for e in self.period)
        for e in pre + per:
            if any(not 0 <= a < len(w) for a in e):
                raise ValueError("event refers to an unknown atom")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    def event(self, i: int) -> frozenset:
        if i < 1:
            raise ValueError("events are indexed from 1")
        if i <= len(self.preperiod):
            return self.preperiod[i - 1]
        return self.period[(i - len(self.preperiod) - 1) % len(self.period)]

    def mu(self, atoms) -> Fraction:
        return sum((self.weights[a] for a in atoms), ZERO)


def finspace_limsup_measure(space: FinSpace) -> Fraction:
    """mu of the atoms lying in infinitely many events, i.e. in some periodic event."""
    return space.mu(frozenset().union(*space.period))


@dataclass
class DBCVerdict:
    status: str  # confirmed | counterexample | inconclusive
    limsup: Fraction
    witness_Q: list[int]
    detail: str = ""


def verify_dbc(space: FinSpace, C, horizon: int) -> DBCVerdict:
    """Check the divergence and quasi-independence hypotheses up to ``horizon``
    and compare mu(E_inf) with 1/C."""
    C = Fraction(C)
    lim = finspace_limsup_measure(space)
    if lim == 0:
        return DBCVerdict("inconclusive", lim, [], "sum of mu(E_i) converges (periodic part empty)")
    counts = [0] * len(space.weights)
    good = []
    for Q in range(1, horizon + 1):
        for a in space.event(Q):
            counts[a] += 1
        s1 = sum((w * c for w, c in zip(space.weights, counts)), ZERO)
        s2 = sum((w * c * c for w, c in zip(space.weights, counts)), ZERO)
        if s1 and s2 <= C * s1 * s1:
            good.append(Q)
    if not good:
        return DBCVerdict("inconclusive", lim, [], f"quasi-independence with C={C} fails for every Q <= {horizon}")
    if lim >= 1 / C:
        return DBCVerdict("confirmed", lim, good[-5:], f"mu(E_inf) = {lim} >= 1/C = {1 / C}")
    return DBCVerdict("counterexample", lim, good[-5:], f"mu(E_inf) = {lim} < 1/C = {1 / C}")


# ---------------------------------------------------------------- (M1) / (B1)

@dataclass
class ConditionReport:
    i0: int | None
    violations: list[int]


def _ops(seq):
    """(get, measure, intersect, union) for either a FinSpace or a callable i -> CircleSet."""
    if isinstance(seq, FinSpace):
        return (seq.event, seq.mu, lambda a, b: a & b, lambda xs: frozenset().union(*xs))
    return (seq, lambda e: e.measure(), lambda a, b: a.intersect(b), union_all)


def _scan(get, mu, inter, A, delta, probe) -> ConditionReport:
    lo, hi = probe
    delta = Fraction(delta)
    mA = mu(A)
    bad = [i for i in range(lo, hi + 1)
           if mu(inter(A, get(i))) > (1 + delta) * mA * mu(get(i))]
    if hi in bad:
        return ConditionReport(None, bad)
    return ConditionReport(max(bad) + 1 if bad else lo, bad)


def check_M1(seq, delta, q1: int, q2: int, probe: tuple[int, int]) -> ConditionReport:
    """mu(A & E_i) <= (1+delta) mu(A) mu(E_i) with A the union of E_q1..E_q2.

    i0 is the least probe index from which the inequality holds to the end
    of the probe range (None if it fails at the end).
    """
    if q1 >= q2:
        raise ValueError("need q1 < q2")
    get, mu, inter, union = _ops(seq)
    A = union([get(j) for j in range(q1, q2 + 1)])
    return _scan(get, mu, inter, A, delta, probe)


def check_B1(seq, ball: tuple, delta, probe: tuple[int, int]) -> ConditionReport:
    """As check_M1 with A the closed arc ball = (centre, radius)."""
    get, mu, inter, _ = _ops(seq)
    A = CircleSet.from_arcs([ball])
    return _scan(get, mu, inter, A, delta, probe)


# ---------------------------------------------------------------- Monte Carlo

MODES = {"all_a": 0, "coprime": 1, "residue": 2, "congruence": 3}


def _parse_mode(mode):
    """-> (code, A, B, r, t, s, u)."""
    if isinstance(mode, str):
        mode = (mode,)
    name, *args = mode
    if name == "all_a":
        return 0, 0, 1, 0, 1, 0, 1
    if name == "coprime":
        return 1, 0, 1, 0, 1, 0, 1
    if name == "residue":
        A, B = (int(x) for x in args)
        if B < 1 or math.gcd(A, B) != 1:
            raise ValueError("residue mode needs coprime A, B with B >= 1")
        return 2, A % B, B, 0, 1, 0, 1
    if name == "congruence":
        r, t, s, u = (int(x) for x in args)
        if t < 1 or u < 1:
            raise ValueError("congruence mode needs t, u >= 1")
        return 3, 0, 1, r, t, s, u
    raise ValueError(f"unknown mode {mode!r}")


def _fixed(v: Fraction) -> tuple[int, int, int]:
    """(integer part, floor, ceil) of v with the fraction scaled by 2**60."""
    vi = math.floor(v)
    f = (v - vi) * (1 << FRAC_BITS)
    return vi, math.floor(f), math.ceil(f)


@dataclass
class HitRecord:
    sample: int
    hits: list[tuple[int, int, bool]] = field(default_factory=list)  # (q, witness a, ambiguous)

    def count(self, upto: int | None = None, include_ambiguous: bool = False) -> int:
        return sum(1 for q, _, amb in self.hits
                   if (upto is None or q <= upto) and (include_ambiguous or not amb))

    def checkpoints(self, marks: Sequence[int]) -> list[int]:
        return [self.count(m) for m in marks]


@dataclass
class HitRun:
    records: list[HitRecord]
    raw: np.ndarray  # rows: sample, q, a, ambiguous, c_lo, c_hi, p_lo, p_hi
    params: dict

    def counts(self, include_ambiguous: bool = False) -> np.ndarray:
        return np.array([r.count(include_ambiguous=include_ambiguous) for r in self.records])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sample", "q", "a", "ambiguous"])
        for row in self.raw:
            w.writerow([int(row[0]) + self.params["first_sample"], int(row[1]), int(row[2]), int(row[3])])
        return buf.getvalue()

    def summary(self, threshold: int = 10) -> dict:
        c = self.counts()
        qs = [0, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 1]
        return {
            "rng": rng.ALGORITHM,
            "params": self.params,
            "samples": len(self.records),
            "quantiles": {str(p): float(np.quantile(c, p)) for p in qs} if c.size else {},
            "threshold": threshold,
            "fraction_at_least_threshold": float((c >= threshold).mean()) if c.size else 0.0,
            "ambiguous_hits": int(self.raw[:, 3].sum()) if self.raw.size else 0,
        }


def _point_rows(seed: int, samples: int, P: int, start: int) -> tuple[np.ndarray, np.ndarray]:
    if P < 1:
        raise ValueError("precision P must be positive")
    W = rng.point_words(seed, samples, max(2, -(-P // 64)), start)
    W1, W2 = W[:, 0].copy(), W[:, 1].copy()
    # keep exactly P bits
    if P < 64:
        W1 &= np.uint64(((1 << P) - 1) << (64 - P))
        W2[:] = 0
    elif P < 128:
        W2 &= np.uint64((((1 << (P - 64)) - 1) << (128 - P)) & (2**64 - 1))
    return W1, W2


def montecarlo_hits(gamma, psi: Callable[[int], Fraction], mode, Q: int, samples: int, seed: int,
                    P: int = 256, start: int = 0, support: Sequence[int] | None = None) -> HitRun:
    """Count q <= Q with a witness a (under mode) and |qx - a - gamma| <= psi(q).

    x = X / 2**P is drawn from the counter-based stream for samples
    start..start+samples-1.  Decisions use the top 128 bits of x with a
    certified error band; anything the band cannot settle is reported as
    ambiguous instead of being counted.
    """
    if Q < 1 or samples < 1:
        raise ValueError("Q and samples must be positive")
    from .targets import _gamma
    g = _gamma(gamma)
    code, A, B, cr, ct, cs, cu = _parse_mode(mode)
    qs, pint, plo, phi = [], [], [], []
    for q in (support if support is not None else range(1, Q + 1)):
        if q > Q:
            continue
        v = Fraction(psi(q))
        if v <= 0:
            continue
        vi, lo, hi = _fixed(v)
        qs.append(q)
        pint.append(min(vi, PSI_INT_CAP))
        plo.append(lo)
        phi.append(hi)
    gi, glo, ghi = _fixed(g)
    if abs(gi) > 2**40:
        raise ValueError("gamma is too large; reduce it modulo 1")
    W1, W2 = _point_rows(seed, samples, P, start)
    ptr, val = prime_factor_table(max(Q, 1))
    raw = kernels.mc_hits(W1, W2, np.array(qs, np.int64), np.array(pint, np.int64),
                          np.array(plo, np.int64), np.array(phi, np.int64),
                          gi, glo, ghi, code, A, B, cr, ct, cu, cs, ptr, val)
    records = [HitRecord(start + s) for s in range(samples)]
    for row in raw:
        records[int(row[0])].hits.append((int(row[1]), int(row[2]), bool(row[3])))
    params = {"gamma": f"{g.numerator}/{g.denominator}", "mode": list(mode) if not isinstance(mode, str) else mode,
              "Q": Q, "samples": samples, "seed": seed, "P": P, "first_sample": start}
    return HitRun(records, raw, params)


def exact_hits(x: Fraction, gamma, psi, mode, Q: int) -> list[tuple[int, int]]:
    """Brute-force oracle: all (q, smallest witness a) for the exact point x."""
    from .targets import _gamma
    g = _gamma(gamma)
    code, A, B, cr, ct, cs, cu = _parse_mode(mode)
    out = []
    for q in range(1, Q + 1):
        v = Fraction(psi(q))
        if v <= 0 or (code == 3 and (q - cs) % cu):
            continue
        y = q * x - g
        lo, hi = math.ceil(y - v), math.floor(y + v)
        for a in range(lo, min(hi, lo + q * ct) + 1):
            if code == 0:
                ok = True
            elif code == 1:
                ok = math.gcd(a, q) == 1
            elif code == 2:
                ok = math.gcd(A + a * B, q) == 1
            else:
                ok = (a - cr) % ct == 0 and math.gcd(math.gcd(q, cr), ct) % math.gcd(a, q) == 0
            if ok:
                out.append((q, a))
                break
    return out


@dataclass
class DichotomyReport:
    C: Fraction
    counts: np.ndarray
    counts_scaled: np.ndarray
    fraction_first_exceeds: float
    containment_violations: int
    checked_hits: int


def dichotomy_probe(gamma, gamma2, psi, delta, Q: int, samples: int, seed: int,
                    P: int = 256, mode="all_a") -> DichotomyReport:
    """Compare hits for (gamma, psi) with hits for (gamma2, C psi), C = |gamma - gamma2|/delta + 1.

    Every certain hit (q, a) of the first run must be a possible hit of the
    second run; violations are counted.
    """
    from .targets import _gamma
    g1, g2, delta = _gamma(gamma), _gamma(gamma2), Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    low = [q for q in range(1, Q + 1) if Fraction(psi(q)) and Fraction(psi(q)) < delta]
    if low:
        raise ValueError(f"psi falls below delta on its support, e.g. at q={low[0]}")
    C = abs(g1 - g2) / delta + 1
    run1 = montecarlo_hits(g1, psi, mode, Q, samples, seed, P)
    run2 = montecarlo_hits(g2, lambda q: C * Fraction(psi(q)), mode, Q, samples, seed, P)
    poss = {(int(r[0]), int(r[1])): (int(r[6]), int(r[7])) for r in run2.raw}
    viol = 0
    checked = 0
    for r in run1.raw:
        if r[3]:
            continue
        checked += 1
        key = (int(r[0]), int(r[1]))
        lo, hi = poss.get(key, (1, 0))
        a_lo, a_hi = (int(r[4]), int(r[5])) if mode == "all_a" else (int(r[2]), int(r[2]))
        if not (lo <= a_lo and a_hi <= hi):
            viol += 1
    c1, c2 = run1.counts(), run2.counts(include_ambiguous=True)
    return DichotomyReport(C, c1, c2, float((c1 > c2).mean()), viol, checked)


def hits_summary_json(run: HitRun, threshold: int = 10) -> str:
    return json.dumps(run.summary(threshold), indent=2, sort_keys=True)
