"""Divergence sums, second moments and the window-reduction algorithm."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .contfrac import CFExpansion, approx_error_upper
from .exact import fsum_exact
from .numtheory import euler_phi, phi_qb
from .unitcircle import CircleSet

ZERO = Fraction(0)
MAX_WINDOW = 4096


@dataclass(frozen=True)
class IndexWindow:
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(int(m) for m in self.members))))

    @property
    def min(self) -> int | None:
        return self.members[0] if self.members else None

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


def _members(S) -> tuple[int, ...]:
    return S.members if isinstance(S, IndexWindow) else IndexWindow(tuple(S)).members


def _weight(weight) -> Callable[[int], Fraction]:
    if weight in ("unit", None):
        return lambda q: Fraction(1)
    if weight == "phi_over_q":
        return lambda q: Fraction(euler_phi(q), q)
    if isinstance(weight, tuple) and weight[0] == "I_over_q":
        _, A, B = weight
        return lambda q: Fraction(phi_qb(q, B), q)
    raise ValueError(f"unknown weight {weight!r}; use 'unit', 'phi_over_q' or ('I_over_q', A, B)")


def psi_sum(S, psi, weight="unit") -> Fraction:
    """Exact sum over S of psi(q) * w(q).

    ``('I_over_q', A, B)`` uses |I_q(A,B)|/q, which equals phi(q,B)/q.
    """
    w = _weight(weight)
    return fsum_exact(psi(q) * w(q) for q in _members(S) if psi(q))


def _frac_str(x: Fraction | None) -> str | None:
    return None if x is None else f"{x.numerator}/{x.denominator}"


@dataclass
class MomentReport:
    window: tuple[int, ...]
    psi_total: Fraction
    overlap_offdiag: Fraction
    overlap_full: Fraction
    C_prime: Fraction | None
    C_full: Fraction | None

    def to_dict(self) -> dict:
        return {"window": list(self.window), "psi_total": _frac_str(self.psi_total),
                "overlap_offdiag": _frac_str(self.overlap_offdiag),
                "overlap_full": _frac_str(self.overlap_full),
                "C_prime": _frac_str(self.C_prime), "C_full": _frac_str(self.C_full)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "decimal", "exact"])
        for name in ("psi_total", "overlap_offdiag", "overlap_full", "C_prime", "C_full"):
            v = getattr(self, name)
            w.writerow([name, "" if v is None else f"{float(v):.12g}", _frac_str(v) or ""])
        return buf.getvalue()


def overlap_moments(S, builder: Callable[[int], CircleSet], max_window: int = MAX_WINDOW) -> MomentReport:
    """Exact second moments of the sets builder(s), s in S.

    psi_total is the sum of the measures; C_prime and C_full divide the
    off-diagonal and full double sums by its square.
    """
    members = _members(S)
    if not members:
        raise ValueError("empty window")
    if len(members) > max_window:
        raise ValueError(f"window of {len(members)} indices exceeds the limit {max_window}")
    sets = [builder(s) for s in members]
    meas = [e.measure() for e in sets]
    off = fsum_exact(sets[i].intersect(sets[j]).measure()
                     for i in range(len(sets)) for j in range(i + 1, len(sets)))
    total = fsum_exact(meas)
    full = 2 * off + total
    sq = total * total
    return MomentReport(members, total, off, full, off / sq if sq else None, full / sq if sq else None)


def _pair(pm: Mapping, s: int, t: int) -> Fraction:
    if (s, t) in pm:
        return Fraction(pm[(s, t)])
    return Fraction(pm[(t, s)])


def quasi_independence_holds(S, measures: Mapping, pair_measures: Mapping, c_prime) -> bool:
    """Sum_{s<t} mu(E_s & E_t) <= C' (sum mu(E_s))**2 on S."""
    m = list(_members(S))
    off = fsum_exact(_pair(pair_measures, s, t) for i, s in enumerate(m) for t in m[i + 1:])
    tot = fsum_exact(Fraction(measures[s]) for s in m)
    return off <= Fraction(c_prime) * tot * tot


def reduction_step(S, measures: Mapping, pair_measures: Mapping, c_prime) -> int:
    """Smallest m in S whose removal keeps the quasi-independence inequality."""
    m = list(_members(S))
    if not m:
        raise ValueError("empty window")
    if not quasi_independence_holds(m, measures, pair_measures, c_prime):
        raise ValueError("the window does not satisfy the quasi-independence inequality")
    if len(m) <= 2:
        return m[0]
    c_prime = Fraction(c_prime)
    tot = fsum_exact(Fraction(measures[s]) for s in m)
    off = fsum_exact(_pair(pair_measures, s, t) for i, s in enumerate(m) for t in m[i + 1:])
    for x in m:
        row = fsum_exact(_pair(pair_measures, x, t) for t in m if t != x)
        rest = tot - Fraction(measures[x])
        if off - row <= c_prime * rest * rest:
            return x
    raise RuntimeError("no removable index found; this contradicts the reduction lemma")


@dataclass
class BandResult:
    window: IndexWindow
    total: Fraction
    eps_star: Fraction
    removed: list[int]


def reduce_to_band(S, measures: Mapping, pair_measures: Mapping, eps, c_prime, c=None) -> BandResult:
    """Drop indices with reduction_step until the mass lies in [eps*, eps].

    eps* = min(c, eps/2); c defaults to the starting mass of the window.
    Every term must be below eps*.
    """
    eps = Fraction(eps)
    m = list(_members(S))
    tot = fsum_exact(Fraction(measures[s]) for s in m)
    c = tot if c is None else Fraction(c)
    eps_star = min(c, eps / 2)
    if eps <= 0 or eps_star <= 0:
        raise ValueError("eps and c must be positive")
    big = [s for s in m if Fraction(measures[s]) >= eps_star]
    if big:
        raise ValueError(f"terms at indices {big[:5]} are not below eps* = {eps_star}")
    if tot < eps_star:
        raise ValueError(f"window mass {tot} is below eps* = {eps_star}")
    if not quasi_independence_holds(m, measures, pair_measures, c_prime):
        raise ValueError("the window does not satisfy the quasi-independence inequality")
    removed = []
    while tot > eps:
        x = reduction_step(m, measures, pair_measures, c_prime)
        m.remove(x)
        removed.append(x)
        tot -= Fraction(measures[x])
    if not (eps_star <= tot <= eps) or not quasi_independence_holds(m, measures, pair_measures, c_prime):
        raise RuntimeError("band reduction failed its own revalidation")
    return BandResult(IndexWindow(tuple(m)), tot, eps_star, removed)


def ds_condition_ratio(Q: int, psi) -> tuple[Fraction, Fraction, Fraction | None]:
    """(sum psi, sum phi(q) psi(q)/q, their ratio) over q <= Q."""
    if Q < 1:
        raise ValueError("Q must be positive")
    from .numtheory import totients
    phi = totients(Q)
    vals = [(q, Fraction(psi(q))) for q in range(1, Q + 1)]
    s_psi = fsum_exact(v for _, v in vals if v)
    s_ds = fsum_exact(v * int(phi[q]) / q for q, v in vals if v)
    return s_psi, s_ds, (s_ds / s_psi if s_psi else None)


@dataclass
class WindowCheck:
    c1: bool
    c2: bool
    c3_term: Fraction


def check_general_DS_window(S, psi, cf: CFExpansion, k: int) -> WindowCheck:
    """Check the convergent-error and mass conditions for one window S_k.

    c1: 1/(q_k q_{k+1}) <= psi(q) on S (error 0 when k is the last index);
    c2: sum psi phi/q >= q_k**8;
    c3_term: max of psi(q) phi(q, q_k)/q over q in S with psi(q) >= 1/2.
    """
    conv = cf.convergents()
    if not 0 <= k < len(conv):
        raise ValueError(f"k={k} is outside the expansion")
    qk = conv[k][1]
    err = approx_error_upper(cf, k) if k + 1 < len(conv) else ZERO
    members = _members(S)
    c1 = all(err <= Fraction(psi(q)) for q in members)
    c2 = psi_sum(members, psi, "phi_over_q") >= qk**8
    half = Fraction(1, 2)
    c3 = max((Fraction(psi(q)) * phi_qb(q, qk) / q for q in members if Fraction(psi(q)) >= half),
             default=ZERO)
    return WindowCheck(c1, c2, c3)
