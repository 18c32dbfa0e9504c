"""Continued fractions, convergents and the forced-convergent construction of gamma.

Indexing is the usual one: gamma = [a_0; a_1, a_2, ...], p_0/q_0 = a_0/1 and
p_k = a_k p_{k-1} + p_{k-2}.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import sympy

from .numtheory import euler_phi


class HorizonError(RuntimeError):
    """A window threshold could not be reached inside the support of psi."""


@dataclass(frozen=True)
class CFExpansion:
    a: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        if not a:
            raise ValueError("empty continued fraction")
        if any(x < 1 for x in a[1:]):
            raise ValueError("partial quotients after a_0 must be positive")
        object.__setattr__(self, "a", a)

    def convergents(self) -> list[tuple[int, int]]:
        """(p_k, q_k) for k = 0..len(a)-1."""
        out = []
        p0, q0, p1, q1 = 0, 1, 1, 0
        for ak in self.a:
            p0, q0, p1, q1 = p1, q1, ak * p1 + p0, ak * q1 + q0
            out.append((p1, q1))
        return out

    def q(self, k: int) -> int:
        if k == -1:
            return 0
        return self.convergents()[k][1]

    def value(self) -> Fraction:
        p, q = self.convergents()[-1]
        return Fraction(p, q)

    def truncate(self, k: int) -> "CFExpansion":
        return CFExpansion(self.a[: k + 1])

    def __str__(self) -> str:
        head, tail = self.a[0], self.a[1:]
        return f"[{head}; {', '.join(map(str, tail))}]" if tail else f"[{head}]"


def convergents(cf: CFExpansion) -> list[Fraction]:
    return [Fraction(p, q) for p, q in cf.convergents()]


def cf_of_rational(num: int, den: int) -> CFExpansion:
    if den == 0:
        raise ValueError("zero denominator")
    if den < 0:
        num, den = -num, -den
    a = []
    while den:
        t = num // den
        a.append(t)
        num, den = den, num - t * den
    return CFExpansion(tuple(a))


def approx_error_upper(cf: CFExpansion, k: int) -> Fraction:
    """1/(q_k q_{k+1}), an upper bound for |gamma - p_k/q_k|."""
    if not 0 <= k < len(cf.a) - 1:
        raise ValueError(f"need 0 <= k < {len(cf.a) - 1}, got {k}")
    conv = cf.convergents()
    return Fraction(1, conv[k][1] * conv[k + 1][1])


def _log_ratio_floor8(a: int, q: int) -> Fraction:
    """Largest j/8 with a**8 >= q**j, a certified lower bound for log a / log q."""
    if a <= 1:
        return Fraction(0)
    j = max(0, int(8 * math.log(a) / math.log(q)) - 2)
    a8 = a**8
    while q ** (j + 1) <= a8:
        j += 1
    while j > 0 and q**j > a8:
        j -= 1
    return Fraction(j, 8)


def liouville_margin(cf: CFExpansion, K: int) -> Fraction:
    """max over 1 <= k <= K of a lower bound for log a_{k+1} / log q_k.

    Indices with q_k = 1 are skipped.  The bound is exact to within 1/8.
    """
    conv = cf.convergents()
    best = Fraction(0)
    for k in range(0, min(K, len(cf.a) - 2) + 1):
        qk = conv[k][1]
        if qk < 2:
            continue
        best = max(best, _log_ratio_floor8(cf.a[k + 1], qk))
    return best


@dataclass
class CertStep:
    i: int
    k: int
    window: tuple[int, int]
    sum: Fraction
    bound: Fraction
    a_k: int
    q_k: int

    def to_json(self) -> dict:
        return {"i": self.i, "k": self.k, "window": list(self.window),
                "sum": f"{self.sum.numerator}/{self.sum.denominator}",
                "bound": f"{self.bound.numerator}/{self.bound.denominator}",
                "a_k": str(self.a_k), "q_k": str(self.q_k)}

    @classmethod
    def from_json(cls, d: dict) -> "CertStep":
        return cls(int(d["i"]), int(d["k"]), (int(d["window"][0]), int(d["window"][1])),
                   Fraction(d["sum"]), Fraction(d["bound"]), int(d["a_k"]), int(d["q_k"]))


@dataclass
class GammaCertificate:
    kind: str  # "psi" or "f"
    quotients: tuple[int, ...]
    fixed: dict[int, int]
    prime_denominators: bool
    steps: list[CertStep] = field(default_factory=list)
    source: dict = field(default_factory=dict)

    def cf(self) -> CFExpansion:
        return CFExpansion(self.quotients)

    def to_json(self) -> str:
        return json.dumps({
            "kind": self.kind,
            "quotients": [str(x) for x in self.quotients],
            "fixed": {str(k): str(v) for k, v in sorted(self.fixed.items())},
            "prime_denominators": self.prime_denominators,
            "source": self.source,
            "steps": [s.to_json() for s in self.steps],
        }, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GammaCertificate":
        d = json.loads(text)
        return cls(d["kind"], tuple(int(x) for x in d["quotients"]),
                   {int(k): int(v) for k, v in d.get("fixed", {}).items()},
                   bool(d["prime_denominators"]),
                   [CertStep.from_json(s) for s in d["steps"]], d.get("source", {}))


def _free_indices(fixed: dict[int, int]):
    k = 1
    while True:
        if k not in fixed:
            yield k
        k += 1


def _choose_a(lower: int, q1: int, q2: int, prime: bool) -> int:
    a = max(lower, 1)
    if prime:
        while not sympy.isprime(a * q1 + q2):
            a += 1
    return a


def _extend(a: list[int], qs: list[int], upto: int, fixed: dict[int, int]) -> None:
    # qs[k + 1] holds q_k, qs[0] = q_{-1} = 0
    while len(a) < upto:
        k = len(a)
        ak = fixed[k]
        a.append(ak)
        qs.append(ak * qs[-1] + qs[-2])


def construct_gamma_for_psi(psi, steps: int, fixed: dict[int, int] | None = None,
                            prime_denominators: bool = False) -> tuple[CFExpansion, GammaCertificate]:
    """Pick partial quotients a_{k_i} so that each window mass beats q_{k_i - 1}**9.

    psi is an ApproxFn (finite support).  Window i is (Q_{i-1}, Q_i] with Q_i
    minimal such that sum psi(q) phi(q)/q over the window is at least
    q_{k_i-1}**9.  Then a_{k_i} is the least integer with a >= Q_i**2 and
    a >= q_{k_i-1}**i (and q_{k_i} prime if requested).
    """
    fixed = dict(fixed or {})
    if any(k < 1 for k in fixed):
        raise ValueError("fixed indices start at 1")
    support = [q for q in psi.support]
    a = [0]
    qs = [0, 1]
    free = _free_indices(fixed)
    cert = GammaCertificate("psi", (), fixed, prime_denominators,
                            source={"psi": {str(q): f"{v.numerator}/{v.denominator}" for q, v in psi.items()},
                                    "provenance": psi.provenance})
    Q_prev = 0
    pos = 0
    for i in range(1, steps + 1):
        k = next(free)
        _extend(a, qs, k, fixed)
        q_prev = qs[-1]
        target = Fraction(q_prev**9)
        total = Fraction(0)
        Q = Q_prev
        while total < target:
            if pos >= len(support):
                raise HorizonError(
                    f"step {i}: window sum {float(total):.6g} after q={Q} never reaches "
                    f"{q_prev}**9 within the support of psi (horizon {psi.horizon})")
            Q = support[pos]
            pos += 1
            total += psi(Q) * euler_phi(Q) / Q
        ak = _choose_a(max(Q * Q, q_prev**i), q_prev, qs[-2], prime_denominators)
        a.append(ak)
        qs.append(ak * q_prev + qs[-2])
        cert.steps.append(CertStep(i, k, (Q_prev + 1, Q), total, target, ak, qs[-1]))
        Q_prev = Q
    cert.quotients = tuple(a)
    return CFExpansion(tuple(a)), cert


def construct_gamma_for_f(f: dict[int, int], steps: int, fixed: dict[int, int] | None = None,
                          prime_denominators: bool = False) -> tuple[CFExpansion, GammaCertificate]:
    """Same idea with a monotone integer table f: a_{k_i} >= min{q : f(q) >= q_{k_i-1}**9}."""
    fixed = dict(fixed or {})
    keys = sorted(int(k) for k in f)
    vals = [int(f[k]) for k in keys]
    if any(v2 < v1 for v1, v2 in zip(vals, vals[1:])):
        raise ValueError("f must be non-decreasing")
    a = [0]
    qs = [0, 1]
    free = _free_indices(fixed)
    cert = GammaCertificate("f", (), fixed, prime_denominators,
                            source={"f": {str(k): str(v) for k, v in zip(keys, vals)}})
    for i in range(1, steps + 1):
        k = next(free)
        _extend(a, qs, k, fixed)
        q_prev = qs[-1]
        target = q_prev**9
        thr = next((q for q, v in zip(keys, vals) if v >= target), None)
        if thr is None:
            raise HorizonError(f"step {i}: f never reaches {q_prev}**9 within its table (max q={keys[-1] if keys else 0})")
        ak = _choose_a(max(thr, q_prev**i), q_prev, qs[-2], prime_denominators)
        a.append(ak)
        qs.append(ak * q_prev + qs[-2])
        cert.steps.append(CertStep(i, k, (thr, thr), Fraction(f[thr]), Fraction(target), ak, qs[-1]))
    cert.quotients = tuple(a)
    return CFExpansion(tuple(a)), cert


@dataclass
class VerifyReport:
    ok: bool
    failures: list[str]


def verify_certificate(cert: GammaCertificate, psi: Callable[[int], Fraction] | None = None) -> VerifyReport:
    """Recompute every recorded quantity from scratch and list any mismatch."""
    fail: list[str] = []
    a = list(cert.quotients)
    try:
        conv = CFExpansion(tuple(a)).convergents()
    except ValueError as e:
        return VerifyReport(False, [str(e)])
    qk = {-1: 0, **{k: q for k, (_, q) in enumerate(conv)}}
    for k, v in cert.fixed.items():
        if k >= len(a) or a[k] != v:
            fail.append(f"fixed quotient a_{k}={v} not honoured")
    free = _free_indices(cert.fixed)
    if cert.kind == "psi":
        if psi is None:
            table = cert.source.get("psi", {})
            vals = {int(q): Fraction(v) for q, v in table.items()}
            psi = lambda q: vals.get(q, Fraction(0))  # noqa: E731
    elif cert.kind == "f":
        ftab = {int(k): int(v) for k, v in cert.source.get("f", {}).items()}
    prev_hi = 0
    for s in cert.steps:
        k = next(free)
        tag = f"step {s.i}"
        if s.k != k:
            fail.append(f"{tag}: index {s.k} but the next free index is {k}")
            continue
        if k >= len(a):
            fail.append(f"{tag}: quotient a_{k} missing")
            continue
        q_prev = qk[k - 1]
        if s.a_k != a[k] or s.q_k != qk[k]:
            fail.append(f"{tag}: recorded a_k/q_k disagree with the expansion")
        if s.bound != q_prev**9:
            fail.append(f"{tag}: bound {s.bound} != q_(k-1)**9 = {q_prev**9}")
        if a[k] < q_prev**s.i:
            fail.append(f"{tag}: a_k < q_(k-1)**{s.i}")
        if cert.prime_denominators and not sympy.isprime(qk[k]):
            fail.append(f"{tag}: q_k is not prime")
        lo, hi = s.window
        if cert.kind == "psi":
            if lo != prev_hi + 1:
                fail.append(f"{tag}: window starts at {lo}, expected {prev_hi + 1}")
            total = Fraction(0)
            last = Fraction(0)
            for q in range(lo, hi + 1):
                v = Fraction(psi(q))
                if v:
                    last = total
                    total += v * euler_phi(q) / q
            if total != s.sum:
                fail.append(f"{tag}: window sum {total} != recorded {s.sum}")
            if total < s.bound:
                fail.append(f"{tag}: window sum below bound")
            if Fraction(psi(hi)) == 0 or last >= s.bound:
                fail.append(f"{tag}: window end {hi} is not minimal")
            if a[k] < hi * hi:
                fail.append(f"{tag}: a_k < Q_i**2")
            prev_hi = hi
        else:
            if ftab.get(hi) is None or ftab[hi] < s.bound or Fraction(ftab[hi]) != s.sum:
                fail.append(f"{tag}: f({hi}) does not reach the bound")
            if any(q < hi and v >= s.bound for q, v in ftab.items()):
                fail.append(f"{tag}: threshold {hi} is not minimal")
            if a[k] < hi:
                fail.append(f"{tag}: a_k below the f-threshold")
    return VerifyReport(not fail, fail)
