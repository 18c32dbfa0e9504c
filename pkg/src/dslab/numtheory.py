"""Arithmetic functions and the residue-counting quantities behind the overlap estimates."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from . import kernels

SIEVE_LIMIT = 10**6


@lru_cache(maxsize=8)
def spf_sieve(n: int) -> np.ndarray:
    """Smallest prime factor of every integer 0..n (spf[0] = 0, spf[1] = 1)."""
    spf = np.zeros(n + 1, np.int64)
    if n >= 1:
        spf[1] = 1
    for p in range(2, math.isqrt(n) + 1):
        if spf[p] == 0:
            block = spf[p * p::p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest[rest >= 2]] = rest[rest >= 2]
    return spf


@lru_cache(maxsize=8)
def primes_upto(n: int) -> np.ndarray:
    spf = spf_sieve(max(n, 1))
    idx = np.arange(spf.size)
    return idx[(spf == idx) & (idx >= 2)]


@lru_cache(maxsize=8)
def totients(n: int) -> np.ndarray:
    """phi(k) for k = 0..n."""
    phi = np.arange(n + 1, dtype=np.int64)
    for p in primes_upto(n):
        phi[p::p] -= phi[p::p] // p
    return phi


@lru_cache(maxsize=8)
def prime_factor_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct prime factors of 0..n in CSR form: primes of k are val[ptr[k]:ptr[k+1]]."""
    spf = spf_sieve(max(n, 1))
    lists = [[] for _ in range(n + 1)]
    for k in range(2, n + 1):
        m = k
        while m > 1:
            p = int(spf[m])
            lists[k].append(p)
            while m % p == 0:
                m //= p
    ptr = np.zeros(n + 2, np.int64)
    ptr[1:] = np.cumsum([len(x) for x in lists])
    val = np.array([p for x in lists for p in x], np.int64)
    return ptr, val


def factor(n: int, limit: int = SIEVE_LIMIT) -> dict[int, int]:
    """Prime factorisation by sieve lookup and trial division.

    Inputs above ``limit**2`` are refused because the leftover cofactor could
    not be certified prime.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"factor() needs a positive integer, got {n}")
    if n > limit * limit:
        raise ValueError(f"{n} exceeds the trial-division range {limit}**2")
    out: dict[int, int] = {}
    if n <= limit:
        spf = spf_sieve(limit)
        while n > 1:
            p = int(spf[n])
            out[p] = out.get(p, 0) + 1
            n //= p
        return out
    ps = primes_upto(min(limit, math.isqrt(n)))
    for p in ps[n % ps == 0]:
        p = int(p)
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_divisors(n: int) -> list[int]:
    return sorted(factor(n))


def euler_phi(n: int) -> int:
    r = n
    for p in factor(n):
        r = r // p * (p - 1)
    return r


def moebius(n: int) -> int:
    f = factor(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def tau(n: int) -> int:
    return math.prod(e + 1 for e in factor(n).values())


def omega(n: int) -> int:
    return len(factor(n))


def phi_qb(q: int, b: int) -> int:
    """phi(q) * prod_{p | (q,b)} (1 + 1/(p-1)), i.e. q * prod_{p | q, p !| b} (1 - 1/p)."""
    r = q
    for p in factor(q):
        if b % p:
            r = r // p * (p - 1)
    return r


@dataclass(frozen=True)
class ResidueSet:
    q: int
    A: int
    B: int
    elements: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, a) -> bool:
        return a % self.q in self._set

    @cached_property
    def _set(self):
        return frozenset(self.elements)


def _check_AB(A: int, B: int) -> None:
    if B < 1:
        raise ValueError("B must be positive")
    if math.gcd(A, B) != 1:
        raise ValueError(f"A={A} and B={B} are not coprime")


def enumerate_Iq(q: int, A: int, B: int) -> ResidueSet:
    """All a in Z_q with (A + aB, q) = 1, by direct gcd test."""
    _check_AB(A, B)
    if q < 1:
        raise ValueError("q must be positive")
    return ResidueSet(q, A, B, tuple(a for a in range(q) if math.gcd(A + a * B, q) == 1))


def F_hq(h: int, q: int, A: int, B: int) -> int:
    """#{a in Z_q : (A+aB, q) = (A+aB+hB, q) = 1}, counted directly."""
    _check_AB(A, B)
    return sum(1 for a in range(q)
               if math.gcd(A + a * B, q) == 1 and math.gcd(A + a * B + h * B, q) == 1)


def F_hq_formula(h: int, q: int, A: int, B: int) -> int:
    _check_AB(A, B)
    r = 1
    for p, k in factor(q).items():
        if B % p == 0:
            r *= p**k
        elif h % p == 0:
            r *= p ** (k - 1) * (p - 1)
        else:
            r *= p ** (k - 1) * (p - 2)
    return r


@dataclass(frozen=True)
class OverlapAnalysis:
    q: int
    r: int
    m: int
    l: int
    n: int
    gcd: int
    lcm: int


def mln_decompose(q: int, r: int) -> OverlapAnalysis:
    """Split qr = m * l**2 * n by comparing the exponents of each prime in q and r."""
    fq, fr = factor(q), factor(r)
    m = l = n = 1
    for p in set(fq) | set(fr):
        u, v = fq.get(p, 0), fr.get(p, 0)
        if u == v:
            l *= p**u
        else:
            m *= p ** min(u, v)
            n *= p ** max(u, v)
    g = math.gcd(q, r)
    return OverlapAnalysis(q, r, m, l, n, g, q // g * r)


def X_qr(q: int, r: int, psi_q, psi_r, B: int = 1) -> Fraction:
    psi_q, psi_r = Fraction(psi_q), Fraction(psi_r)
    return 2 * max(psi_q / q, psi_r / r) * B * math.lcm(q, r)


def L_t(q: int, r: int, t) -> Fraction:
    g = math.gcd(q, r)
    return sum((Fraction(1, p) for p in factor(q * r // (g * g)) if p >= t), Fraction(0))


def _pair_classes(q: int, A: int, B: int) -> list[int]:
    A0 = A % B
    return [a for a in range(1, B * q + 1) if a % B == A0 and math.gcd(a, B * q) == 1]


def H_c(c: int, q: int, r: int, A: int, B: int) -> int:
    """Number of pairs (a, b) with a/(Bq) - b/(Br) = c/(B lcm(q, r)).

    a runs over Z_{Bq}^* and b over Z_{Br}^*, both = A (mod B).  For each b
    the value of a is forced, so the cost is O(Br).
    """
    _check_AB(A, B)
    g = math.gcd(q, r)
    qg, rg = q // g, r // g
    A0 = A % B
    count = 0
    for b in _pair_classes(r, A, B):
        num = c + qg * b
        if num % rg:
            continue
        a = num // rg
        if 1 <= a <= B * q and a % B == A0 and math.gcd(a, B * q) == 1:
            count += 1
    return count


def H_c_histogram(q: int, r: int, A: int, B: int) -> dict[int, int]:
    """H(c) for every c at once, by enumerating all pairs."""
    _check_AB(A, B)
    g = math.gcd(q, r)
    a = np.array(_pair_classes(q, A, B), np.int64)
    b = np.array(_pair_classes(r, A, B), np.int64)
    cs, h = np.unique(((r // g) * a[:, None] - (q // g) * b[None, :]).ravel(), return_counts=True)
    return {int(c): int(k) for c, k in zip(cs, h)}


def pair_count(q: int, r: int, A: int, B: int) -> int:
    return len(_pair_classes(q, A, B)) * len(_pair_classes(r, A, B))


def H_c_must_vanish(c: int, q: int, r: int, A: int, B: int) -> bool:
    g = math.gcd(q, r)
    if (c - (r - q) // g * A) % B:
        return True
    return math.gcd(c, mln_decompose(q, r).n) > 1


def H_c_bound(c: int, q: int, r: int, A: int, B: int) -> Fraction:
    ov = mln_decompose(q, r)
    bound = Fraction(ov.gcd)
    for p in factor(ov.m):
        bound *= Fraction(p - 1, p)
        if B % p == 0:
            bound *= Fraction(p, p - 1)
    for p in factor(ov.l):
        bound *= Fraction(p - 1, p) ** 2
        if c % p == 0:
            bound *= Fraction(p, p - 1)
        if B % p == 0:
            bound *= Fraction(p, p - 1) ** 2
    return bound


def iq_count_table(qmax: int, A: int, B: int) -> np.ndarray:
    """|I_q(A, B)| for q = 0..qmax by enumeration (compiled kernel)."""
    _check_AB(A, B)
    ptr, val = prime_factor_table(qmax)
    return kernels.iq_counts(qmax, A % B, B, ptr, val)


def f_count_table(qmax: int, hmax: int, A: int, B: int) -> np.ndarray:
    """Brute-force F(h, q) for q <= qmax, |h| <= hmax; column h + hmax."""
    _check_AB(A, B)
    ptr, val = prime_factor_table(qmax)
    return kernels.f_table(qmax, hmax, A % B, B, ptr, val)


def hc_sweep(qmax: int, A: int, B: int):
    """Enumerate H(c) for all ordered q != r <= qmax and count rule violations.

    Returns (totals, stats): totals[q, r] = sum_c H(c), stats = (distinct c,
    vanishing-rule violations, bound violations).
    """
    _check_AB(A, B)
    ptr, val = prime_factor_table(max(qmax, 1))
    return kernels.hc_sweep(qmax, A % B, B, ptr, val)
