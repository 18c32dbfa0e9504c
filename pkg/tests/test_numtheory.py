import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from dslab import numtheory as nt


def brute_phi(n):
    return sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)


def test_small_values():
    assert nt.euler_phi(12) == 4
    assert nt.moebius(1) == 1 and nt.euler_phi(1) == 1
    assert nt.tau(12) == 6
    assert nt.factor(360) == {2: 3, 3: 2, 5: 1}


def test_phi_qb():
    assert nt.phi_qb(12, 2) == 8
    assert nt.phi_qb(12, 1) == 4
    assert nt.phi_qb(9, 3) == 9


def test_enumerate_Iq():
    assert list(nt.enumerate_Iq(12, 1, 2)) == [0, 2, 3, 5, 6, 8, 9, 11]
    assert len(nt.enumerate_Iq(13, 0, 1)) == 12
    assert list(nt.enumerate_Iq(4, 1, 4)) == [0, 1, 2, 3]


def test_AB_must_be_coprime():
    with pytest.raises(ValueError):
        nt.enumerate_Iq(10, 2, 4)


def test_F_examples():
    assert nt.F_hq(3, 4, 0, 1) == 0 == nt.F_hq_formula(3, 4, 0, 1)
    assert nt.F_hq(2, 4, 0, 1) == 2 == nt.F_hq_formula(2, 4, 0, 1)
    assert nt.F_hq(1, 2, 1, 2) == 2 == nt.F_hq_formula(1, 2, 1, 2)


def test_mln():
    o = nt.mln_decompose(12, 18)
    assert (o.m, o.l, o.n) == (6, 1, 36) and o.m * o.l**2 * o.n == 216
    o = nt.mln_decompose(4, 8)
    assert (o.m, o.l, o.n) == (4, 1, 8)


def test_X():
    assert nt.X_qr(2, 3, F(1, 2), F(1, 2), 1) == 3


def test_H_examples():
    assert nt.H_c(1, 2, 3, 0, 1) == 1
    assert nt.H_c(-1, 2, 3, 0, 1) == 1
    assert nt.H_c(0, 2, 3, 0, 1) == 0
    assert nt.H_c_must_vanish(2, 2, 3, 0, 1) and nt.H_c(2, 2, 3, 0, 1) == 0
    assert nt.H_c_bound(1, 2, 3, 0, 1) == 1


def test_factor_limit():
    with pytest.raises(ValueError):
        nt.factor(10**13 + 37)


def test_sieve_tables_match_bruteforce():
    phi = nt.totients(300)
    assert all(int(phi[n]) == brute_phi(n) for n in range(1, 301))
    assert list(nt.primes_upto(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_iq_table_matches_phi_qb():
    tab = nt.iq_count_table(200, 2, 5)
    assert all(int(tab[q]) == nt.phi_qb(q, 5) for q in range(1, 201))


@given(st.integers(1, 3000), st.integers(1, 3000))
def test_phi_multiplicative(m, n):
    if math.gcd(m, n) == 1:
        assert nt.euler_phi(m * n) == nt.euler_phi(m) * nt.euler_phi(n)


@given(st.integers(1, 2000))
def test_moebius_sum(n):
    s = sum(nt.moebius(d) for d in range(1, n + 1) if n % d == 0)
    assert s == (1 if n == 1 else 0)


@given(st.integers(1, 150), st.integers(1, 12), st.integers(0, 11))
def test_Iq_size_is_phi_qb(q, B, A):
    if math.gcd(A, B) != 1:
        return
    assert len(nt.enumerate_Iq(q, A, B)) == nt.phi_qb(q, B)


@given(st.integers(1, 120), st.integers(-30, 30), st.integers(1, 8), st.integers(0, 7))
def test_F_formula(q, h, B, A):
    if math.gcd(A, B) != 1:
        return
    assert nt.F_hq(h, q, A, B) == nt.F_hq_formula(h, q, A, B)


@given(st.integers(1, 40), st.integers(1, 40), st.integers(1, 5), st.integers(0, 4))
def test_H_histogram_rules(q, r, B, A):
    if q == r or math.gcd(A, B) != 1:
        return
    hist = nt.H_c_histogram(q, r, A, B)
    assert sum(hist.values()) == nt.pair_count(q, r, A, B) == nt.phi_qb(q, B) * nt.phi_qb(r, B)
    for c, h in hist.items():
        assert not nt.H_c_must_vanish(c, q, r, A, B)
        assert h <= nt.H_c_bound(c, q, r, A, B)
    for c in list(hist)[:5]:
        assert nt.H_c(c, q, r, A, B) == hist[c]


@given(st.integers(1, 10**4), st.integers(1, 10**4))
def test_mln_product(q, r):
    o = nt.mln_decompose(q, r)
    assert o.m * o.l**2 * o.n == q * r
    assert o.gcd * o.lcm == q * r
    for p, e in nt.factor(o.l).items():
        assert q % p == 0 and r % p == 0 and nt.factor(q)[p] == nt.factor(r)[p]
    for p in nt.factor(o.n):
        assert nt.factor(q).get(p, 0) != nt.factor(r).get(p, 0)
    if q != r:
        assert o.n > 1
