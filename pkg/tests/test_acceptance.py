"""End-to-end acceptance checks, one per numbered criterion.

Each check returns (ok, detail) and prints a single PASS/FAIL line.  Run with
``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
Tolerances and runtime budgets are the stated ones; nothing is relaxed here.
"""
from __future__ import annotations

import math
import random
import sys
import time
from fractions import Fraction as F

import pytest

from dslab import numtheory as nt
from dslab.bclab import FinSpace, finspace_limsup_measure, montecarlo_hits, verify_dbc
from dslab.contfrac import GammaCertificate, construct_gamma_for_f, construct_gamma_for_psi, verify_certificate
from dslab.dynsim import DynSystem, TargetSequence, counting_experiment, mixing_gap, orbit_hits
from dslab.moments import ds_condition_ratio, overlap_moments, quasi_independence_holds, reduction_step
from dslab.targets import (ApproxFn, TargetFamily, build_Eq_I, build_Eq_prime, build_Eq_star,
                           large_psi_measure_parts, tail_union_measure)
from dslab.unitcircle import CircleSet

CHECKS: list[tuple[int, str, float | None, object]] = []


def check(num: int, title: str, budget: float | None = None):
    def deco(fn):
        CHECKS.append((num, title, budget, fn))
        return fn
    return deco


def coprime_pairs(Bmax):
    return [(A, B) for B in range(1, Bmax + 1) for A in range(B) if math.gcd(A, B) == 1]


@check(1, "|I_q| = phi(q,B) for q <= 2000, B <= 50", 30)
def c1():
    bad = 0
    cases = 0
    for B in range(1, 51):
        want = [nt.phi_qb(q, B) for q in range(1, 2001)]
        for A in range(B):
            if math.gcd(A, B) != 1:
                continue
            tab = nt.iq_count_table(2000, A, B)
            bad += sum(1 for q in range(1, 2001) if int(tab[q]) != want[q - 1])
            cases += 2000
    return bad == 0, f"{cases} (q, A, B) cases, {bad} mismatches"


@check(2, "F(h,q) brute force = multiplicative formula, q <= 500, |h| <= 50, B <= 10", 60)
def c2():
    bad = cases = 0
    for A, B in coprime_pairs(10):
        tab = nt.f_count_table(500, 50, A, B)
        for q in range(1, 501):
            for h in range(-50, 51):
                cases += 1
                if int(tab[q, h + 50]) != nt.F_hq_formula(h, q, A, B):
                    bad += 1
    return bad == 0, f"{cases} cases, {bad} mismatches"


@check(3, "H(c) vanishing rules, bound and pair count, q != r <= 120, B <= 10", 300)
def c3():
    vanish = bound = count = cs = 0
    for A, B in coprime_pairs(10):
        totals, stats = nt.hc_sweep(120, A, B)
        cs += int(stats[0])
        vanish += int(stats[1])
        bound += int(stats[2])
        phis = [0] + [nt.phi_qb(q, B) for q in range(1, 121)]
        for q in range(1, 121):
            for r in range(1, 121):
                if q != r and int(totals[q, r]) != phis[q] * phis[r]:
                    count += 1
    ok = vanish == bound == count == 0
    return ok, f"{cs} nonzero H(c) values; vanish violations {vanish}, bound violations {bound}, pair-count mismatches {count}"


@check(4, "measure formulas for E'_q, E_q^I and the large-psi decomposition")
def c4():
    rnd = random.Random(4)
    bad = 0
    for _ in range(500):
        q = rnd.randint(1, 1000)
        psi = F(rnd.randint(1, 500), rnd.randint(1, 1000))
        psi = min(psi, F(1, 2))
        g = F(rnd.randint(-50, 50), rnd.randint(1, 97))
        B = rnd.randint(1, 10)
        A = rnd.choice([a for a in range(B) if math.gcd(a, B) == 1])
        I = nt.enumerate_Iq(q, A, B)
        if build_Eq_prime(q, g, psi).measure() != 2 * psi * nt.euler_phi(q) / q:
            bad += 1
        if build_Eq_I(q, g, psi, I).measure() != 2 * psi * len(I) / q:
            bad += 1
    bad_large = 0
    for _ in range(200):
        q = rnd.randint(1, 1000)
        psi = F(1, 2) + F(rnd.randint(1, 4000), rnd.randint(1, 500))
        B = rnd.randint(1, 10)
        A = rnd.choice([a for a in range(B) if math.gcd(a, B) == 1])
        p = large_psi_measure_parts(q, A, B, psi)
        if p.exact != 2 * psi * nt.phi_qb(q, B) / q - p.T / q or p.exact != p.set_measure:
            bad_large += 1
    return bad == bad_large == 0, f"500 small-psi cases ({bad} mismatches), 200 large-psi cases ({bad_large} mismatches)"


@check(5, "X(q,r) < 1 forces disjoint E*_q, E*_r")
def c5():
    rnd = random.Random(5)
    done = bad = 0
    while done < 500:
        q, r = rnd.sample(range(1, 301), 2)
        B = rnd.randint(1, 10)
        A = rnd.choice([a for a in range(B) if math.gcd(a, B) == 1])
        L = B * math.lcm(q, r)
        psi = {q: q * F(rnd.randint(1, 120), 200 * L), r: r * F(rnd.randint(1, 120), 200 * L)}
        if nt.X_qr(q, r, psi[q], psi[r], B) >= 1:
            continue
        done += 1
        inter = build_Eq_star(q, A, B, psi[q]).intersect(build_Eq_star(r, A, B, psi[r]))
        if inter.measure() != 0:
            bad += 1
    return bad == 0, f"{done} cases with X < 1, {bad} with positive overlap"


@check(6, "constant events [0,1/2]: overlap_full / Psi^2 = 2 and limsup measure 1/2")
def c6():
    half = CircleSet.from_intervals([(0, F(1, 2))])
    ratios = {n: overlap_moments(range(1, n + 1), lambda i: half).C_full for n in (4, 16, 64)}
    sp = FinSpace((F(1, 2), F(1, 2)), (), (frozenset({0}),))
    lim = finspace_limsup_measure(sp)
    verdict = verify_dbc(sp, 2, 64)
    ok = all(v == 2 for v in ratios.values()) and lim == F(1, 2) == 1 / F(2) and verdict.status == "confirmed"
    return ok, f"C_full {dict((k, str(v)) for k, v in ratios.items())}, limsup {lim}"


@check(7, "reduction step revalidates on 1000 random instances")
def c7():
    rnd = random.Random(7)
    bad = 0
    for _ in range(1000):
        n = rnd.randint(1, 10)
        sets = [CircleSet.from_arcs([(F(rnd.randint(0, 23), 24), F(rnd.randint(1, 6), 48))
                                     for _ in range(rnd.randint(1, 3))]) for _ in range(n)]
        meas = {i: sets[i].measure() for i in range(n)}
        pairs = {(i, j): sets[i].intersect(sets[j]).measure() for i in range(n) for j in range(i + 1, n)}
        tot = sum(meas.values())
        off = sum(pairs.values(), F(0))
        c = max(off / tot**2, F(1, 1000)) * (1 + F(rnd.randint(0, 3), 4))
        assert quasi_independence_holds(range(n), meas, pairs, c)
        m = reduction_step(range(n), meas, pairs, c)
        if not quasi_independence_holds([i for i in range(n) if i != m], meas, pairs, c):
            bad += 1
    return bad == 0, f"1000 instances, {bad} failed revalidation"


@check(8, "sum phi(q)psi(q)/q / sum psi within 2% of 6/pi^2, psi = 1/q, Q = 10^5", 60)
def c8():
    s_psi, s_ds, ratio = ds_condition_ratio(10**5, lambda q: F(1, q))
    target = 6 / math.pi**2
    rel = abs(float(ratio) - target) / target
    return rel <= 0.02, f"ratio {float(ratio):.7f}, 6/pi^2 = {target:.7f}, relative gap {100 * rel:.3f}%"


@check(9, "gamma = 1/3, psi = 1/(2q), (1+3a, q) = 1: tail union and Monte Carlo hits", 600)
def c9():
    psi = lambda q: F(1, 2 * q)  # noqa: E731
    fam = TargetFamily("residue", psi, F(1, 3), 1, 3)
    m = tail_union_measure(fam, 100, 5000)
    ok_a = m >= F(99, 100)
    run = montecarlo_hits(F(1, 3), psi, ("residue", 1, 3), 10**5, 1000, 7, P=256)
    counts = run.counts()
    frac = float((counts >= 10).mean())
    ok_b = frac >= 0.99
    amb = int(run.raw[:, 3].sum())
    return ok_a and ok_b, (f"(a) {'ok' if ok_a else 'FAIL'} measure {float(m):.6f} vs 0.99; "
                           f"(b) {'ok' if ok_b else 'FAIL'} {100 * frac:.1f}% of samples with >= 10 hits "
                           f"(mean {counts.mean():.3f}, {amb} ambiguous)")


def _explicit_margins(cert: GammaCertificate) -> bool:
    cf = cert.cf()
    for s in cert.steps:
        a, qprev = cf.a[s.k], cf.q(s.k - 1)
        if a < qprev**s.i:
            return False
        if cert.kind == "psi" and a < s.window[1] ** 2:
            return False
    return True


@check(10, "gamma-forge: first window Q1 = 3 with sum 13/12; certificates revalidate")
def c10():
    half = ApproxFn.from_rule("1/2", 200)
    _, first = construct_gamma_for_psi(half, 1)
    s = first.steps[0]
    ok_first = s.window == (1, 3) and s.sum == F(13, 12) and s.sum >= 1
    big = ApproxFn({q: F(10 ** (3 * q)) for q in range(1, 40)}, "10^(3q)")
    certs = [first, construct_gamma_for_psi(half, 1, prime_denominators=True)[1],
             construct_gamma_for_psi(big, 4)[1],
             construct_gamma_for_psi(big, 3, fixed={1: 2, 3: 7}, prime_denominators=True)[1],
             construct_gamma_for_f({q: q**3 for q in range(1, 10**5)}, 2)[1]]
    bad = 0
    for c in certs:
        text = c.to_json()
        back = GammaCertificate.from_json(text)
        if back.to_json() != text or not verify_certificate(back).ok or not _explicit_margins(back):
            bad += 1
    return ok_first and bad == 0, f"Q1 = {s.window[1]}, sum {s.sum}; {len(certs)} certificates, {bad} failed"


@check(11, "x2 mixing gaps within 2 mu(B) 2^-n for n <= 20; dyadic A gives gap 0")
def c11():
    rnd = random.Random(11)
    x2 = DynSystem.times(2)

    def interval(den):
        a, b = sorted(rnd.sample(range(den + 1), 2))
        return CircleSet.from_intervals([(F(a, den), F(b, den))])

    over = nonzero = 0
    for _ in range(100):
        A, B = interval(rnd.randint(2, 1000)), interval(rnd.randint(2, 1000))
        for n in range(1, 21):
            if abs(mixing_gap(A, B, n, x2)) > 2 * B.measure() / 2**n:
                over += 1
        L = rnd.randint(1, 10)
        D = interval(2**L)
        for n in range(L, 21):
            if mixing_gap(D, B, n, x2) != 0:
                nonzero += 1
    return over == nonzero == 0, f"100 pairs x 20 steps: {over} envelope violations, {nonzero} nonzero dyadic gaps"


@check(12, "counting: r_n = 1/(4n) residual bound and r_n = n^-2 bounded hits, N = 10^5", 600)
def c12():
    x2 = DynSystem.times(2)
    res = counting_experiment(x2, TargetSequence.from_rule("1/(4n)", seed=7), 10**5, 200, F(1, 10), 7, K=10)
    run = orbit_hits(TargetSequence.from_rule("1/n^2", seed=7), 10**5, x2, 200, 7)
    bounded = float((run.hit_counts(include_ambiguous=True) <= 20).mean())
    ok = res.pass_fraction >= 0.95 and bounded >= 0.95
    return ok, (f"divergent: {100 * res.pass_fraction:.1f}% within K Phi^1/2 (log Phi)^1.6; "
                f"convergent: {100 * bounded:.1f}% with <= 20 hits")


def run_check(num):
    _, title, budget, fn = next(c for c in CHECKS if c[0] == num)
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    if budget is not None and dt > budget:
        ok = False
        detail += f"; over the {budget:.0f} s budget"
    line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail} [{dt:.1f} s]"
    return ok, line


@pytest.mark.slow
@pytest.mark.parametrize("num", [c[0] for c in CHECKS])
def test_criterion(num, capsys):
    ok, line = run_check(num)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = []
    for num, *_ in CHECKS:
        ok, line = run_check(num)
        print(line, flush=True)
        results.append(ok)
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
