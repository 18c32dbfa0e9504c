import math
from fractions import Fraction as F

import numpy as np
import pytest

from dslab import rng
from dslab.bclab import (FinSpace, check_B1, check_M1, dichotomy_probe, exact_hits, finspace_limsup_measure,
                         hits_summary_json, montecarlo_hits, verify_dbc)
from dslab.targets import build_Eq_prime, build_Eq_star
from dslab.unitcircle import CircleSet

HALF = (F(1, 2), F(1, 2))
PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


def test_constant_event_space():
    sp = FinSpace(HALF, (), (frozenset({0}),))
    assert finspace_limsup_measure(sp) == F(1, 2)
    v = verify_dbc(sp, 2, 32)
    assert v.status == "confirmed" and v.limsup == F(1, 2)


def test_cycling_and_empty():
    cyc = FinSpace((F(1, 3),) * 3, (), tuple(frozenset({i}) for i in range(3)))
    assert finspace_limsup_measure(cyc) == 1
    dead = FinSpace(HALF, (frozenset({0, 1}),) * 3, (frozenset(),))
    assert finspace_limsup_measure(dead) == 0
    assert verify_dbc(dead, 2, 20).status == "inconclusive"


def test_alternating_events():
    sp = FinSpace(HALF, (), (frozenset({0}), frozenset({1})))
    v = verify_dbc(sp, F(11, 10), 200)
    assert v.status == "confirmed" and v.limsup == 1


def test_quasi_independence_fails():
    sp = FinSpace(HALF, (), (frozenset({0}),))
    assert verify_dbc(sp, F(3, 2), 50).status == "inconclusive"


def test_M1_constant_sets_violate():
    E = CircleSet.from_intervals([(0, F(1, 3))])
    rep = check_M1(lambda i: E, F(1, 10), 1, 2, (1, 20))
    assert rep.i0 is None and rep.violations == list(range(1, 21))
    assert check_M1(lambda i: E, 10, 1, 2, (1, 20)).violations == []


def test_M1_primes():
    seq = lambda i: build_Eq_star(PRIMES[i - 1], 0, 1, F(1, 4))  # noqa: E731
    rep = check_M1(seq, F(1, 2), 1, 2, (3, 15))
    assert rep.i0 is not None


def test_B1():
    seq = lambda i: build_Eq_prime(PRIMES[i - 1], 0, F(1, 4))  # noqa: E731
    assert check_B1(seq, (F(1, 4), F(1, 4)), F(1, 2), (1, 15)).i0 is not None
    assert check_B1(seq, (0, F(1, 2)), 0, (1, 15)).violations == []
    nested = lambda i: CircleSet.from_arcs([(F(1, 2), F(1, 4 * i))])  # noqa: E731
    assert check_B1(nested, (0, F(1, 16)), 0, (1, 10)).violations == []


def test_M1_on_finspace():
    sp = FinSpace(HALF, (), (frozenset({0}), frozenset({1})))
    assert check_M1(sp, F(1, 10), 1, 2, (1, 10)).violations == []


def test_every_q_hits_with_half():
    run = montecarlo_hits(0, lambda q: F(1, 2), "all_a", 300, 20, seed=1)
    assert (run.counts(include_ambiguous=True) == 300).all()


def test_summable_psi_bounded():
    run = montecarlo_hits(0, lambda q: F(1, q * q), "all_a", 5000, 200, seed=2)
    assert (run.counts(include_ambiguous=True) > 20).mean() == 0


MODES = ["all_a", "coprime", ("residue", 1, 3), ("residue", 2, 5), ("congruence", 1, 2, 0, 3)]


@pytest.mark.parametrize("mode", MODES)
@pytest.mark.parametrize("P", [40, 100, 256])
def test_matches_exact_oracle(mode, P):
    Q, samples, seed = 400, 25, 9
    psi = lambda q: F(1, 2 * q) if q % 7 else F(3, 2)  # noqa: E731
    run = montecarlo_hits(F(1, 3), psi, mode, Q, samples, seed, P)
    W = rng.point_words(seed, samples, max(2, -(-P // 64)))
    for s in range(samples):
        x = rng.point_value(W[s], P)
        want = {q for q, _ in exact_hits(x, F(1, 3), psi, mode, Q)}
        rec = run.records[s]
        certain = {q for q, _, amb in rec.hits if not amb}
        possible = {q for q, _, _ in rec.hits}
        assert certain <= want <= possible


def test_witnesses_are_valid():
    psi = lambda q: F(1, q)  # noqa: E731
    run = montecarlo_hits(F(2, 7), psi, ("residue", 1, 3), 300, 10, 4, 200)
    W = rng.point_words(4, 10, 4)
    for row in run.raw:
        s, q, a, amb = (int(v) for v in row[:4])
        if amb:
            continue
        x = rng.point_value(W[s], 200)
        assert abs(q * x - a - F(2, 7)) <= psi(q)
        assert math.gcd(1 + 3 * a, q) == 1


def test_reproducible_and_shardable():
    psi = lambda q: F(1, 3 * q)  # noqa: E731
    full = montecarlo_hits(0, psi, "coprime", 500, 30, 5)
    again = montecarlo_hits(0, psi, "coprime", 500, 30, 5)
    assert full.to_csv() == again.to_csv()
    a = montecarlo_hits(0, psi, "coprime", 500, 12, 5)
    b = montecarlo_hits(0, psi, "coprime", 500, 18, 5, start=12)
    assert list(full.counts()) == list(a.counts()) + list(b.counts())
    js = hits_summary_json(full)
    assert rng.ALGORITHM in js


def test_dichotomy_same_shift():
    rep = dichotomy_probe(F(1, 5), F(1, 5), lambda q: F(1, 4), F(1, 4), 200, 20, 3)
    assert rep.C == 1 and (rep.counts == rep.counts_scaled).all()


def test_dichotomy_containment():
    rep = dichotomy_probe(0, F(1, 2), lambda q: F(1, 2), F(1, 2), 300, 30, 3)
    assert rep.C == 2 and rep.containment_violations == 0 and rep.checked_hits > 0


def test_dichotomy_psi_below_delta():
    with pytest.raises(ValueError):
        dichotomy_probe(0, F(1, 2), lambda q: F(1, q), F(1, 4), 50, 5, 3)
