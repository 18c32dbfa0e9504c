from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dslab.unitcircle import CircleSet, union_all, union_measure_int

from strategies import circle_sets, fractions


def iv(*pairs):
    return CircleSet.from_intervals([(F(a), F(b)) for a, b in pairs])


def test_two_disjoint_arcs():
    assert CircleSet.from_arcs([(F(1, 4), F(1, 16)), (F(3, 4), F(1, 16))]).measure() == F(1, 4)


def test_wraparound_is_split():
    s = CircleSet.from_arcs([(0, F(1, 8))])
    assert s.intervals == ((0, F(1, 8)), (F(7, 8), 1))
    assert s.measure() == F(1, 4)
    assert s.components() == 1


def test_overlapping_arcs_cover_circle():
    s = CircleSet.from_arcs([(F(1, 3), F(1, 3)), (F(2, 3), F(1, 3))])
    assert s.measure() == 1


def test_radius_half_is_full():
    assert CircleSet.from_arcs([(F(1, 5), F(1, 2))]) == CircleSet.full()


def test_union_intersect_complement():
    assert iv(("0", "1/2")).union(iv(("1/4", "3/4"))).intervals == ((0, F(3, 4)),)
    A = iv(("1/5", "2/3"))
    assert A.intersect(A.complement()).measure() == 0
    assert iv(("1/4", "3/4")).intersect(iv(("1/6", "5/6"))).measure() == F(1, 2)


def test_touching_arcs_merge():
    assert iv(("0", "1/3"), ("1/3", "1/2")).intervals == ((0, F(1, 2)),)


def test_zero_length_dropped():
    assert iv(("1/3", "1/3")).is_empty()


def test_preimage_examples():
    A = iv(("0", "1/3"))
    P = A.preimage_mul(2)
    assert P.intervals == ((0, F(1, 6)), (F(1, 2), F(2, 3)))
    assert CircleSet.full().preimage_mul(5) == CircleSet.full()
    assert iv(("1/7", "3/7")).preimage_mul(3).measure() == F(2, 7)


def test_preimage_budget():
    with pytest.raises(Exception, match="budget"):
        iv(("0", "1/3")).preimage_mul(2**21)


def test_floats_refused():
    with pytest.raises(TypeError):
        CircleSet.from_arcs([(0.5, F(1, 8))])


def test_contains_closed():
    A = iv(("1/4", "1/2"))
    assert A.contains(F(1, 4)) and A.contains(F(1, 2)) and not A.contains(F(3, 5))


def test_union_measure_int_matches_union_all():
    rng = np.random.default_rng(3)
    den = rng.integers(1, 200, 300)
    lo = rng.integers(-200, 200, 300)
    hi = lo + rng.integers(0, 60, 300)
    hi = np.minimum(hi, lo + den - 1)
    # arc [a/d, b/d] as centre and radius
    want = union_all(CircleSet.from_arcs([(F(int(a) + int(b), 2 * int(d)), F(int(b) - int(a), 2 * int(d)))])
                     for a, b, d in zip(lo, hi, den))
    assert union_measure_int(lo, hi, den) == want.measure()


@given(circle_sets(), circle_sets())
def test_inclusion_exclusion(A, B):
    assert A.union(B).measure() + A.intersect(B).measure() == A.measure() + B.measure()


@given(circle_sets())
def test_complement_measure(A):
    assert A.complement().measure() == 1 - A.measure()
    assert A.complement().complement() == A


@given(circle_sets(), fractions())
def test_translate_preserves_measure(A, t):
    assert A.translate(t).measure() == A.measure()


@given(circle_sets(max_arcs=3, max_den=12), st.integers(1, 7))
def test_preimage_preserves_measure(A, b):
    assert A.preimage_mul(b).measure() == A.measure()


@given(circle_sets(), circle_sets())
def test_difference_disjoint(A, B):
    D = A.difference(B)
    assert D.intersect(B).measure() == 0
    assert D.measure() == A.measure() - A.intersect(B).measure()
