from fractions import Fraction

from hypothesis import strategies as st

from dslab.unitcircle import CircleSet


def fractions(max_den=60, lo=0, hi=1):
    return st.builds(lambda n, d: Fraction(n, d), st.integers(0, 10**6), st.integers(1, max_den)).map(
        lambda x: lo + (hi - lo) * (x - x.__floor__()))


@st.composite
def circle_sets(draw, max_arcs=4, max_den=30):
    arcs = draw(st.lists(st.tuples(fractions(max_den), fractions(max_den, 0, Fraction(1, 2))), max_size=max_arcs))
    return CircleSet.from_arcs(arcs)


@st.composite
def intervals(draw, max_den=64):
    a = draw(fractions(max_den))
    b = draw(fractions(max_den))
    lo, hi = min(a, b), max(a, b)
    return CircleSet.from_intervals([(lo, hi)])
