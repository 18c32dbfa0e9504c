from fractions import Fraction as F

import pytest

from dslab.psiexpr import ExprError, parse


@pytest.mark.parametrize("rule,q,want", [
    ("c/q:c=1", 4, F(1, 4)),
    ("c/q^s:c=2,s=2", 3, F(2, 9)),
    ("1/(4n)", 5, F(1, 20)),
    ("1/(2q)", 7, F(1, 14)),
    ("c*indicator(primes):c=1/3", 7, F(1, 3)),
    ("c*indicator(primes):c=1/3", 8, 0),
    ("restrict(q≡1 mod 3)/q", 4, F(1, 4)),
    ("restrict(q==1 mod 3)/q", 5, 0),
    ("min(1/2, 3/q)", 4, F(1, 2)),
    ("2^-q", 3, F(1, 8)),
    ("(q+1)(q-1)", 3, 8),
])
def test_rules(rule, q, want):
    assert parse(rule)(q) == want


def test_exact_result_type():
    assert isinstance(parse("1/q")(3), F)


@pytest.mark.parametrize("bad", ["1/", "foo(q)", "c/q", "1/q:c=x", "q $ 2"])
def test_errors(bad):
    with pytest.raises(ExprError):
        parse(bad)(3)
