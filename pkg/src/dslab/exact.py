"""Fast exact summation of many rationals."""
from __future__ import annotations

import math
from collections import defaultdict
from fractions import Fraction
from typing import Iterable


def fsum_exact(terms: Iterable) -> Fraction:
    """Sum rationals exactly without repeated normalisation.

    Terms are grouped by denominator and then combined pairwise in a balanced
    tree over least common multiples, so the cost stays close to a few
    multiplications of the final denominator's size.
    """
    by_den: dict[int, int] = defaultdict(int)
    for t in terms:
        t = Fraction(t)
        by_den[t.denominator] += t.numerator
    items = list(by_den.items())
    if not items:
        return Fraction(0)
    while len(items) > 1:
        nxt = []
        for i in range(0, len(items) - 1, 2):
            (d1, n1), (d2, n2) = items[i], items[i + 1]
            g = math.gcd(d1, d2)
            nxt.append((d1 // g * d2, n1 * (d2 // g) + n2 * (d1 // g)))
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    d, n = items[0]
    return Fraction(n, d)
