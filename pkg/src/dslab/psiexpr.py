"""Small exact-arithmetic expression language for approximating functions.

Examples::

    c/q:c=1
    c/q^s:c=1,s=2
    c*indicator(primes):c=1/2
    1/(2*q) * restrict(q≡1 mod 4)

The variable is ``q`` (``n`` is accepted as an alias).  Everything after the
first ``:`` binds parameters to rationals.  Exponents must evaluate to
integers so that results stay rational.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import sympy


class ExprError(ValueError):
    pass


_SYMBOLS = "+-*/^(),"


def _tokenize(src: str) -> list[tuple[str, str]]:
    toks = []
    i = 0
    while i < len(src):
        ch = src[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(src) and src[j].isdigit():
                j += 1
            toks.append(("num", src[i:j]))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(src) and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(("id", src[i:j]))
            i = j
        elif ch == "≡":
            toks.append(("eq", ch))
            i += 1
        elif src.startswith("==", i):
            toks.append(("eq", "=="))
            i += 2
        elif ch == "=":
            toks.append(("eq", "="))
            i += 1
        elif ch in _SYMBOLS:
            toks.append((ch, ch))
            i += 1
        else:
            raise ExprError(f"unexpected character {ch!r} at {i} in {src!r}")
    toks.append(("end", ""))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ExprError(f"expected {kind!r} but found {tok[1]!r} in {self.src!r}")
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        self.take("end")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] in "+-" and self.peek()[0] != "end":
            op = self.take()[0]
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.power()
        while True:
            kind, text = self.peek()
            if kind in ("*", "/"):
                op = self.take()[0]
            elif kind in ("num", "(") or (kind == "id" and text != "mod"):
                op = "*"  # juxtaposition, as in 4n
            else:
                return node
            node = (op, node, self.power())

    def power(self):
        base = self.unary()
        if self.peek()[0] == "^":
            self.take()
            return ("^", base, self.power())
        return base

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return ("neg", self.unary())
        return self.atom()

    def atom(self):
        kind, text = self.peek()
        if kind == "num":
            self.take()
            return ("const", Fraction(int(text)))
        if kind == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if kind == "id":
            self.take()
            if self.peek()[0] != "(":
                return ("var", "q") if text in ("q", "n") else ("param", text)
            self.take("(")
            if text == "indicator":
                what = self.take("id")[1]
                self.take(")")
                if what != "primes":
                    raise ExprError(f"unknown indicator {what!r}")
                return ("primes",)
            if text == "restrict":
                var = self.take("id")[1]
                if var not in ("q", "n"):
                    raise ExprError("restrict() must test the variable q")
                self.take("eq")
                s = self.expr()
                if self.take("id")[1] != "mod":
                    raise ExprError("restrict() expects 'q≡s mod u'")
                u = self.expr()
                self.take(")")
                return ("restrict", s, u)
            if text in ("min", "max"):
                a = self.expr()
                self.take(",")
                b = self.expr()
                self.take(")")
                return (text, a, b)
            raise ExprError(f"unknown function {text!r}")
        raise ExprError(f"unexpected token {text!r} in {self.src!r}")


def _eval(node, q: int, env: dict[str, Fraction]) -> Fraction:
    op = node[0]
    if op == "const":
        return node[1]
    if op == "var":
        return Fraction(q)
    if op == "param":
        try:
            return env[node[1]]
        except KeyError:
            raise ExprError(f"unbound parameter {node[1]!r}") from None
    if op == "neg":
        return -_eval(node[1], q, env)
    if op == "primes":
        return Fraction(1 if sympy.isprime(q) else 0)
    if op == "restrict":
        s, u = _eval(node[1], q, env), _eval(node[2], q, env)
        if s.denominator != 1 or u.denominator != 1 or u <= 0:
            raise ExprError("restrict() needs integer s and positive integer u")
        return Fraction(1 if (q - s.numerator) % u.numerator == 0 else 0)
    a, b = _eval(node[1], q, env), _eval(node[2], q, env)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0:
            raise ExprError(f"division by zero at q={q}")
        return a / b
    if op == "^":
        if b.denominator != 1:
            raise ExprError("non-integer exponents are not supported")
        if a == 0 and b < 0:
            raise ExprError(f"division by zero at q={q}")
        return a ** b.numerator
    if op == "min":
        return min(a, b)
    if op == "max":
        return max(a, b)
    raise AssertionError(op)


@dataclass
class PsiExpr:
    source: str
    tree: tuple
    env: dict[str, Fraction] = field(default_factory=dict)

    def __call__(self, q: int) -> Fraction:
        return _eval(self.tree, int(q), self.env)


def parse(spec: str, **params) -> PsiExpr:
    """Parse ``expr[:name=value,...]``; keyword arguments override bindings."""
    body, _, binds = spec.partition(":")
    env: dict[str, Fraction] = {}
    for item in filter(None, (b.strip() for b in binds.split(","))):
        name, eq, val = item.partition("=")
        if not eq or not name.strip().isidentifier():
            raise ExprError(f"bad parameter binding {item!r}")
        try:
            env[name.strip()] = Fraction(val.strip())
        except (ValueError, ZeroDivisionError):
            raise ExprError(f"parameter {name.strip()!r} needs a rational value, got {val.strip()!r}") from None
    env.update({k: Fraction(v) for k, v in params.items()})
    return PsiExpr(spec, _Parser(body).parse(), env)


def as_callable(rule) -> Callable[[int], Fraction]:
    return parse(rule) if isinstance(rule, str) else rule
