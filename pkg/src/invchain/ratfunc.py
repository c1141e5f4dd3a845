"""The rational function field K = F(a1, b1, a2, b2, ...).

No multivariate gcd is computed.  A fraction is kept in a deterministic
representative: the denominator is primitive with positive (char 0) or unit
(char p) leading coefficient, and common monomial factors are cancelled.
Equality is decided by cross-multiplication.
"""

from __future__ import annotations

import re
from fractions import Fraction

from . import scalar
from .errors import DivisionByZeroError, DomainMismatchError, ParseError
from .poly import Poly, mono_div, mono_gcd


class RatFunc:
    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = Poly.one(num.char)
        if num.char != den.char:
            raise DomainMismatchError(f"characteristic {num.char} vs {den.char}")
        if den.is_zero():
            raise DivisionByZeroError("zero denominator")
        if num.is_zero():
            den = Poly.one(num.char)
        elif not den.is_one():
            if den.is_constant():
                num = num.scale(scalar.inverse(den.constant_value(), num.char))
                den = Poly.one(num.char)
            else:
                g = mono_gcd(num.monomial_content(), den.monomial_content())
                if g:
                    num, den = num.div_monomial(g), den.div_monomial(g)
                c = den.scalar_content()
                if c != 1:
                    inv = scalar.inverse(c, num.char)
                    num, den = num.scale(inv), den.scale(inv)
                if num == den:
                    num = den = Poly.one(num.char)
        self.num = num
        self.den = den

    # constructors

    @classmethod
    def zero(cls, char: int = 0) -> RatFunc:
        return cls(Poly.zero(char))

    @classmethod
    def one(cls, char: int = 0) -> RatFunc:
        return cls(Poly.one(char))

    @classmethod
    def const(cls, c, char: int = 0) -> RatFunc:
        return cls(Poly.const(c, char))

    @classmethod
    def a(cls, index: int, char: int = 0) -> RatFunc:
        return cls(Poly.a(index, char))

    @classmethod
    def b(cls, index: int, char: int = 0) -> RatFunc:
        return cls(Poly.b(index, char))

    @classmethod
    def parse(cls, text: str, char: int = 0) -> RatFunc:
        return _Parser(text, char).parse()

    @property
    def char(self) -> int:
        return self.num.char

    # predicates

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        """True when the value lies in F (as a representative, without gcd)."""
        return self.num.is_constant() and self.den.is_constant()

    def max_index(self) -> int:
        return max(self.num.max_index(), self.den.max_index())

    # arithmetic

    def _coerce(self, other) -> RatFunc:
        if isinstance(other, RatFunc):
            if other.char != self.char:
                raise DomainMismatchError(f"characteristic {self.char} vs {other.char}")
            return other
        if isinstance(other, (Poly, scalar.Scalar, int, Fraction)):
            if isinstance(other, Poly):
                if other.char != self.char:
                    raise DomainMismatchError(f"characteristic {self.char} vs {other.char}")
                return RatFunc(other)
            return RatFunc(self.num._coerce(other))
        return NotImplemented

    def __add__(self, other) -> RatFunc:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        d1, d2 = self.den, other.den
        if d1 == d2:
            return RatFunc(self.num + other.num, d1)
        if d1.is_one():
            return RatFunc(self.num * d2 + other.num, d2)
        if d2.is_one():
            return RatFunc(self.num + other.num * d1, d1)
        q = _quotient_if_divides(d2, d1)
        if q is not None:
            return RatFunc(self.num * q + other.num, d2)
        q = _quotient_if_divides(d1, d2)
        if q is not None:
            return RatFunc(self.num + other.num * q, d1)
        return RatFunc(self.num * d2 + other.num * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self) -> RatFunc:
        return RatFunc(-self.num, self.den)

    def __sub__(self, other) -> RatFunc:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> RatFunc:
        return (-self) + other

    def __mul__(self, other) -> RatFunc:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return RatFunc.zero(self.char)
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if d1 == n2:
            return RatFunc(n1, d2)
        if d2 == n1:
            return RatFunc(n2, d1)
        n1, d2 = _cancel(n1, d2)
        n2, d1 = _cancel(n2, d1)
        return RatFunc(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> RatFunc:
        if self.is_zero():
            raise DivisionByZeroError("inverse of zero in K")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other) -> RatFunc:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other) -> RatFunc:
        return self.inverse() * other

    def __pow__(self, e: int) -> RatFunc:
        if e < 0:
            return self.inverse() ** -e
        return RatFunc(self.num**e, self.den**e)

    def normalize(self) -> RatFunc:
        return RatFunc(self.num, self.den)

    def equal(self, other) -> bool:
        other = self._coerce(other)
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.den == other.num * self.den

    def __eq__(self, other) -> bool:
        try:
            other = self._coerce(other)
        except DomainMismatchError:
            return False
        if other is NotImplemented:
            return NotImplemented
        return self.equal(other)

    __hash__ = None  # equality is by cross-multiplication; no canonical hash

    def __str__(self) -> str:
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"RatFunc({str(self)!r}, char={self.char})"


def _quotient_if_divides(big: Poly, small: Poly) -> Poly | None:
    if big.degree() <= small.degree():
        return None
    lm_big, _ = big.leading_term()
    lm_small, _ = small.leading_term()
    if mono_div(lm_big, lm_small) is None:
        return None
    return big.divide_exact(small)


def common_multiple(dens) -> tuple[Poly, bool]:
    """A common multiple of ``dens`` (product, skipping factors already covered).

    The flag is True when the denominators form a divisibility chain, i.e. the
    result is one of the inputs rather than a product of several.
    """
    acc = dens[0]
    chain = True
    for d in dens[1:]:
        if acc == d or d.is_one():
            continue
        if acc.is_one():
            acc = d
        elif _quotient_if_divides(acc, d) is not None:
            continue
        elif _quotient_if_divides(d, acc) is not None:
            acc = d
        else:
            acc = acc * d
            chain = False
    return acc, chain


def _cancel(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Cancel ``num`` against ``den`` when one exactly divides the other."""
    if num.is_constant() or den.is_constant():
        return num, den
    q = _quotient_if_divides(den, num)
    if q is not None:
        return Poly.one(num.char), q
    q = _quotient_if_divides(num, den)
    if q is not None:
        return q, Poly.one(num.char)
    return num, den


def ratfunc_ops(op: str, lhs: RatFunc, rhs: RatFunc | None = None):
    """Dispatch by name: add, mul, div, neg, sub, equal."""
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        return lhs / rhs
    if op == "neg":
        return -lhs
    if op == "equal":
        return lhs.equal(rhs)
    raise ValueError(f"unknown op {op!r}")


# -- canonical text grammar --------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([ab])(\d+)|(.))")


class _Parser:
    """Recursive-descent parser for sums of products of a<k>, b<k>, integers."""

    def __init__(self, text: str, char: int):
        self.char = char
        self.tokens: list[tuple[str, object]] = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                break
            num, fam, idx, op = m.groups()
            if num is not None:
                self.tokens.append(("int", int(num)))
            elif fam is not None:
                self.tokens.append(("var", (fam, int(idx))))
            elif op is not None and op in "+-*/^()":
                self.tokens.append((op, None))
            elif op is not None and not op.isspace():
                raise ParseError(f"unexpected character {op!r} in {text!r}")
            pos = m.end()
        self.i = 0
        self.text = text

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self, kind=None):
        if self.i >= len(self.tokens):
            raise ParseError(f"unexpected end of input in {self.text!r}")
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, got {tok[0]!r} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> RatFunc:
        if not self.tokens:
            raise ParseError("empty expression")
        r = self.expr()
        if self.i != len(self.tokens):
            raise ParseError(f"trailing input in {self.text!r}")
        return r

    def expr(self) -> RatFunc:
        neg = False
        if self.peek() in ("+", "-"):
            neg = self.take()[0] == "-"
        acc = self.term()
        if neg:
            acc = -acc
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> RatFunc:
        acc = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take()[0]
            f = self.factor()
            acc = acc * f if op == "*" else acc / f
        return acc

    def factor(self) -> RatFunc:
        base = self.atom()
        if self.peek() == "^":
            self.take()
            _, e = self.take("int")
            base = base**e
        return base

    def atom(self) -> RatFunc:
        kind, val = self.take()
        if kind == "int":
            return RatFunc.const(val, self.char)
        if kind == "var":
            fam, idx = val
            return RatFunc(Poly.var(fam, idx, self.char))
        if kind == "(":
            r = self.expr()
            self.take(")")
            return r
        if kind == "-":
            return -self.factor()
        raise ParseError(f"unexpected token {kind!r} in {self.text!r}")


def parse_poly(text: str, char: int = 0) -> Poly:
    r = RatFunc.parse(text, char)
    if not r.is_polynomial():
        raise ParseError(f"not a polynomial: {text!r}")
    return r.num
