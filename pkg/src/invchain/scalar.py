"""Elements of the prime field F: rationals in characteristic 0, residues mod p otherwise.

Polynomials store raw coefficients (``int``/``Fraction`` in characteristic 0,
``int`` in ``[0, p)`` otherwise) for speed; the helpers here are the single
place that knows how to normalize and combine them.  :class:`Scalar` wraps a
raw value together with its characteristic for callers that want a checked
field element.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from .errors import DivisionByZeroError, DomainMismatchError, InvalidInputError

Raw = Union[int, Fraction]

MAX_CHAR = 2**31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def check_characteristic(char: int) -> int:
    if char == 0 or (0 < char < MAX_CHAR and is_prime(char)):
        return char
    raise InvalidInputError(f"characteristic must be 0 or a prime < 2^31, got {char}")


def normalize(value: Raw, char: int) -> Raw:
    """Bring a raw value into canonical form for ``char``."""
    if char:
        if isinstance(value, Fraction):
            den = value.denominator % char
            if den == 0:
                raise DivisionByZeroError(f"denominator vanishes mod {char}")
            return value.numerator * pow(den, -1, char) % char
        return value % char
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def inverse(value: Raw, char: int) -> Raw:
    if value == 0:
        raise DivisionByZeroError("inverse of zero scalar")
    if char:
        return pow(int(value), -1, char)
    if isinstance(value, int):
        return Fraction(1, value) if value not in (1, -1) else value
    return normalize(1 / value, 0)


def divide(a: Raw, b: Raw, char: int) -> Raw:
    if char:
        return a * inverse(b, char) % char
    if b == 0:
        raise DivisionByZeroError("division by zero scalar")
    if isinstance(a, int) and isinstance(b, int):
        return a // b if a % b == 0 else Fraction(a, b)
    return normalize(Fraction(a) / b, 0)


def format_raw(value: Raw) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return str(value)


class Scalar:
    """A checked element of F of a fixed characteristic."""

    __slots__ = ("char", "value")

    def __init__(self, value: Raw | str, char: int = 0):
        if isinstance(value, str):
            value = Fraction(value)
        self.char = check_characteristic(char)
        self.value = normalize(value, char)

    def _coerce(self, other) -> Scalar:
        if isinstance(other, Scalar):
            if other.char != self.char:
                raise DomainMismatchError(f"characteristic {self.char} vs {other.char}")
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar(other, self.char)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.value + other.value, self.char)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.value, self.char)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.value - other.value, self.char)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(self.value * other.value, self.char)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Scalar(divide(self.value, other.value, self.char), self.char)

    def inverse(self) -> Scalar:
        return Scalar(inverse(self.value, self.char), self.char)

    def __pow__(self, exp: int) -> Scalar:
        if exp < 0:
            return self.inverse() ** -exp
        if self.char:
            return Scalar(pow(self.value, exp, self.char), self.char)
        return Scalar(self.value**exp, 0)

    def is_zero(self) -> bool:
        return self.value == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self.char == other.char and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == normalize(other, self.char)
        return NotImplemented

    def __hash__(self):
        return hash((self.char, self.value))

    def __repr__(self):
        return f"Scalar({format_raw(self.value)}, char={self.char})"

    def __str__(self):
        return format_raw(self.value)
