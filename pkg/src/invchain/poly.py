"""Indexed indeterminates a_n, b_n and sparse multivariate polynomials over F.

A monomial is stored as a tuple of ``(key, exponent)`` pairs sorted by key,
where ``key = 2*index + (0 for a, 1 for b)``.  That integer order is the
variable order used everywhere: index first, then ``a`` before ``b``.  The
empty tuple is the monomial 1.

Polynomials are ordered by graded lex with ``a1 > b1 > a2 > b2 > ...``; the
canonical text form lists terms from the largest monomial down.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterator, Tuple

from . import scalar
from .errors import DivisionByZeroError, DomainMismatchError, InvalidIndexError

Monomial = Tuple[Tuple[int, int], ...]

FAMILIES = ("a", "b")


@dataclass(frozen=True, order=False)
class VarRef:
    family: str
    index: int

    @property
    def key(self) -> int:
        return 2 * self.index + FAMILIES.index(self.family)

    @property
    def name(self) -> str:
        return f"{self.family}{self.index}"

    def __lt__(self, other: VarRef) -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return self.name


class Window:
    """Largest variable index referenced while a tracking block was active."""

    def __init__(self) -> None:
        self.max_index = 0


class Registry:
    """Append-only interning table for indeterminates."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._vars: Dict[Tuple[str, int], VarRef] = {}
        self.max_index = 0
        self._windows: list[Window] = []

    def intern(self, family: str, index: int) -> VarRef:
        family = family.lower()
        if family not in FAMILIES:
            raise InvalidIndexError(f"unknown variable family {family!r}")
        if not isinstance(index, int) or index < 1:
            raise InvalidIndexError(f"variable index must be >= 1, got {index!r}")
        with self._lock:
            ref = self._vars.get((family, index))
            if ref is None:
                ref = self._vars[(family, index)] = VarRef(family, index)
            if index > self.max_index:
                self.max_index = index
            for w in self._windows:
                if index > w.max_index:
                    w.max_index = index
            return ref

    def __len__(self) -> int:
        return len(self._vars)

    @contextmanager
    def tracking(self) -> Iterator[Window]:
        w = Window()
        with self._lock:
            self._windows.append(w)
        try:
            yield w
        finally:
            with self._lock:
                self._windows.remove(w)


REGISTRY = Registry()


def registry_intern(family: str, index: int) -> VarRef:
    return REGISTRY.intern(family, index)


def varref_from_key(key: int) -> VarRef:
    return REGISTRY.intern(FAMILIES[key % 2], key // 2)


# -- monomials ---------------------------------------------------------------


@lru_cache(maxsize=1 << 16)
def mono_key(m: Monomial):
    """Sort key realizing graded lex; larger key means larger monomial."""
    return (sum(e for _, e in m), tuple((-k, e) for k, e in m))


@lru_cache(maxsize=1 << 18)
def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for k, e in m2:
        d[k] = d.get(k, 0) + e
    return tuple(sorted(d.items()))


def mono_div(m1: Monomial, m2: Monomial) -> Monomial | None:
    """``m1 / m2`` if ``m2`` divides ``m1``, else None."""
    if not m2:
        return m1
    d = dict(m1)
    for k, e in m2:
        have = d.get(k, 0)
        if have < e:
            return None
        if have == e:
            del d[k]
        else:
            d[k] = have - e
    return tuple(sorted(d.items()))


def mono_pow(m: Monomial, e: int) -> Monomial:
    return tuple((k, x * e) for k, x in m)


def mono_gcd(m1: Monomial, m2: Monomial) -> Monomial:
    d2 = dict(m2)
    return tuple((k, min(e, d2[k])) for k, e in m1 if k in d2)


def mono_str(m: Monomial) -> str:
    parts = []
    for k, e in m:
        name = f"{FAMILIES[k % 2]}{k // 2}"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


# -- polynomials -------------------------------------------------------------


class Poly:
    """Sparse polynomial in the a_n, b_n with coefficients in F.

    ``terms`` maps monomials to nonzero raw scalars (see :mod:`invchain.scalar`).
    Instances are treated as immutable.
    """

    __slots__ = ("char", "terms", "_hash")

    def __init__(self, terms: Dict[Monomial, scalar.Raw] | None = None, char: int = 0, *, _clean: bool = False):
        self.char = char
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms
        else:
            self.terms = {}
            for m, c in terms.items():
                c = scalar.normalize(c, char)
                if c:
                    self.terms[m] = c
        self._hash = None

    # constructors

    @classmethod
    def zero(cls, char: int = 0) -> Poly:
        return cls(None, char)

    @classmethod
    def const(cls, c, char: int = 0) -> Poly:
        if isinstance(c, scalar.Scalar):
            c = c.value
        return cls({(): c}, char)

    @classmethod
    def one(cls, char: int = 0) -> Poly:
        return cls.const(1, char)

    @classmethod
    def var(cls, family: str, index: int, char: int = 0) -> Poly:
        ref = registry_intern(family, index)
        return cls({((ref.key, 1),): 1}, char, _clean=True)

    @classmethod
    def a(cls, index: int, char: int = 0) -> Poly:
        return cls.var("a", index, char)

    @classmethod
    def b(cls, index: int, char: int = 0) -> Poly:
        return cls.var("b", index, char)

    # inspection

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self) -> scalar.Raw:
        return self.terms.get((), 0)

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get(()) == 1

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((mono_degree(m) for m in self.terms), default=-1)

    def variables(self) -> list[VarRef]:
        keys = sorted({k for m in self.terms for k, _ in m})
        return [varref_from_key(k) for k in keys]

    def max_index(self) -> int:
        return max((k // 2 for m in self.terms for k, _ in m), default=0)

    def leading_term(self) -> tuple[Monomial, scalar.Raw]:
        if not self.terms:
            raise DivisionByZeroError("zero polynomial has no leading term")
        m = max(self.terms, key=mono_key)
        return m, self.terms[m]

    def sorted_terms(self) -> list[tuple[Monomial, scalar.Raw]]:
        return sorted(self.terms.items(), key=lambda t: mono_key(t[0]), reverse=True)

    def __len__(self) -> int:
        return len(self.terms)

    # arithmetic

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.char != self.char:
                raise DomainMismatchError(f"characteristic {self.char} vs {other.char}")
            return other
        if isinstance(other, scalar.Scalar):
            if other.char != self.char:
                raise DomainMismatchError(f"characteristic {self.char} vs {other.char}")
            return Poly.const(other.value, self.char)
        if isinstance(other, (int, Fraction)):
            return Poly.const(other, self.char)
        return NotImplemented

    def _finish(self, terms: dict) -> Poly:
        char = self.char
        out = {}
        if char:
            for m, c in terms.items():
                c %= char
                if c:
                    out[m] = c
        else:
            for m, c in terms.items():
                if c:
                    if isinstance(c, Fraction) and c.denominator == 1:
                        c = c.numerator
                    out[m] = c
        return Poly(out, char, _clean=True)

    def __add__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        res = dict(self.terms)
        for m, c in other.terms.items():
            res[m] = res.get(m, 0) + c
        return self._finish(res)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        if self.char:
            p = self.char
            return Poly({m: p - c for m, c in self.terms.items()}, p, _clean=True)
        return Poly({m: -c for m, c in self.terms.items()}, 0, _clean=True)

    def __sub__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> Poly:
        return (-self) + other

    def __mul__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return Poly.zero(self.char)
        if other.is_constant():
            return self.scale(other.constant_value())
        if self.is_constant():
            return other.scale(self.constant_value())
        res: dict = {}
        get = res.get
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                res[m] = get(m, 0) + c1 * c2
        return self._finish(res)

    __rmul__ = __mul__

    def scale(self, c: scalar.Raw) -> Poly:
        c = scalar.normalize(c, self.char)
        if c == 0:
            return Poly.zero(self.char)
        if c == 1:
            return self
        return self._finish({m: v * c for m, v in self.terms.items()})

    def mul_monomial(self, mono: Monomial, c: scalar.Raw = 1) -> Poly:
        return self._finish({mono_mul(m, mono): v * c for m, v in self.terms.items()})

    def __pow__(self, e: int) -> Poly:
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly.one(self.char)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def divide_exact(self, other: Poly) -> Poly | None:
        """Quotient ``self / other`` if the division is exact, else None."""
        other = self._coerce(other)
        if not other.terms:
            raise DivisionByZeroError("division by zero polynomial")
        if not self.terms:
            return self
        if other.is_constant():
            return self.scale(scalar.inverse(other.constant_value(), self.char))
        lm, lc = other.leading_term()
        char = self.char
        inv_lc = scalar.inverse(lc, char)
        rem = dict(self.terms)
        quot: dict = {}
        gterms = list(other.terms.items())
        while rem:
            m = max(rem, key=mono_key)
            qm = mono_div(m, lm)
            if qm is None:
                return None
            qc = scalar.normalize(rem[m] * inv_lc, char)
            quot[qm] = qc
            for gm, gc in gterms:
                mm = mono_mul(gm, qm)
                v = scalar.normalize(rem.get(mm, 0) - qc * gc, char)
                if v:
                    rem[mm] = v
                else:
                    rem.pop(mm, None)
        return Poly(quot, char, _clean=True)

    # normalization helpers used by RatFunc

    def monomial_content(self) -> Monomial:
        it = iter(self.terms)
        g = next(it, ())
        for m in it:
            if not g:
                break
            g = mono_gcd(g, m)
        return g

    def div_monomial(self, mono: Monomial) -> Poly:
        if not mono:
            return self
        return Poly({mono_div(m, mono): c for m, c in self.terms.items()}, self.char, _clean=True)

    def scalar_content(self) -> scalar.Raw:
        """Unit-normalizing content: makes the result primitive with positive (or unit) leading coefficient."""
        if not self.terms:
            return 1
        _, lc = self.leading_term()
        if self.char:
            return lc
        num_g = 0
        den_l = 1
        for c in self.terms.values():
            if isinstance(c, Fraction):
                num_g = gcd(num_g, c.numerator)
                den_l = den_l * c.denominator // gcd(den_l, c.denominator)
            else:
                num_g = gcd(num_g, c)
        content = Fraction(num_g, den_l)
        if lc < 0:
            content = -content
        return scalar.normalize(content, 0)

    # comparison / hashing / text

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.char == other.char and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.const(other, self.char).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.char, frozenset(self.terms.items())))
        return self._hash

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            neg = (not self.char) and c < 0
            mag = -c if neg else c
            if not m:
                body = scalar.format_raw(mag)
            elif mag == 1:
                body = mono_str(m)
            else:
                body = f"{scalar.format_raw(mag)}*{mono_str(m)}"
            if i == 0:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f" - {body}" if neg else f" + {body}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r}, char={self.char})"


def poly_ops(op: str, lhs: Poly, rhs: Poly | int | None = None) -> Poly:
    """Dispatch by name: add, sub, mul, neg, pow (rhs is then the exponent)."""
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "neg":
        return -lhs
    if op == "pow":
        return lhs**rhs
    raise ValueError(f"unknown op {op!r}")
