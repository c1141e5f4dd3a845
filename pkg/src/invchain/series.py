"""Power series in x, y over K, truncated at a fixed total degree d.

A :class:`PSeries` of truncation ``d`` represents an element of
``K[[x, y]] / m^(d+1)``; every product is truncated back to degree ``d``.
"""

from __future__ import annotations

import math
from typing import Dict, Mapping, Tuple

from .errors import (
    CannotExtendError,
    DomainMismatchError,
    IncompleteSubstitutionError,
    InvalidInputError,
    NonUnitError,
)
from .poly import Poly, VarRef, varref_from_key
from .ratfunc import RatFunc, common_multiple

Exp = Tuple[int, int]


def _sort_key(ij: Exp):
    return (ij[0] + ij[1], ij[0])


class PSeries:
    __slots__ = ("trunc", "char", "coeffs")

    def __init__(self, coeffs: Mapping[Exp, RatFunc] | None = None, trunc: int = 6, char: int = 0):
        if trunc < 0:
            raise InvalidInputError(f"truncation degree must be >= 0, got {trunc}")
        self.trunc = trunc
        self.char = char
        self.coeffs: Dict[Exp, RatFunc] = {}
        for (i, j), c in (coeffs or {}).items():
            if i < 0 or j < 0:
                raise InvalidInputError(f"negative exponent {(i, j)}")
            if i + j > trunc:
                continue
            if not isinstance(c, RatFunc):
                c = RatFunc(Poly.const(c, char)) if not isinstance(c, Poly) else RatFunc(c)
            if c.char != char:
                raise DomainMismatchError(f"coefficient characteristic {c.char} vs {char}")
            if not c.is_zero():
                self.coeffs[(i, j)] = c

    # constructors

    @classmethod
    def zero(cls, trunc: int, char: int = 0) -> PSeries:
        return cls(None, trunc, char)

    @classmethod
    def const(cls, c, trunc: int, char: int | None = None) -> PSeries:
        if isinstance(c, RatFunc):
            char = c.char
        elif isinstance(c, Poly):
            char = c.char
            c = RatFunc(c)
        else:
            char = char or 0
            c = RatFunc.const(c, char)
        return cls({(0, 0): c}, trunc, char)

    @classmethod
    def one(cls, trunc: int, char: int = 0) -> PSeries:
        return cls.const(RatFunc.one(char), trunc)

    @classmethod
    def monomial(cls, i: int, j: int, trunc: int, char: int = 0, coeff=None) -> PSeries:
        c = coeff if coeff is not None else RatFunc.one(char)
        return cls({(i, j): c}, trunc, char)

    @classmethod
    def x(cls, trunc: int, char: int = 0) -> PSeries:
        return cls.monomial(1, 0, trunc, char)

    @classmethod
    def y(cls, trunc: int, char: int = 0) -> PSeries:
        return cls.monomial(0, 1, trunc, char)

    # inspection

    def constant_term(self) -> RatFunc:
        return self.coeffs.get((0, 0)) or RatFunc.zero(self.char)

    def coeff(self, i: int, j: int) -> RatFunc:
        if i + j > self.trunc:
            raise InvalidInputError(f"coefficient {(i, j)} beyond truncation {self.trunc}")
        return self.coeffs.get((i, j)) or RatFunc.zero(self.char)

    def order(self) -> float:
        """Least total degree of a nonzero term; ``math.inf`` for zero."""
        return min((i + j for i, j in self.coeffs), default=math.inf)

    def is_zero(self) -> bool:
        return not self.coeffs

    def max_index(self) -> int:
        return max((c.max_index() for c in self.coeffs.values()), default=0)

    def inspect(self, what: str, i: int = 0, j: int = 0):
        if what == "constant_term":
            return self.constant_term()
        if what == "coeff":
            return self.coeff(i, j)
        if what == "order":
            return self.order()
        raise ValueError(f"unknown inspection {what!r}")

    # arithmetic

    def _check(self, other) -> PSeries:
        if isinstance(other, PSeries):
            if other.trunc != self.trunc:
                raise DomainMismatchError(f"truncation {self.trunc} vs {other.trunc}")
            if other.char != self.char:
                raise DomainMismatchError(f"characteristic {self.char} vs {other.char}")
            return other
        if isinstance(other, (RatFunc, Poly, int)):
            if isinstance(other, (RatFunc, Poly)) and other.char != self.char:
                raise DomainMismatchError(f"characteristic {self.char} vs {other.char}")
            return PSeries.const(other if not isinstance(other, int) else RatFunc.const(other, self.char), self.trunc)
        return NotImplemented

    def _new(self, coeffs: Dict[Exp, RatFunc]) -> PSeries:
        out = PSeries.__new__(PSeries)
        out.trunc = self.trunc
        out.char = self.char
        out.coeffs = {k: v for k, v in coeffs.items() if not v.is_zero()}
        return out

    def __add__(self, other) -> PSeries:
        other = self._check(other)
        if other is NotImplemented:
            return other
        res = dict(self.coeffs)
        for k, c in other.coeffs.items():
            res[k] = res[k] + c if k in res else c
        return self._new(res)

    __radd__ = __add__

    def __neg__(self) -> PSeries:
        return self._new({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other) -> PSeries:
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> PSeries:
        return (-self) + other

    def __mul__(self, other) -> PSeries:
        other = self._check(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return PSeries.zero(self.trunc, self.char)
        den_a, chain_a = self._common_den()
        den_b, chain_b = other._common_den()
        if not (chain_a and chain_b):
            # unrelated denominators: multiply numerators over the common denominator
            prod = _poly_mul(self._numerators(den_a), other._numerators(den_b), self.trunc)
            den = den_a * den_b
            return self._new({k: RatFunc(v, den) for k, v in prod.items()})
        d = self.trunc
        buckets: Dict[Exp, list] = {}
        for (i1, j1), c1 in self.coeffs.items():
            room = d - i1 - j1
            for (i2, j2), c2 in other.coeffs.items():
                if i2 + j2 <= room:
                    buckets.setdefault((i1 + i2, j1 + j2), []).append(c1 * c2)
        return self._new({k: _sum(v) for k, v in buckets.items()})

    def _common_den(self) -> tuple[Poly, bool]:
        """A common denominator, and whether the denominators form a divisibility chain."""
        return common_multiple(list({c.den: None for c in self.coeffs.values()}))

    def _numerators(self, den: Poly) -> Dict[Exp, Poly]:
        return {ij: c.num * (den if c.den.is_one() else den.divide_exact(c.den)) for ij, c in self.coeffs.items()}

    __rmul__ = __mul__

    def scale(self, c: RatFunc) -> PSeries:
        if c.is_zero():
            return PSeries.zero(self.trunc, self.char)
        return self._new({k: v * c for k, v in self.coeffs.items()})

    def __pow__(self, e: int) -> PSeries:
        if e < 0:
            return self.invert_unit() ** -e
        result = PSeries.one(self.trunc, self.char)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def invert_unit(self) -> PSeries:
        """Inverse of a unit as ``c^-1 * sum_k (1 - c^-1 u)^k``, c the constant term.

        Computed over polynomials: with u = U/D and c0 the constant term of U,
        1 - U/c0 = W/c0 where W = c0 - U has order >= 1, so the coefficient of
        x^i y^j is D * sum_k W^k[i,j] * c0^(K-k) / c0^(K+1), K the largest k
        contributing to that coefficient.
        """
        if self.constant_term().is_zero():
            raise NonUnitError("series with zero constant term is not a unit")
        den, _ = self._common_den()
        nums = self._numerators(den)
        c0 = nums[(0, 0)]
        w = {ij: -v for ij, v in nums.items() if ij != (0, 0)}
        one = Poly.one(self.char)
        powers = [{(0, 0): one}]
        while True:
            nxt = _poly_mul(powers[-1], w, self.trunc)
            if not nxt:
                break
            powers.append(nxt)
        out = {}
        c0_pows = [one]
        for ij in {ij for pw in powers for ij in pw}:
            ks = [k for k, pw in enumerate(powers) if ij in pw]
            top = max(ks)
            while len(c0_pows) <= top + 1:
                c0_pows.append(c0_pows[-1] * c0)
            acc = Poly.zero(self.char)
            for k in ks:
                acc = acc + powers[k][ij] * c0_pows[top - k]
            out[ij] = RatFunc(acc * den, c0_pows[top + 1])
        return self._new(out)

    # ideal reductions

    def mod_m_power(self, k: int) -> PSeries:
        return self._new({ij: c for ij, c in self.coeffs.items() if ij[0] + ij[1] < k})

    def mod_x2_y2(self) -> PSeries:
        return self._new({ij: c for ij, c in self.coeffs.items() if ij[0] < 2 and ij[1] < 2})

    def retrunc(self, d: int) -> PSeries:
        if d > self.trunc:
            raise CannotExtendError(f"cannot raise truncation {self.trunc} to {d}")
        if d < 0:
            raise InvalidInputError(f"truncation degree must be >= 0, got {d}")
        return PSeries({ij: c for ij, c in self.coeffs.items() if ij[0] + ij[1] <= d}, d, self.char)

    def reduce(self, ideal: str, k: int | None = None) -> PSeries:
        """Reduce modulo ``"m^k"``, ``"x2y2"`` (the ideal (x^2, y^2)) or ``"retrunc"`` to degree k."""
        if ideal in ("m", "m^k"):
            return self.mod_m_power(k)
        if ideal in ("x2y2", "(x^2,y^2)"):
            return self.mod_x2_y2()
        if ideal == "retrunc":
            return self.retrunc(k)
        raise ValueError(f"unknown ideal {ideal!r}")

    # comparison / text

    def __eq__(self, other) -> bool:
        if not isinstance(other, PSeries):
            return NotImplemented
        if other.trunc != self.trunc or other.char != self.char:
            return False
        if self.coeffs.keys() != other.coeffs.keys():
            return False
        return all(c.equal(other.coeffs[k]) for k, c in self.coeffs.items())

    __hash__ = None

    def __str__(self) -> str:
        body = ", ".join(f"({i},{j}): {self.coeffs[(i, j)]}" for i, j in sorted(self.coeffs, key=_sort_key))
        return "{" + body + "}"

    def __repr__(self) -> str:
        return f"PSeries({self}, trunc={self.trunc}, char={self.char})"


def _sum(items: list[RatFunc]) -> RatFunc:
    # group by denominator first so equal denominators add without cross-multiplication
    if len(items) == 1:
        return items[0]
    groups: Dict[Poly, Poly] = {}
    for r in items:
        groups[r.den] = groups[r.den] + r.num if r.den in groups else r.num
    parts = [RatFunc(n, d) for d, n in groups.items()]
    total = parts[0]
    for r in parts[1:]:
        total = total + r
    return total


def _poly_mul(a: Dict[Exp, Poly], b: Dict[Exp, Poly], d: int) -> Dict[Exp, Poly]:
    out: Dict[Exp, Poly] = {}
    for (i1, j1), p1 in a.items():
        room = d - i1 - j1
        for (i2, j2), p2 in b.items():
            if i2 + j2 <= room:
                k = (i1 + i2, j1 + j2)
                out[k] = out[k] + p1 * p2 if k in out else p1 * p2
    return {k: v for k, v in out.items() if not v.is_zero()}


def series_ops(op: str, lhs: PSeries, rhs: PSeries | None = None) -> PSeries:
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "neg":
        return -lhs
    raise ValueError(f"unknown op {op!r}")


def series_invert_unit(u: PSeries) -> PSeries:
    return u.invert_unit()


def series_reduce(s: PSeries, ideal: str, k: int | None = None) -> PSeries:
    return s.reduce(ideal, k)


def series_inspect(s: PSeries, what: str, i: int = 0, j: int = 0):
    return s.inspect(what, i, j)


def poly_substitute(p: Poly, images: Mapping[VarRef, PSeries], trunc: int) -> PSeries:
    """Evaluate ``p`` at the given series images, truncating at total degree ``trunc``."""
    by_key: Dict[int, PSeries] = {}
    for ref, img in images.items():
        if img.trunc != trunc:
            raise DomainMismatchError(f"image of {ref} has truncation {img.trunc}, expected {trunc}")
        if img.char != p.char:
            raise DomainMismatchError(f"image of {ref} has characteristic {img.char}, expected {p.char}")
        by_key[ref.key] = img
    powers: Dict[Tuple[int, int], PSeries] = {}

    def power(key: int, e: int) -> PSeries:
        got = powers.get((key, e))
        if got is None:
            img = by_key.get(key)
            if img is None:
                raise IncompleteSubstitutionError(f"no image for {varref_from_key(key)}")
            got = img if e == 1 else power(key, e - 1) * img
            powers[(key, e)] = got
        return got

    for m in p.terms:
        for key, _ in m:
            if key not in by_key:
                raise IncompleteSubstitutionError(f"no image for {varref_from_key(key)}")

    buckets: Dict[Exp, list] = {}
    for m, c in p.terms.items():
        term = None
        for key, e in m:
            f = power(key, e)
            term = f if term is None else term * f
        cst = RatFunc(Poly.const(c, p.char))
        if term is None:
            buckets.setdefault((0, 0), []).append(cst)
            continue
        for ij, v in term.coeffs.items():
            buckets.setdefault(ij, []).append(v * cst)
    return PSeries({k: _sum(v) for k, v in buckets.items()}, trunc, p.char)
