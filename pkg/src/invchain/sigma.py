"""The automorphism sigma of K[[x, y]] and its integer powers.

sigma^k fixes F, x and y and sends

    a_n -> a_n + k*y*f_{n+1} = a_n + k*a_{n+1}*x*y + k*b_{n+1}*y^2
    b_n -> b_n - k*x*f_{n+1} = b_n - k*a_{n+1}*x^2 - k*b_{n+1}*x*y

with f_n = a_n*x + b_n*y.  On a fraction g/h it acts as sigma(g) * sigma(h)^-1,
where sigma(h) is a unit because its constant term is h.  On a series it acts
coefficient-wise, since x and y are fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Union

from .errors import BudgetError, DomainMismatchError, InternalInvariantError, InvalidInputError, NonUnitError
from .poly import Poly, VarRef, varref_from_key
from .ratfunc import RatFunc
from .series import PSeries, poly_substitute

Value = Union[Poly, RatFunc, PSeries, int]

DEFAULT_POWER_LIMIT = 4096


@dataclass
class Sigma:
    """sigma^power acting on series truncated at ``trunc`` in characteristic ``char``.

    ``tampered`` flips the sign of the b_n image; it exists only as a negative
    control that the verification suites must detect.
    """

    power: int = 1
    trunc: int = 6
    char: int = 0
    tampered: bool = False
    _images: Dict[int, PSeries] = field(default_factory=dict, repr=False, compare=False)

    @property
    def effective_power(self) -> int:
        return self.power % self.char if self.char else self.power

    def with_trunc(self, trunc: int) -> Sigma:
        return Sigma(self.power, trunc, self.char, self.tampered)

    def inverse(self) -> Sigma:
        return Sigma(-self.power, self.trunc, self.char, self.tampered)

    def image(self, ref: VarRef) -> PSeries:
        """Image of the generator ``ref`` as a series."""
        got = self._images.get(ref.key)
        if got is not None:
            return got
        d, char = self.trunc, self.char
        k = RatFunc.const(self.effective_power, char)
        nxt_a = RatFunc.a(ref.index + 1, char)
        nxt_b = RatFunc.b(ref.index + 1, char)
        if ref.family == "a":
            coeffs = {(0, 0): RatFunc.a(ref.index, char), (1, 1): k * nxt_a, (0, 2): k * nxt_b}
        else:
            sign = k if self.tampered else -k
            coeffs = {(0, 0): RatFunc.b(ref.index, char), (2, 0): sign * nxt_a, (1, 1): sign * nxt_b}
        got = self._images[ref.key] = PSeries(coeffs, d, char)
        return got

    def __call__(self, v: Value) -> PSeries:
        return sigma_apply(self, v)


def sigma_apply(e: Sigma, v: Value) -> PSeries:
    """Apply ``e`` to a polynomial, an element of K, or a truncated series."""
    if isinstance(v, int):
        return PSeries.const(RatFunc.const(v, e.char), e.trunc)
    if v.char != e.char:
        raise DomainMismatchError(f"characteristic {v.char} vs {e.char}")
    if isinstance(v, Poly):
        return _apply_poly(e, v)
    if isinstance(v, RatFunc):
        return _apply_ratfunc(e, v)
    if isinstance(v, PSeries):
        if v.trunc != e.trunc:
            raise DomainMismatchError(f"truncation {v.trunc} vs {e.trunc}")
        return _apply_series(e, v)
    raise TypeError(f"cannot apply sigma to {type(v).__name__}")


def _apply_poly(e: Sigma, p: Poly) -> PSeries:
    if p.is_constant() or e.effective_power == 0 and not e.tampered:
        return PSeries.const(RatFunc(p), e.trunc)
    keys = {k for m in p.terms for k, _ in m}
    images = {}
    for key in keys:
        ref = varref_from_key(key)
        images[ref] = e.image(ref)
    return poly_substitute(p, images, e.trunc)


def _apply_ratfunc(e: Sigma, r: RatFunc) -> PSeries:
    top = _apply_poly(e, r.num)
    if r.den.is_one():
        return top
    bottom = _apply_poly(e, r.den)
    try:
        inv = bottom.invert_unit()
    except NonUnitError as exc:
        raise InternalInvariantError(f"sigma({r.den}) has zero constant term") from exc
    return top * inv


def _apply_series(e: Sigma, s: PSeries) -> PSeries:
    out = PSeries.zero(s.trunc, s.char)
    by_room: Dict[int, Sigma] = {}
    for (i, j), c in s.coeffs.items():
        room = s.trunc - i - j
        sub = by_room.get(room)
        if sub is None:
            sub = by_room[room] = e if room == e.trunc else e.with_trunc(room)
        img = sigma_apply(sub, c)
        shifted = PSeries({(i + a, j + b): v for (a, b), v in img.coeffs.items()}, s.trunc, s.char)
        out = out + shifted
    return out


def embed(v: Value, trunc: int, char: int) -> PSeries:
    if isinstance(v, PSeries):
        return v
    if isinstance(v, int):
        return PSeries.const(RatFunc.const(v, char), trunc)
    if isinstance(v, Poly):
        v = RatFunc(v)
    return PSeries.const(v, trunc)


def sigma_power(
    k: int,
    v: Value,
    mode: str = "closed_form",
    trunc: int = 6,
    char: Optional[int] = None,
    limit: int = DEFAULT_POWER_LIMIT,
    tampered: bool = False,
) -> PSeries:
    """sigma^k(v) by repeated application (``iterate``) or the direct power-k table (``closed_form``)."""
    if char is None:
        char = 0 if isinstance(v, int) else v.char
    if abs(k) > limit:
        raise BudgetError(f"|k| = {abs(k)} exceeds power limit {limit}")
    if mode == "closed_form":
        return sigma_apply(Sigma(k, trunc, char, tampered), v)
    if mode != "iterate":
        raise InvalidInputError(f"unknown mode {mode!r}")
    step = Sigma(1 if k >= 0 else -1, trunc, char, tampered)
    out = embed(v, trunc, char)
    for _ in range(abs(k)):
        out = sigma_apply(step, out)
    return out


@dataclass
class OrderReport:
    char: int
    k_max: int
    passed: bool
    order: Optional[int]  # None means no k <= k_max returns to the identity
    witness: dict


def sigma_order_check(char: int, k_max: int, window: int = 3, trunc: int = 6, tampered: bool = False) -> OrderReport:
    """Check that sigma has order ``char`` (char p) or no finite order up to ``k_max`` (char 0)."""
    if char and k_max < char:
        raise InvalidInputError(f"k_max must be >= p = {char}")
    if k_max < 1:
        raise InvalidInputError("k_max must be >= 1")
    a1 = Poly.a(1, char)
    step = Sigma(1, trunc, char, tampered)
    base = embed(a1, trunc, char)
    current = base
    first_return = None
    moved = []
    limit = char if char else k_max
    for k in range(1, limit + 1):
        current = sigma_apply(step, current)
        if current == base:
            first_return = k
            break
        moved.append(k)
    if not char:
        passed = first_return is None
        return OrderReport(char, k_max, passed, None if passed else first_return,
                           {"nontrivial_k": f"1..{k_max}" if passed else f"1..{len(moved)}",
                            "returned_at": first_return})
    # sigma^p must fix every generator in the window, not just a1
    gens = [Poly.a(n, char) for n in range(1, window + 1)] + [Poly.b(n, char) for n in range(1, window + 1)]
    fixed_all = True
    bad = None
    for g in gens:
        s = embed(g, trunc, char)
        start = s
        for _ in range(char):
            s = sigma_apply(step, s)
        if s != start:
            fixed_all, bad = False, str(g)
            break
    for xy in (PSeries.x(trunc, char), PSeries.y(trunc, char)):
        if fixed_all and sigma_apply(step, xy) != xy:
            fixed_all, bad = False, str(xy)
    passed = first_return == char and fixed_all
    return OrderReport(char, k_max, passed, first_return,
                       {"first_return_on_a1": first_return, "sigma_p_fixes_window": fixed_all,
                        "window": window, "failed_generator": bad})
