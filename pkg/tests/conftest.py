import random
import re

import pytest
import sympy

from invchain.poly import Poly
from invchain.ratfunc import RatFunc
from invchain.series import PSeries

X, Y, T = sympy.symbols("x y t")


def to_sympy(r):
    """Convert a Poly/RatFunc to a sympy expression through the canonical text."""
    return sympy.sympify(re.sub(r"\^", "**", str(r)))


def sym(name):
    return sympy.Symbol(name)


def sympy_sigma_coeffs(expr, k=1, trunc=2, window=12):
    """Independent sigma^k: substitute generator images, expand in a scaling parameter.

    Returns {(i, j): sympy expr} for i + j <= trunc, computed entirely in sympy.
    """
    subs = {}
    for n in range(1, window + 1):
        an, bn = sym(f"a{n}"), sym(f"b{n}")
        an1, bn1 = sym(f"a{n + 1}"), sym(f"b{n + 1}")
        subs[an] = an + k * T**2 * (an1 * X * Y + bn1 * Y**2)
        subs[bn] = bn - k * T**2 * (an1 * X**2 + bn1 * X * Y)
    img = expr.xreplace(subs)
    ser = sympy.series(img, T, 0, trunc + 1).removeO()
    ser = sympy.expand(ser)
    out = {}
    for deg in range(trunc + 1):
        part = ser.coeff(T, deg)
        for i in range(deg + 1):
            j = deg - i
            c = sympy.Poly(part, X, Y).coeff_monomial(X**i * Y**j)
            out[(i, j)] = sympy.cancel(c)
    return out


def series_to_dict(s: PSeries):
    return {ij: to_sympy(c) for ij, c in s.coeffs.items()}


def rand_poly(rng: random.Random, char: int, window: int = 3, max_deg: int = 2, max_terms: int = 3) -> Poly:
    p = Poly.zero(char)
    for _ in range(rng.randint(1, max_terms)):
        m = Poly.const(rng.randint(-6, 6) or 1, char)
        for _ in range(rng.randint(0, max_deg)):
            i = rng.randint(1, window)
            m = m * (Poly.a(i, char) if rng.random() < 0.5 else Poly.b(i, char))
        p = p + m
    return p


def rand_ratfunc(rng: random.Random, char: int, window: int = 3) -> RatFunc:
    den = Poly.zero(char)
    while den.is_zero():
        den = rand_poly(rng, char, window)
    return RatFunc(rand_poly(rng, char, window), den)


def rand_nonzero_ratfunc(rng, char, window=3):
    r = rand_ratfunc(rng, char, window)
    while r.is_zero():
        r = rand_ratfunc(rng, char, window)
    return r


def rand_series(rng: random.Random, d: int, char: int, density: float = 0.4, unit: bool = False) -> PSeries:
    """Random series whose coefficients share one denominator (or none).

    Series arising from sigma have this shape; independent denominators per
    coefficient make gcd-free arithmetic grow without bound.
    """
    den = Poly.one(char)
    if rng.random() < 0.6:
        den = Poly.zero(char)
        while den.is_zero():
            den = rand_poly(rng, char, window=2, max_deg=1, max_terms=2)
    coeffs = {}
    for i in range(d + 1):
        for j in range(d + 1 - i):
            if rng.random() < density:
                coeffs[(i, j)] = RatFunc(rand_poly(rng, char, window=2), den if rng.random() < 0.5 else Poly.one(char))
    if unit:
        num = Poly.zero(char)
        while num.is_zero():
            num = rand_poly(rng, char, window=2)
        coeffs[(0, 0)] = RatFunc(num, den)
    return PSeries(coeffs, d, char)


@pytest.fixture(params=[0, 2, 3, 5], ids=lambda c: f"char{c}")
def char(request):
    return request.param
