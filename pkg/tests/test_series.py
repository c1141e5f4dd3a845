import math
import random

import pytest

from invchain.errors import CannotExtendError, DomainMismatchError, IncompleteSubstitutionError, NonUnitError
from invchain.poly import Poly, registry_intern
from invchain.ratfunc import RatFunc
from invchain.series import PSeries, poly_substitute, series_ops

from conftest import rand_series


def S(coeffs, d=6, char=0):
    return PSeries({ij: RatFunc.parse(c, char) if isinstance(c, str) else c for ij, c in coeffs.items()}, d, char)


def sigma_a1_image(d=4):
    return S({(0, 0): "a1", (1, 1): "a2", (0, 2): "b2"}, d)


def test_product_of_linear_forms():
    x, y = PSeries.x(2), PSeries.y(2)
    assert series_ops("mul", x + y, x - y) == x * x - y * y


def test_degree_overflow_truncates():
    d = 5
    x = PSeries.x(d)
    assert (x**d * x).is_zero()


def test_constant_plus_x():
    s = PSeries.const(RatFunc.parse("a1/b1"), 3) + PSeries.x(3)
    assert str(s) == "{(0,0): (a1)/(b1), (1,0): 1}"


def test_truncation_mismatch():
    with pytest.raises(DomainMismatchError):
        PSeries.x(3) + PSeries.x(4)


def test_geometric_series_inverse():
    u = PSeries.one(3) - PSeries.x(3)
    assert u.invert_unit() == S({(0, 0): "1", (1, 0): "1", (2, 0): "1", (3, 0): "1"}, 3)


def test_constant_inverse():
    assert PSeries.const(RatFunc.a(1), 4).invert_unit() == PSeries.const(RatFunc.parse("1/a1"), 4)


def test_non_unit():
    with pytest.raises(NonUnitError):
        PSeries.x(3).invert_unit()


def test_reduce_x2y2():
    s = S({(2, 1): "1", (1, 1): "1", (0, 3): "1"})
    assert s.reduce("x2y2") == S({(1, 1): "1"})


def test_reduce_m2():
    s = S({(0, 0): "5", (1, 0): "1", (1, 1): "1"})
    assert s.reduce("m", 2) == S({(0, 0): "5", (1, 0): "1"})


def test_retrunc():
    s = S({(0, 0): "1", (1, 0): "1", (2, 0): "1"}, 2)
    assert s.retrunc(1) == S({(0, 0): "1", (1, 0): "1"}, 1)
    with pytest.raises(CannotExtendError):
        s.retrunc(3)


def test_inspect():
    s = PSeries.const(RatFunc.parse("a1/b1"), 3) + PSeries.x(3)
    assert s.inspect("constant_term").equal(RatFunc.parse("a1/b1"))
    assert sigma_a1_image().inspect("coeff", 1, 1).equal(RatFunc.a(2))
    assert S({(2, 0): "1", (1, 1): "1"}).order() == 2
    assert PSeries.zero(4).order() == math.inf
    assert PSeries.zero(4).constant_term().is_zero()


def test_substitute_identity_image():
    img = sigma_a1_image()
    a1 = registry_intern("a", 1)
    assert poly_substitute(Poly.a(1), {a1: img}, 4) == img


def test_substitute_square():
    img = sigma_a1_image()
    a1 = registry_intern("a", 1)
    got = poly_substitute(Poly.a(1) ** 2, {a1: img}, 4)
    tail = S({(1, 1): "a2", (0, 2): "b2"}, 4)
    want = PSeries.const(RatFunc.parse("a1^2"), 4) + tail.scale(RatFunc.parse("2*a1")) + tail * tail
    assert got == want
    assert got.coeff(2, 2).equal(RatFunc.parse("a2^2"))
    assert got.coeff(0, 4).equal(RatFunc.parse("b2^2"))


def test_substitute_self_embeds():
    p = Poly.a(1) * Poly.b(2) - 3
    images = {v: PSeries.const(RatFunc(Poly.var(v.family, v.index)), 5) for v in p.variables()}
    assert poly_substitute(p, images, 5) == PSeries.const(RatFunc(p), 5)


def test_substitute_missing_image():
    with pytest.raises(IncompleteSubstitutionError):
        poly_substitute(Poly.b(1), {registry_intern("a", 1): sigma_a1_image()}, 4)


@pytest.mark.parametrize("char", [0, 3])
def test_truncation_coherence(char):
    rng = random.Random(11 + char)
    for case in range(30):
        d = rng.randint(1, 6)
        dp = rng.randint(0, d)
        s, t = rand_series(rng, d, char), rand_series(rng, d, char, unit=True)
        assert (s + t).retrunc(dp) == s.retrunc(dp) + t.retrunc(dp)
        assert (s * t).retrunc(dp) == s.retrunc(dp) * t.retrunc(dp)
        assert t.invert_unit().retrunc(dp) == t.retrunc(dp).invert_unit()


@pytest.mark.parametrize("d", range(0, 9))
def test_inverse_exact_every_d(d):
    rng = random.Random(d)
    u = rand_series(rng, d, 0, density=0.3, unit=True)
    assert u * u.invert_unit() == PSeries.one(d)


def test_x2y2_reduction_idempotent_and_linear():
    rng = random.Random(5)
    for _ in range(20):
        s, t = rand_series(rng, 4, 0), rand_series(rng, 4, 0)
        r = s.mod_x2_y2()
        assert r.mod_x2_y2() == r
        assert (s + t).mod_x2_y2() == r + t.mod_x2_y2()
        assert set(s.mod_m_power(2).coeffs) <= {(0, 0), (1, 0), (0, 1)}


def test_order_is_additive():
    rng = random.Random(9)
    for _ in range(40):
        d = 6
        s, t = rand_series(rng, d, 0), rand_series(rng, d, 0)
        if s.is_zero() or t.is_zero() or s.order() + t.order() > d:
            continue
        assert (s * t).order() == s.order() + t.order()


def test_named_series_ops():
    from invchain.series import series_inspect, series_invert_unit, series_reduce

    u = PSeries.one(4) + PSeries.x(4)
    assert series_invert_unit(u) * u == PSeries.one(4)
    assert series_reduce(u, "x2y2") == u.mod_x2_y2()
    assert series_inspect(u, "order") == 0
    assert series_inspect(u, "coeff", 1, 0).equal(RatFunc.one())
