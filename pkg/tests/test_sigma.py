import random

import pytest
import sympy

from invchain.errors import BudgetError, DomainMismatchError
from invchain.harness import make_f
from invchain.poly import Poly
from invchain.ratfunc import RatFunc
from invchain.series import PSeries
from invchain.sigma import Sigma, sigma_apply, sigma_order_check, sigma_power

from conftest import rand_ratfunc, rand_series, series_to_dict, sympy_sigma_coeffs, to_sympy


def S(coeffs, d, char=0):
    return PSeries({ij: RatFunc.parse(c, char) for ij, c in coeffs.items()}, d, char)


def test_sigma_a1():
    assert sigma_apply(Sigma(1, 4), Poly.a(1)) == S({(0, 0): "a1", (1, 1): "a2", (0, 2): "b2"}, 4)


def test_sigma_fixes_x_and_f1():
    s = Sigma(1, 6)
    assert s(PSeries.x(6)) == PSeries.x(6)
    assert s(make_f(1, 6)) == make_f(1, 6)


def test_sigma_a1_over_b1_hand_expansion():
    got = Sigma(1, 2)(RatFunc.parse("a1/b1"))
    want = S({(0, 0): "a1/b1", (2, 0): "a1*a2/b1^2", (1, 1): "a2/b1 + a1*b2/b1^2", (0, 2): "b2/b1"}, 2)
    assert got == want


def test_sigma_on_fraction_matches_sympy_oracle():
    rng = random.Random(4)
    for _ in range(6):
        r = rand_ratfunc(rng, 0, window=2)
        got = series_to_dict(Sigma(1, 3)(r))
        want = sympy_sigma_coeffs(to_sympy(r), 1, 3)
        for ij, w in want.items():
            assert sympy.cancel(got.get(ij, 0) - w) == 0, (str(r), ij)


def test_truncation_mismatch():
    with pytest.raises(DomainMismatchError):
        Sigma(1, 4)(PSeries.x(5))


def test_power_two_char0():
    assert sigma_power(2, Poly.a(1), trunc=4) == S({(0, 0): "a1", (1, 1): "2*a2", (0, 2): "2*b2"}, 4)


def test_power_two_char2_is_identity():
    a1 = Poly.a(1, 2)
    for mode in ("iterate", "closed_form"):
        assert sigma_power(2, a1, mode, trunc=4) == PSeries.const(RatFunc(a1), 4)


def test_inverse_composition():
    once = sigma_power(1, Poly.a(1), trunc=6)
    assert sigma_power(-1, once, "iterate", trunc=6) == PSeries.const(RatFunc.a(1), 6)
    assert sigma_power(-1, once, "closed_form", trunc=6) == PSeries.const(RatFunc.a(1), 6)


def test_power_budget():
    with pytest.raises(BudgetError):
        sigma_power(10, Poly.a(1), limit=5)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_order_p(p):
    rep = sigma_order_check(p, p)
    assert rep.passed and rep.order == p


def test_order_infinite_char0():
    rep = sigma_order_check(0, 7)
    assert rep.passed and rep.order is None


def test_order_char2_steps():
    a1 = PSeries.const(RatFunc.a(1, 2), 6)
    s = Sigma(1, 6, 2)
    assert s(a1) != a1
    assert s(s(a1)) == a1


@pytest.mark.parametrize("char", [0, 2, 3, 5])
def test_homomorphism(char):
    rng = random.Random(20 + char)
    s = Sigma(1, 4, char)
    for _ in range(8):
        u, v = rand_series(rng, 4, char, density=0.3), rand_series(rng, 4, char, density=0.3)
        assert s(u + v) == s(u) + s(v)
        assert s(u * v) == s(u) * s(v)


@pytest.mark.parametrize("char", [0, 3])
def test_fixed_points_and_filtration(char):
    s = Sigma(1, 6, char)
    for n in range(1, 7):
        f = make_f(n, 6, char)
        assert s(f) == f
    rng = random.Random(char)
    for _ in range(10):
        u = rand_series(rng, 6, char, density=0.3)
        assert s(u).order() == u.order()


@pytest.mark.parametrize("char,kmax", [(0, 7), (2, 7), (3, 9)])
def test_mode_agreement(char, kmax):
    for gen in (Poly.a(1, char), Poly.b(2, char)):
        for k in range(-kmax, kmax + 1):
            assert sigma_power(k, gen, "iterate", 5, char) == sigma_power(k, gen, "closed_form", 5, char)


def test_eq1_property_sampled():
    rng = random.Random(77)
    s = Sigma(1, 4)
    for _ in range(20):
        r = rand_ratfunc(rng, 0)
        assert (s(r) - PSeries.const(r, 4)).order() >= 2
