"""Exact arithmetic for invariants of an automorphism sigma of K[[x, y]].

K is the rational function field F(a1, b1, a2, b2, ...) with F = Q or F_p.
"""

from .errors import InvchainError
from .poly import Poly
from .ratfunc import RatFunc
from .series import PSeries
from .sigma import Sigma, sigma_apply, sigma_power

__all__ = ["InvchainError", "PSeries", "Poly", "RatFunc", "Sigma", "sigma_apply", "sigma_power"]
