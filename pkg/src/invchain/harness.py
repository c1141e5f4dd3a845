"""Step-by-step checks of the non-noetherian chain f_1 R^G ⊂ (f_1, f_2) R^G ⊂ ...

Every function here is pure given its arguments (and, for samplers, the
``random.Random`` instance passed in).  Checks return :class:`CheckResult`
rather than raising so the CLI can report failures uniformly.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from itertools import product
from math import gcd
from typing import Dict, List, Sequence, Tuple

from .errors import InsufficientTruncationError, InternalInvariantError, InvalidIndexError, InvalidInputError
from .linalg import det, hankel, solve
from .poly import Poly
from .ratfunc import RatFunc
from .series import PSeries
from .sigma import Sigma, embed

SIZE_THRESHOLD = 64 * 1024


@dataclass
class Context:
    """Ring parameters shared by the checks: characteristic, truncation, negative-control flag."""

    char: int = 0
    trunc: int = 6
    tampered: bool = False

    def sigma(self, power: int = 1) -> Sigma:
        return Sigma(power, self.trunc, self.char, self.tampered)


@dataclass
class CheckResult:
    passed: bool
    witness: dict = field(default_factory=dict)


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def summarize(r: RatFunc | Poly, threshold: int = SIZE_THRESHOLD) -> dict:
    """Full text when small, otherwise a digest with size statistics."""
    text = str(r)
    out = {"digest": digest(text)}
    if len(text) <= threshold:
        out["text"] = text
    else:
        num = r.num if isinstance(r, RatFunc) else r
        out["degree"] = num.degree()
        out["terms"] = len(num)
    return out


# -- generators of the chain -------------------------------------------------


def make_f(n: int, trunc: int = 6, char: int = 0) -> PSeries:
    """f_n = a_n*x + b_n*y."""
    if n < 1:
        raise InvalidIndexError(f"f index must be >= 1, got {n}")
    if trunc < 1:
        raise InvalidInputError("f_n needs truncation degree >= 1")
    return PSeries({(1, 0): RatFunc.a(n, char), (0, 1): RatFunc.b(n, char)}, trunc, char)


def check_fixed_points(ctx: Context, n_max: int = 6) -> CheckResult:
    sigma = ctx.sigma()
    x, y = PSeries.x(ctx.trunc, ctx.char), PSeries.y(ctx.trunc, ctx.char)
    bad = []
    if sigma(x) != x:
        bad.append("x")
    if sigma(y) != y:
        bad.append("y")
    for n in range(1, n_max + 1):
        f = make_f(n, ctx.trunc, ctx.char)
        moved = sigma(f) - f
        if not moved.is_zero():
            bad.append({"f": n, "sigma(f)-f": str(moved)})
    return CheckResult(not bad, {"checked": ["x", "y"] + [f"f{n}" for n in range(1, n_max + 1)], "failures": bad})


def check_closed_form(ctx: Context, k_max: int, n_max: int = 2) -> CheckResult:
    """sigma^k(a_n) = a_n + k*y*f_{n+1} and sigma^k(b_n) = b_n - k*x*f_{n+1}, both modes."""
    from .sigma import sigma_power

    d, char = ctx.trunc, ctx.char
    x, y = PSeries.x(d, char), PSeries.y(d, char)
    bad = []
    for n in range(1, n_max + 1):
        f_next = make_f(n + 1, d, char)
        for k in range(-k_max, k_max + 1):
            kk = RatFunc.const(k, char)
            want_a = embed(Poly.a(n, char), d, char) + (y * f_next).scale(kk)
            want_b = embed(Poly.b(n, char), d, char) - (x * f_next).scale(kk)
            for gen, want in ((Poly.a(n, char), want_a), (Poly.b(n, char), want_b)):
                it = sigma_power(k, gen, "iterate", d, char, tampered=ctx.tampered)
                cf = sigma_power(k, gen, "closed_form", d, char, tampered=ctx.tampered)
                if it != cf or cf != want:
                    bad.append({"k": k, "gen": str(gen), "iterate": str(it), "closed_form": str(cf)})
    return CheckResult(not bad, {"k_range": [-k_max, k_max], "n_range": [1, n_max], "failures": bad[:3]})


# -- congruence mod m^2 for scalars of K --------------------------------------


def check_eq1(alpha: RatFunc, ctx: Context) -> CheckResult:
    """sigma(alpha) - alpha lies in m^2."""
    if ctx.trunc < 2:
        raise InsufficientTruncationError("need truncation >= 2")
    diff = ctx.sigma()(alpha) - embed(alpha, ctx.trunc, ctx.char)
    low = diff.mod_m_power(2)
    wit = {"alpha": str(alpha), "order": diff.order() if diff.order() != float("inf") else "inf"}
    if not low.is_zero():
        wit["low_order_part"] = str(low)
        return CheckResult(False, wit)
    return CheckResult(True, wit)


def degree_two_part(alpha: RatFunc, ctx: Context) -> Dict[Tuple[int, int], RatFunc]:
    diff = ctx.sigma()(alpha) - embed(alpha, ctx.trunc, ctx.char)
    return {ij: diff.coeff(*ij) for ij in ((2, 0), (1, 1), (0, 2))}


def random_poly(rng: random.Random, char: int, window: int = 4, max_deg: int = 2, max_terms: int = 3) -> Poly:
    p = Poly.zero(char)
    for _ in range(rng.randint(1, max_terms)):
        c = rng.randint(-9, 9) or 1
        if char:
            c %= char
            c = c or 1
        m = Poly.const(c, char)
        for _ in range(rng.randint(0, max_deg)):
            idx = rng.randint(1, window)
            m = m * (Poly.a(idx, char) if rng.random() < 0.5 else Poly.b(idx, char))
        p = p + m
    return p


def random_alpha(rng: random.Random, char: int, window: int = 4) -> RatFunc:
    num = random_poly(rng, char, window)
    den = Poly.zero(char)
    while den.is_zero():
        den = random_poly(rng, char, window)
    return RatFunc(num, den)


# -- invariant samples and the (x^2, y^2) congruence ---------------------------


@dataclass
class InvariantSample:
    """An element of R^G built as an F-polynomial in x, y, f_1..f_w.

    ``recipe`` maps exponent tuples over ``(x, y, f_1, ..., f_w)`` to raw scalars.
    """

    recipe: Dict[Tuple[int, ...], int]
    value: PSeries
    width: int

    @classmethod
    def build(cls, recipe: Dict[Tuple[int, ...], int], ctx: Context, width: int = 4) -> InvariantSample:
        d, char = ctx.trunc, ctx.char
        gens = [PSeries.x(d, char), PSeries.y(d, char)] + [make_f(n, d, char) for n in range(1, width + 1)]
        value = PSeries.zero(d, char)
        for exps, c in recipe.items():
            term = PSeries.const(RatFunc.const(c, char), d)
            for g, e in zip(gens, exps):
                if e:
                    term = term * g**e
            value = value + term
        if ctx.sigma()(value) != value:
            raise InternalInvariantError(f"sample {cls.render(recipe, width, char)} is not sigma-invariant")
        return cls(dict(recipe), value, width)

    @staticmethod
    def render(recipe, width: int, char: int = 0) -> str:
        names = ["x", "y"] + [f"f{n}" for n in range(1, width + 1)]
        parts = []
        for exps, c in sorted(recipe.items(), key=lambda t: (sum(t[0]), t[0])):
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e)
            parts.append(str(c) if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(parts) or "0"

    def __str__(self) -> str:
        return self.render(self.recipe, self.width, self.value.char)


def random_invariant(rng: random.Random, ctx: Context, width: int = 4, max_deg: int = 3) -> InvariantSample:
    nvars = 2 + width
    exps_all = [e for e in product(range(max_deg + 1), repeat=nvars) if sum(e) <= max_deg]
    recipe: Dict[Tuple[int, ...], int] = {}
    for _ in range(rng.randint(1, 4)):
        c = rng.randint(-5, 5) or 1
        if ctx.char:
            c = c % ctx.char or 1
        recipe[rng.choice(exps_all)] = c
    return InvariantSample.build(recipe, ctx, width)


def check_eq2(r: InvariantSample, ctx: Context) -> CheckResult:
    """sigma(rbar) = rbar mod (x^2, y^2), rbar the constant term of an invariant."""
    rbar = r.value.constant_term()
    diff = (ctx.sigma()(rbar) - embed(rbar, ctx.trunc, ctx.char)).mod_x2_y2()
    wit = {"recipe": str(r), "rbar": str(rbar)}
    if not diff.is_zero():
        wit["residue"] = str(diff)
    return CheckResult(diff.is_zero(), wit)


# -- membership in (f_1, f_2)R with non-invariant coefficients -----------------


@dataclass
class CramerMembership:
    t: int
    r1: RatFunc
    r2: RatFunc
    identity_holds: bool
    moved: List[dict]  # summaries of sigma(r_i) - r_i
    invariant: List[bool]


def express_f_in_ideal(t: int, ctx: Context) -> CramerMembership:
    """Write f_t = r1*f_1 + r2*f_2 over K and check that r1, r2 are not sigma-fixed."""
    if t < 3:
        raise InvalidIndexError(f"t must be >= 3, got {t}")
    char, d = ctx.char, ctx.trunc
    a = lambda i: Poly.a(i, char)  # noqa: E731
    b = lambda i: Poly.b(i, char)  # noqa: E731
    delta = a(1) * b(2) - a(2) * b(1)
    r1 = RatFunc(a(t) * b(2) - b(t) * a(2), delta)
    r2 = RatFunc(a(1) * b(t) - a(t) * b(1), delta)
    combo = make_f(1, d, char).scale(r1) + make_f(2, d, char).scale(r2)
    holds = combo == make_f(t, d, char)
    sigma = ctx.sigma()
    moved, inv = [], []
    for r in (r1, r2):
        diff = sigma(r) - embed(r, d, char)
        inv.append(diff.is_zero())
        moved.append({"order": diff.order() if not diff.is_zero() else "inf",
                      "xy": summarize(diff.coeff(1, 1)) if d >= 2 else None,
                      "digest": digest(str(diff))})
    return CramerMembership(t, r1, r2, holds, moved, inv)


def check_membership(target: PSeries, gens: Sequence[PSeries], coeffs: Sequence[RatFunc]) -> bool:
    total = PSeries.zero(target.trunc, target.char)
    for g, c in zip(gens, coeffs):
        total = total + g.scale(c)
    return total == target


# -- linear relations among the a_n and the sigma step ------------------------


@dataclass
class LinearRelation:
    """The claim a_{n+m+1} = sum_k coeffs[k-1] * a_{k+m}, k = 1..n."""

    depth: int
    shift: int
    coeffs: Tuple[RatFunc, ...]

    def __post_init__(self):
        if self.depth < 1:
            raise InvalidInputError("relation depth must be >= 1")
        if self.shift < 0:
            raise InvalidInputError("relation shift must be >= 0")
        if len(self.coeffs) != self.depth:
            raise InvalidInputError(f"{len(self.coeffs)} coefficients for depth {self.depth}")
        self.coeffs = tuple(self.coeffs)

    @property
    def target(self) -> int:
        return self.depth + self.shift + 1

    @property
    def char(self) -> int:
        return self.coeffs[0].char

    def rhs(self) -> RatFunc:
        acc = RatFunc.zero(self.char)
        for k, c in enumerate(self.coeffs, start=1):
            acc = acc + c * RatFunc.a(k + self.shift, self.char)
        return acc

    def defect(self) -> RatFunc:
        return RatFunc.a(self.target, self.char) - self.rhs()

    @property
    def holds_exactly(self) -> bool:
        return self.defect().is_zero()

    def shifted(self) -> LinearRelation:
        return LinearRelation(self.depth, self.shift + 1, self.coeffs)

    def to_line(self) -> str:
        body = "; ".join(str(c) for c in self.coeffs)
        return f"relation char={self.char} n={self.depth} m={self.shift} coeffs=[{body}]"

    @classmethod
    def from_line(cls, line: str) -> LinearRelation:
        head, _, rest = line.strip().partition(" coeffs=[")
        fields = dict(kv.split("=") for kv in head.split()[1:])
        char = int(fields["char"])
        coeffs = [RatFunc.parse(c, char) for c in rest.rstrip("]").split("; ")]
        return cls(int(fields["n"]), int(fields["m"]), tuple(coeffs))

    def __str__(self) -> str:
        terms = " + ".join(f"({c})*a{k + self.shift}" for k, c in enumerate(self.coeffs, start=1))
        return f"a{self.target} = {terms}"


def extract_constant_relation(t: int, coeffs: Sequence[RatFunc]) -> LinearRelation:
    """The x-coefficient of f_t = sum r_k f_k, read at constant terms: a_t = sum rbar_k a_k."""
    if len(coeffs) != t - 1:
        raise InvalidInputError(f"need {t - 1} coefficients for target a{t}, got {len(coeffs)}")
    return LinearRelation(t - 1, 0, tuple(coeffs))


@dataclass
class StepResult:
    next: LinearRelation
    pollution: Tuple[RatFunc, ...]
    constants_match: bool
    full_identity_holds: bool
    engine_consistent: bool

    @property
    def pollution_free(self) -> bool:
        return all(p.is_zero() for p in self.pollution)


def sigma_step(rel: LinearRelation, ctx: Context) -> StepResult:
    """Apply sigma to a relation, reduce mod (x^2, y^2) and read off the xy-coefficient.

    Writing sigma(c_k) = c_k + lam_k*xy mod (x^2, y^2), the xy part gives
    a_{t+1} = sum c_k a_{k+m+1} + sum lam_k a_{k+m}; the first sum alone is
    the shifted relation returned as ``next``.
    """
    if ctx.trunc < 4:
        raise InsufficientTruncationError(f"sigma_step needs truncation >= 4, got {ctx.trunc}")
    sigma = ctx.sigma()
    d, char, m = ctx.trunc, ctx.char, rel.shift
    lhs = sigma(Poly.a(rel.target, char)).mod_x2_y2()
    rhs = PSeries.zero(d, char)
    pollution = []
    for k, c in enumerate(rel.coeffs, start=1):
        sc = sigma(c)
        rhs = rhs + sc * sigma(Poly.a(k + m, char))
        moved = (sc - embed(c, d, char)).mod_x2_y2()
        pollution.append(moved.coeff(1, 1))
    rhs = rhs.mod_x2_y2()
    constants_match = lhs.constant_term().equal(rhs.constant_term())
    predicted = RatFunc.zero(char)
    for k, (c, lam) in enumerate(zip(rel.coeffs, pollution), start=1):
        predicted = predicted + c * RatFunc.a(k + m + 1, char) + lam * RatFunc.a(k + m, char)
    full = lhs.coeff(1, 1).equal(predicted)
    consistent = rhs.coeff(1, 1).equal(predicted)
    return StepResult(rel.shifted(), tuple(pollution), constants_match, full, consistent)


# -- finite chain certificates ---------------------------------------------------


@dataclass
class ChainCertificate:
    depth: int
    char: int
    hankel_det: RatFunc
    cstar: Tuple[RatFunc, ...]
    residual: RatFunc
    oracle_agrees: bool | None = None

    @property
    def cleared_residual(self) -> Poly:
        return self.residual.num

    def cstar_solves(self) -> bool:
        n = self.depth
        for m in range(n):
            rel = LinearRelation(n, m, self.cstar)
            if not rel.holds_exactly:
                return False
        return True

    def residual_matches(self) -> bool:
        return LinearRelation(self.depth, self.depth, self.cstar).defect().equal(self.residual)

    def verify(self) -> bool:
        return (not self.hankel_det.is_zero() and not self.residual.is_zero()
                and self.cstar_solves() and self.residual_matches())

    def to_dict(self, threshold: int = SIZE_THRESHOLD) -> dict:
        return {
            "depth": self.depth,
            "char": self.char,
            "hankel_det": summarize(self.hankel_det, threshold),
            "cstar": [summarize(c, threshold) for c in self.cstar],
            "residual": summarize(self.residual, threshold),
            "cleared_residual": summarize(self.cleared_residual, threshold),
            "det_nonzero": not self.hankel_det.is_zero(),
            "residual_nonzero": not self.residual.is_zero(),
            "oracle_agrees": self.oracle_agrees,
        }

    def to_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_line(cls, line: str) -> ChainCertificate:
        data = json.loads(line)
        char = data["char"]

        def load(entry):
            if "text" not in entry:
                raise InvalidInputError("certificate stores only a digest; recompute to verify")
            return RatFunc.parse(entry["text"], char)

        return cls(data["depth"], char, load(data["hankel_det"]),
                   tuple(load(c) for c in data["cstar"]), load(data["residual"]), data.get("oracle_agrees"))


def chain_certificate(n: int, char: int = 0, oracle: bool = False) -> ChainCertificate:
    """Show a_{m+n+1} = sum c_k a_{k+m} (m = 0..n) has no solution c in K.

    The first n constraints form a Hankel system with a unique solution c*;
    the (n+1)-th constraint then leaves a nonzero residual.
    """
    if n < 1:
        raise InvalidInputError(f"depth must be >= 1, got {n}")
    h = hankel(1, n, char)
    rhs = [RatFunc.a(n + m + 1, char) for m in range(n)]
    d = det(h)
    if d.is_zero():
        raise InternalInvariantError(f"Hankel determinant vanished at depth {n}")
    cstar = tuple(solve(h, rhs))
    residual = LinearRelation(n, n, cstar).defect()
    if residual.is_zero():
        raise InternalInvariantError(f"residual vanished at depth {n}")
    agrees = None
    if oracle:
        agrees = det(h, "naive").equal(d) and all(
            u.equal(v) for u, v in zip(solve(h, rhs, "naive"), cstar))
    return ChainCertificate(n, char, d, cstar, residual, agrees)


# -- invariants of a discrete valuation ring ---------------------------------------


@dataclass
class DvrClass:
    kind: str  # "field" or "dvr"
    generator: int | None = None
    normalized: Tuple[int, ...] = ()


def dvr_classify(values) -> DvrClass:
    """Classify the value group of invariants from sampled valuations."""
    vals = sorted(set(values))
    if not vals:
        raise InvalidInputError("need at least one valuation")
    if any((not isinstance(v, int)) or v < 0 for v in vals):
        raise InvalidInputError("valuations must be nonnegative integers")
    g = 0
    for v in vals:
        g = gcd(g, v)
    if g == 0:
        return DvrClass("field")
    return DvrClass("dvr", g, tuple(v // g for v in vals))
