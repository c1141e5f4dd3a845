"""Command line driver: ``invchain verify | certify | bench``.

Exit status is 0 when every check passes, 1 when a check fails (or runs over
its wall-clock budget), and 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, List, Optional

from .errors import ConfigError, InvchainError
from .harness import (
    Context,
    CheckResult,
    LinearRelation,
    chain_certificate,
    check_closed_form,
    check_eq1,
    check_eq2,
    check_fixed_points,
    degree_two_part,
    dvr_classify,
    express_f_in_ideal,
    extract_constant_relation,
    random_alpha,
    random_invariant,
    random_poly,
    sigma_step,
)
from .linalg import det, hankel
from .poly import REGISTRY, Poly
from .ratfunc import RatFunc
from .scalar import MAX_CHAR, is_prime
from .sigma import embed, sigma_order_check

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


@dataclass
class Config:
    char: int = 0
    trunc: int = 6
    depth: int = 5
    kmax: int = 7
    samples: int = 100
    seed: int = 0
    format: str = "json"
    fast_probabilistic: bool = False
    budget_s: float = 300.0
    tamper_sigma: bool = False

    def validate(self) -> Config:
        if self.char != 0 and not (self.char < MAX_CHAR and is_prime(self.char)):
            raise ConfigError(f"--char must be 0 or a prime below 2^31, got {self.char}")
        if self.trunc < 4:
            raise ConfigError(f"--trunc must be >= 4, got {self.trunc}")
        for name in ("depth", "kmax", "samples"):
            if getattr(self, name) < 1:
                raise ConfigError(f"--{name} must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("--seed must fit in an unsigned 64-bit integer")
        if self.format not in ("json", "text"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.budget_s <= 0:
            raise ConfigError("--budget must be positive")
        return self

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("tamper_sigma")
        if self.tamper_sigma:
            out["tamper_sigma"] = True
        return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="invchain", description=__doc__.splitlines()[0])
    parser.add_argument("cmd", choices=["verify", "certify", "bench"])
    parser.add_argument("--char", type=int, default=0, help="0 or a prime (default 0)")
    parser.add_argument("--trunc", type=int, default=6, help="series truncation degree, >= 4 (default 6)")
    parser.add_argument("--depth", type=int, default=5, help="largest chain depth n to certify (default 5)")
    parser.add_argument("--kmax", type=int, default=7, help="largest |k| for sigma^k checks (default 7)")
    parser.add_argument("--samples", type=int, default=100, help="random samples per property (default 100)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--format", choices=["json", "text"], default="json")
    parser.add_argument("--fast-probabilistic", action="store_true",
                        help="random-evaluation zero tests in sampled checks (never used by certify)")
    parser.add_argument("--budget", type=float, default=300.0, dest="budget_s",
                        help="wall-clock seconds allowed per check (default 300)")
    parser.add_argument("--tamper-sigma", action="store_true", help=argparse.SUPPRESS)
    return parser


def parse_config(argv: List[str]) -> tuple[str, Config]:
    """Parse command-line tokens; raises ConfigError (argparse usage errors exit 2)."""
    ns = build_parser().parse_args(argv)
    cfg = Config(ns.char, ns.trunc, ns.depth, ns.kmax, ns.samples, ns.seed, ns.format,
                 ns.fast_probabilistic, ns.budget_s, ns.tamper_sigma)
    return ns.cmd, cfg.validate()


# -- probabilistic zero test ---------------------------------------------------

_MERSENNE = 2**61 - 1


def _eval_mod(p: Poly, point: dict, q: int) -> int:
    total = 0
    for m, c in p.terms.items():
        v = c.numerator * pow(c.denominator, -1, q) if isinstance(c, Fraction) else c
        for k, e in m:
            v = v * pow(point[k], e, q)
        total = (total + v) % q
    return total


def probably_zero(r: RatFunc, rng: random.Random) -> bool:
    """Schwartz-Zippel style zero test of ``r`` at a random point mod 2^61 - 1 (char 0 only)."""
    if r.char:
        return r.is_zero()
    keys = {k for mm in r.num.terms for k, _ in mm}
    point = {k: rng.randrange(1, _MERSENNE) for k in sorted(keys)}
    return _eval_mod(r.num, point, _MERSENNE) == 0


# -- checks --------------------------------------------------------------------


@dataclass
class Check:
    id: str
    anchor: str
    run: Callable[[Config, random.Random], CheckResult]


def _ctx(cfg: Config) -> Context:
    return Context(cfg.char, cfg.trunc, cfg.tamper_sigma)


def _fixed_points(cfg, rng):
    return check_fixed_points(_ctx(cfg), 6)


def _closed_form(cfg, rng):
    k = max(cfg.kmax, 2 * cfg.char + 3) if cfg.char else cfg.kmax
    return check_closed_form(_ctx(cfg), k)


def _group_order(cfg, rng):
    rep = sigma_order_check(cfg.char, max(cfg.kmax, cfg.char), window=3, trunc=cfg.trunc,
                            tampered=cfg.tamper_sigma)
    return CheckResult(rep.passed, {"order": rep.order if rep.order else "infinite", **rep.witness})


def _eq1_random(cfg, rng):
    ctx = _ctx(cfg)
    failures, first = [], None
    for i in range(cfg.samples):
        alpha = random_alpha(rng, cfg.char)
        first = first or str(alpha)
        if cfg.fast_probabilistic:
            diff = ctx.sigma()(alpha) - embed(alpha, cfg.trunc, cfg.char)
            low = diff.mod_m_power(2)
            ok = all(probably_zero(c, rng) for c in low.coeffs.values())
            res = CheckResult(ok, {"alpha": str(alpha)})
        else:
            res = check_eq1(alpha, ctx)
        if not res.passed:
            failures.append(res.witness)
    return CheckResult(not failures, {"samples": cfg.samples, "first_sample": first, "failures": failures[:3],
                                      "zero_test": "probabilistic" if cfg.fast_probabilistic else "exact"})


def _eq1_worked(cfg, rng):
    ctx = _ctx(cfg)
    ch = cfg.char
    alpha = RatFunc.parse("a1/b1", ch)
    res = check_eq1(alpha, ctx)
    a1, b1, a2, b2 = (RatFunc.parse(s, ch) for s in ("a1", "b1", "a2", "b2"))
    want = {(2, 0): a1 * a2 / b1**2, (1, 1): a2 / b1 + a1 * b2 / b1**2, (0, 2): b2 / b1}
    got = degree_two_part(alpha, ctx)
    match = all(got[k].equal(v) for k, v in want.items())
    return CheckResult(res.passed and match, {**res.witness, "degree_two": {f"{i},{j}": str(c) for (i, j), c in got.items()},
                                              "matches_hand_expansion": match})


def _eq2_family(cfg, rng):
    ctx = _ctx(cfg)
    failures, first = [], None
    for _ in range(cfg.samples):
        try:
            sample = random_invariant(rng, ctx)
        except InvchainError as exc:
            failures.append({"error": str(exc)})
            continue
        first = first or str(sample)
        res = check_eq2(sample, ctx)
        if not res.passed:
            failures.append(res.witness)
    return CheckResult(not failures, {"samples": cfg.samples, "first_sample": first, "failures": failures[:3]})


def _cramer(cfg, rng):
    ctx = _ctx(cfg)
    rows = []
    ok = True
    for t in range(3, 7):
        cm = express_f_in_ideal(t, ctx)
        good = cm.identity_holds and not any(cm.invariant)
        ok = ok and good
        rows.append({"t": t, "identity_holds": cm.identity_holds, "r_invariant": cm.invariant,
                     "moved_digests": [m["digest"] for m in cm.moved]})
    return CheckResult(ok, {"cases": rows})


def _step_cramer(cfg, rng):
    ctx = _ctx(cfg)
    cm = express_f_in_ideal(3, ctx)
    rel = extract_constant_relation(3, [cm.r1, cm.r2])
    st = sigma_step(rel, ctx)
    ok = rel.holds_exactly and st.constants_match and st.full_identity_holds and st.engine_consistent \
        and not st.pollution_free
    return CheckResult(ok, {"relation": str(rel), "holds_exactly": rel.holds_exactly,
                            "constants_match": st.constants_match,
                            "full_xy_identity_holds": st.full_identity_holds,
                            "pollution_nonzero": not st.pollution_free, "next": str(st.next)})


def _step_scalar(cfg, rng):
    ctx = _ctx(cfg)
    bad = []
    for _ in range(min(cfg.samples, 20)):
        n = rng.randint(1, 3)
        m = rng.randint(0, 2)
        coeffs = tuple(RatFunc.const(rng.randint(-5, 5), cfg.char) for _ in range(n))
        rel = LinearRelation(n, m, coeffs)
        st = sigma_step(rel, ctx)
        shape = st.next.shift == m + 1 and all(u.equal(v) for u, v in zip(st.next.coeffs, coeffs))
        if not (st.pollution_free and shape and st.engine_consistent):
            bad.append(rel.to_line())
    return CheckResult(not bad, {"cases": min(cfg.samples, 20), "failures": bad[:3]})


def _dvr(cfg, rng):
    ok = dvr_classify([0]).kind == "field"
    r = dvr_classify([4, 6])
    ok = ok and r.generator == 2 and r.normalized == (2, 3)
    for _ in range(cfg.samples):
        vals = [rng.randint(0, 60) for _ in range(rng.randint(1, 5))]
        out = dvr_classify(vals)
        if out.kind == "field":
            ok = ok and all(v == 0 for v in vals)
            continue
        g = 0
        for v in out.normalized:
            g = gcd(g, v)
        ok = ok and g == 1 and all(v % out.generator == 0 for v in vals)
    return CheckResult(ok, {"samples": cfg.samples})


VERIFY_CHECKS = [
    Check("01_fixed_points", "sigma(x) = x, sigma(y) = y, sigma(f_n) = f_n", _fixed_points),
    Check("02_closed_form", "sigma^k(a_n) = a_n + k*y*f_{n+1}, sigma^k(b_n) = b_n - k*x*f_{n+1}", _closed_form),
    Check("03_group_order", "|<sigma>| = p in characteristic p, infinite in characteristic 0", _group_order),
    Check("04_eq1_random", "sigma(alpha) = alpha mod m^2 for alpha in K", _eq1_random),
    Check("05_eq1_worked", "sigma(a1/b1) - a1/b1 in m^2, explicit degree-2 part", _eq1_worked),
    Check("06_eq2_family", "r in R^G implies sigma(rbar) = rbar mod (x^2, y^2)R", _eq2_family),
    Check("07_cramer_noninvariance", "f_t in (f_1, f_2)R only with coefficients outside R^G", _cramer),
    Check("08_sigma_step_cramer", "a_{t+1} = sum c_k a_{k+m+1} + sum lambda_k a_{k+m} from sigma of a_t = sum c_k a_{k+m}", _step_cramer),
    Check("09_sigma_step_scalar", "coefficients in F: a_{n+2} = sum rbar_k a_{k+1} with no pollution", _step_scalar),
    Check("10_dvr_classify", "R DVR implies R^G a field or a DVR", _dvr),
]


def _certify_checks(cfg: Config) -> List[Check]:
    checks = []
    for n in range(1, cfg.depth + 1):
        def run(cfg, rng, n=n):
            cert = chain_certificate(n, cfg.char, oracle=n <= 5)
            ok = cert.verify()
            wit = cert.to_dict()
            if n == 1:
                a = lambda i: Poly.a(i, cfg.char)  # noqa: E731
                ref = a(1) * a(3) - a(2) ** 2
                unit = RatFunc(cert.cleared_residual, ref)
                wit["cleared_equals_a1a3_minus_a2sq_up_to_unit"] = unit.is_constant()
                ok = ok and unit.is_constant()
            if cert.oracle_agrees is False:
                ok = False
            return CheckResult(ok, wit)

        checks.append(Check(f"cert_n{n:02d}", "f_{n+1} not in (f_1, ..., f_n)R^G: Hankel det != 0, residual != 0", run))
    return checks


def _bench_checks(cfg: Config) -> List[Check]:
    def poly_mul(cfg, rng):
        p = random_poly(rng, cfg.char, window=6, max_deg=4, max_terms=40)
        q = random_poly(rng, cfg.char, window=6, max_deg=4, max_terms=40)
        t0 = time.perf_counter()
        prod = p * q
        return CheckResult(True, {"terms": [len(p), len(q), len(prod)],
                                  "kernel_ms": round((time.perf_counter() - t0) * 1000, 3)})

    def elim(mode):
        def run(cfg, rng):
            n = min(cfg.depth, 5 if mode == "bareiss" else 4)
            t0 = time.perf_counter()
            d = det(hankel(1, n, cfg.char), mode)
            return CheckResult(True, {"size": n, "det_terms": len(d.num),
                                      "kernel_ms": round((time.perf_counter() - t0) * 1000, 3)})
        return run

    return [
        Check("bench_01_poly_mul", "sparse polynomial multiplication", poly_mul),
        Check("bench_02_det_bareiss", "Hankel determinant, fraction-free elimination", elim("bareiss")),
        Check("bench_03_det_naive", "Hankel determinant, fraction elimination", elim("naive")),
    ]


def run_and_report(cmd: str, cfg: Config) -> tuple[dict, int]:
    if cmd == "verify":
        checks = VERIFY_CHECKS
    elif cmd == "certify":
        checks = _certify_checks(cfg)
    elif cmd == "bench":
        checks = _bench_checks(cfg)
    else:
        raise ConfigError(f"unknown command {cmd!r}")
    records = []
    with REGISTRY.tracking() as window:
        for check in sorted(checks, key=lambda c: c.id):
            rng = random.Random(f"{cfg.seed}:{check.id}")
            t0 = time.perf_counter()
            try:
                res = check.run(cfg, rng)
                status = "pass" if res.passed else "fail"
                witness = res.witness
            except InvchainError as exc:
                status, witness = "fail", {"error": f"{type(exc).__name__}: {exc}"}
            elapsed = time.perf_counter() - t0
            if elapsed > cfg.budget_s:
                status = "failed-budget"
                witness = {**witness, "budget_s": cfg.budget_s}
            records.append({"id": check.id, "anchor": check.anchor, "status": status,
                            "runtime_ms": round(elapsed * 1000, 3), "witness": witness})
    overall = "pass" if all(r["status"] in ("pass", "skipped") for r in records) else "fail"
    report = {
        "command": cmd,
        "config": cfg.echo(),
        "window": {"max_index": window.max_index},
        "zero_test": "probabilistic" if (cfg.fast_probabilistic and cmd == "verify") else "exact",
        "checks": records,
        "overall": overall,
    }
    return report, EXIT_OK if overall == "pass" else EXIT_FAIL


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    lines = [f"invchain {report['command']}  char={report['config']['char']}  trunc={report['config']['trunc']}  "
             f"window=a1..a{report['window']['max_index']}, b1..b{report['window']['max_index']}"]
    for r in report["checks"]:
        lines.append(f"[{r['status'].upper():>4}] {r['id']:<26} {r['runtime_ms']:>10.1f} ms  {r['anchor']}")
    lines.append(f"overall: {report['overall']}")
    return "\n".join(lines)


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cmd, cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"invchain: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    report, code = run_and_report(cmd, cfg)
    print(render(report, cfg.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
