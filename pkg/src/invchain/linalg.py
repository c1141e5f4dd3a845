"""Exact linear algebra over K.

The primary route clears denominators row by row and runs Bareiss
fraction-free elimination over the polynomial ring, so every intermediate
entry is a polynomial and every division is exact.  ``mode="naive"`` is plain
Gaussian elimination with fractions in K; it shares no code with the Bareiss
path and serves as the oracle.
"""

from __future__ import annotations

from typing import List, Sequence

from .errors import DomainMismatchError, InternalInvariantError, ShapeError, SingularMatrixError
from .poly import Poly
from .ratfunc import RatFunc, common_multiple


class KMatrix:
    __slots__ = ("rows", "cols", "entries", "char")

    def __init__(self, entries: Sequence[Sequence], char: int | None = None):
        if not entries or not entries[0]:
            raise ShapeError("matrix must have at least one row and column")
        cols = len(entries[0])
        if any(len(r) != cols for r in entries):
            raise ShapeError("ragged rows")
        grid: List[List[RatFunc]] = []
        for row in entries:
            out = []
            for e in row:
                if isinstance(e, Poly):
                    e = RatFunc(e)
                elif isinstance(e, int):
                    e = RatFunc.const(e, char or 0)
                out.append(e)
            grid.append(out)
        chars = {e.char for row in grid for e in row}
        if len(chars) != 1:
            raise DomainMismatchError(f"mixed characteristics {sorted(chars)}")
        self.char = chars.pop()
        self.rows = len(grid)
        self.cols = cols
        self.entries = grid

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def apply(self, vec: Sequence[RatFunc]) -> List[RatFunc]:
        if len(vec) != self.cols:
            raise ShapeError(f"vector of length {len(vec)} for {self.cols} columns")
        out = []
        for row in self.entries:
            acc = RatFunc.zero(self.char)
            for e, v in zip(row, vec):
                acc = acc + e * v
            out.append(acc)
        return out

    def swap_rows(self, i: int, j: int) -> KMatrix:
        grid = [list(r) for r in self.entries]
        grid[i], grid[j] = grid[j], grid[i]
        return KMatrix(grid)

    def scale_row(self, i: int, t: RatFunc) -> KMatrix:
        grid = [list(r) for r in self.entries]
        grid[i] = [e * t for e in grid[i]]
        return KMatrix(grid)

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(e) for e in r) + "]" for r in self.entries) + "]"


def hankel(first: int, size: int, char: int = 0) -> KMatrix:
    """The size x size matrix with entry (m, k) equal to a_{first + m + k}."""
    return KMatrix([[RatFunc.a(first + m + k, char) for k in range(size)] for m in range(size)])


# -- Bareiss ----------------------------------------------------------------


def clear_denominators(rows: Sequence[Sequence[RatFunc]]) -> tuple[List[List[Poly]], List[Poly]]:
    polys, mults = [], []
    for row in rows:
        mult, _ = common_multiple([e.den for e in row])
        cleared = []
        for e in row:
            q = mult.divide_exact(e.den)
            if q is None:
                raise InternalInvariantError("row multiplier not divisible by an entry denominator")
            cleared.append(e.num * q)
        polys.append(cleared)
        mults.append(mult)
    return polys, mults


def _exact(num: Poly, den: Poly) -> Poly:
    q = num.divide_exact(den)
    if q is None:
        raise InternalInvariantError("Bareiss division was not exact")
    return q


def bareiss_eliminate(mat: List[List[Poly]], n: int) -> tuple[List[List[Poly]], int, bool]:
    """In-place fraction-free forward elimination on the first ``n`` columns.

    Returns the matrix, the permutation sign, and whether a full set of
    pivots was found.
    """
    sign = 1
    prev = Poly.one(mat[0][0].char)
    width = len(mat[0])
    for k in range(n):
        piv = next((r for r in range(k, n) if not mat[r][k].is_zero()), None)
        if piv is None:
            return mat, sign, False
        if piv != k:
            mat[k], mat[piv] = mat[piv], mat[k]
            sign = -sign
        pk = mat[k][k]
        for i in range(k + 1, n):
            mik = mat[i][k]
            row_i, row_k = mat[i], mat[k]
            for j in range(k + 1, width):
                row_i[j] = _exact(row_i[j] * pk - mik * row_k[j], prev)
            row_i[k] = Poly.zero(pk.char)
        prev = pk
    return mat, sign, True


def _det_bareiss(m: KMatrix) -> RatFunc:
    polys, mults = clear_denominators(m.entries)
    n = m.rows
    mat, sign, full = bareiss_eliminate(polys, n)
    char = m.char
    if not full:
        return RatFunc.zero(char)
    d = mat[n - 1][n - 1]
    if sign < 0:
        d = -d
    denom = Poly.one(char)
    for mu in mults:
        denom = denom * mu
    return RatFunc(d, denom)


def _det_naive(m: KMatrix) -> RatFunc:
    n = m.rows
    a = [list(r) for r in m.entries]
    det = RatFunc.one(m.char)
    for k in range(n):
        piv = next((r for r in range(k, n) if not a[r][k].is_zero()), None)
        if piv is None:
            return RatFunc.zero(m.char)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        pk = a[k][k]
        det = det * pk
        for i in range(k + 1, n):
            if a[i][k].is_zero():
                continue
            factor = a[i][k] / pk
            for j in range(k + 1, n):
                a[i][j] = a[i][j] - factor * a[k][j]
            a[i][k] = RatFunc.zero(m.char)
    # without gcds the pivot product piles up factors that cancel in value;
    # one exact division at the end recovers a polynomial when there is one
    if not det.den.is_constant():
        q = det.num.divide_exact(det.den)
        if q is not None:
            return RatFunc(q)
    return det


def det(m: KMatrix, mode: str = "bareiss") -> RatFunc:
    if not m.is_square():
        raise ShapeError(f"determinant of a {m.rows}x{m.cols} matrix")
    if mode == "bareiss":
        return _det_bareiss(m)
    if mode == "naive":
        return _det_naive(m)
    raise ValueError(f"unknown mode {mode!r}")


# -- solving ------------------------------------------------------------------


def _solve_bareiss(m: KMatrix, rhs: Sequence[RatFunc]) -> List[RatFunc]:
    n = m.rows
    aug = [list(row) + [b] for row, b in zip(m.entries, rhs)]
    polys, _ = clear_denominators(aug)
    mat, _, full = bareiss_eliminate(polys, n)
    if not full:
        raise SingularMatrixError("matrix is singular")
    big_d = mat[n - 1][n - 1]
    xs: List[Poly] = [Poly.zero(m.char)] * n
    xs[n - 1] = mat[n - 1][n]
    for i in range(n - 2, -1, -1):
        acc = big_d * mat[i][n]
        for j in range(i + 1, n):
            acc = acc - mat[i][j] * xs[j]
        xs[i] = _exact(acc, mat[i][i])
    return [RatFunc(x, big_d) for x in xs]


def _solve_naive(m: KMatrix, rhs: Sequence[RatFunc]) -> List[RatFunc]:
    # Cramer's rule over naive determinants: back substitution with gcd-free
    # fractions mixes unrelated denominators and grows far too fast at 4x4.
    n = m.rows
    d = _det_naive(m)
    if d.is_zero():
        raise SingularMatrixError("matrix is singular")
    xs = []
    for i in range(n):
        swapped = KMatrix([[rhs[r] if c == i else m.entries[r][c] for c in range(n)] for r in range(n)])
        xs.append(_det_naive(swapped) / d)
    return xs


def solve(m: KMatrix, rhs: Sequence, mode: str = "bareiss") -> List[RatFunc]:
    """Solve ``m @ c = rhs`` exactly; bareiss solutions are checked by substitution before returning."""
    if not m.is_square():
        raise ShapeError(f"cannot solve with a {m.rows}x{m.cols} matrix")
    if len(rhs) != m.rows:
        raise ShapeError(f"right-hand side of length {len(rhs)} for {m.rows} rows")
    rhs = [RatFunc(b) if isinstance(b, Poly) else b for b in rhs]
    if any(b.char != m.char for b in rhs):
        raise DomainMismatchError("right-hand side characteristic differs from matrix")
    if mode == "naive":
        # the oracle's entries carry unrelated denominators; substituting them
        # back costs more than the solve, and callers compare it to bareiss anyway
        return _solve_naive(m, rhs)
    if mode != "bareiss":
        raise ValueError(f"unknown mode {mode!r}")
    xs = _solve_bareiss(m, rhs)
    for got, want in zip(m.apply(xs), rhs):
        if not got.equal(want):
            raise InternalInvariantError("solution failed the substitution check")
    return xs
