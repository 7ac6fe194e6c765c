"""Exact linear algebra over Q(i).

Rank, nullspace and row-reduced forms go through a sparse fraction-free
Gauss-Jordan eliminator working on Gaussian integers.  Rows are cleared of
denominators on entry and kept primitive (integer content removed) after
every row operation, which bounds coefficient growth without division.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Sequence

from .gaussian import ONE, ZERO, GaussianRational, as_qi
from .unipoly import UniPoly

__all__ = [
    "Matrix",
    "identity",
    "mat_add",
    "mat_sub",
    "mat_mul",
    "mat_scale",
    "mat_pow",
    "trace",
    "charpoly",
    "minimal_polynomial",
    "rank",
    "nullspace",
    "rref",
    "is_consistent",
    "SparseEliminator",
]

Matrix = list[list[GaussianRational]]
GInt = tuple[int, int]


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    return [[as_qi(x) for x in row] for row in rows]


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, c) -> Matrix:
    c = as_qi(c)
    return [[x * c for x in row] for row in a]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in cols:
            s = ZERO
            for x, y in zip(row, col):
                if x and y:
                    s = s + x * y
            out_row.append(s)
        out.append(out_row)
    return out


def mat_pow(a: Matrix, k: int) -> Matrix:
    out = identity(len(a))
    for _ in range(k):
        out = mat_mul(out, a)
    return out


def trace(a: Matrix) -> GaussianRational:
    s = ZERO
    for i, row in enumerate(a):
        s = s + row[i]
    return s


def charpoly(a: Matrix) -> UniPoly:
    """det(xI - A) by the Faddeev-LeVerrier recursion (exact, char 0)."""
    n = len(a)
    c = [ZERO] * (n + 1)
    c[n] = ONE
    m = [[ZERO] * n for _ in range(n)]
    ident = identity(n)
    for k in range(1, n + 1):
        m = mat_add(mat_mul(a, m), mat_scale(ident, c[n - k + 1]))
        c[n - k] = -trace(mat_mul(a, m)) / k
    return UniPoly(c)


def minimal_polynomial(a: Matrix) -> UniPoly:
    """Monic minimal polynomial from the first linear relation among powers."""
    n = len(a)
    powers = [identity(n)]
    while True:
        k = len(powers) - 1
        # columns are vec(A^0) .. vec(A^k)
        rows = []
        for i in range(n):
            for j in range(n):
                rows.append({c: p[i][j] for c, p in enumerate(powers) if p[i][j]})
        ns = nullspace(rows, k + 1)
        if ns:
            v = ns[0]
            coeffs = [v.get(j, ZERO) for j in range(k + 1)]
            return UniPoly(coeffs).monic()
        powers.append(mat_mul(powers[-1], a))


# ---------------------------------------------------------------------------
# Gaussian-integer helpers


def _gmul(a: GInt, b: GInt) -> GInt:
    if a[1] == 0 and b[1] == 0:
        return (a[0] * b[0], 0)
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _row_to_gint(row: dict[int, GaussianRational]) -> dict[int, GInt]:
    d = 1
    for v in row.values():
        den = v.parts[2]
        d = d * den // gcd(d, den)
    out = {}
    for c, v in row.items():
        re, im, den = v.parts
        f = d // den
        out[c] = (re * f, im * f)
    return out


def _primitive(row: dict[int, GInt]) -> dict[int, GInt]:
    g = 0
    for a, b in row.values():
        g = gcd(g, gcd(a, b))
        if g == 1:
            return row
    if g > 1:
        return {c: (a // g, b // g) for c, (a, b) in row.items()}
    return row


def _combine(p: GInt, row: dict[int, GInt], q: GInt, prow: dict[int, GInt]) -> dict[int, GInt]:
    """Return ``p*row - q*prow`` with zero entries dropped."""
    out: dict[int, GInt] = {}
    one = p == (1, 0)
    for c, v in row.items():
        out[c] = v if one else _gmul(p, v)
    for c, v in prow.items():
        t = _gmul(q, v)
        if c in out:
            o = out[c]
            s = (o[0] - t[0], o[1] - t[1])
            if s[0] or s[1]:
                out[c] = s
            else:
                del out[c]
        else:
            out[c] = (-t[0], -t[1])
    return out


class SparseEliminator:
    """Incremental fraction-free Gauss-Jordan elimination.

    Pivot rows are kept mutually reduced: no pivot row has a non-zero entry
    in another row's pivot column.
    """

    def __init__(self, ncols: int, col_order: Sequence[int] | None = None):
        self.ncols = ncols
        self.pivots: dict[int, dict[int, GInt]] = {}
        # lower rank = preferred pivot column
        order = list(col_order) if col_order is not None else list(range(ncols))
        self._rank_of = {c: r for r, c in enumerate(order)}

    def _reduce(self, row: dict[int, GInt]) -> dict[int, GInt]:
        for c in [c for c in row if c in self.pivots]:
            if c not in row:
                continue
            prow = self.pivots[c]
            row = _primitive(_combine(prow[c], row, row[c], prow))
        return row

    def add_row(self, row: dict[int, GaussianRational]) -> bool:
        """Insert a row; returns True if the rank increased."""
        r = self._reduce(_row_to_gint({c: v for c, v in row.items() if v}))
        if not r:
            return False
        pc = min(r, key=lambda c: self._rank_of.get(c, c))
        for c, prow in list(self.pivots.items()):
            if pc in prow:
                self.pivots[c] = _primitive(_combine(r[pc], prow, prow[pc], r))
        self.pivots[pc] = r
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: dict[int, GaussianRational]) -> dict[int, GaussianRational]:
        r = self._reduce(_row_to_gint({c: v for c, v in row.items() if v}))
        return {c: GaussianRational(a, b) for c, (a, b) in r.items()}

    def nullspace(self) -> list[dict[int, GaussianRational]]:
        """Basis of the right kernel, one primitive vector per free column."""
        free = [c for c in range(self.ncols) if c not in self.pivots]
        by_free: dict[int, list[tuple[int, GInt, GInt]]] = {f: [] for f in free}
        for pc, prow in self.pivots.items():
            pv = prow[pc]
            for c, v in prow.items():
                if c != pc:
                    by_free[c].append((pc, pv, v))
        out = []
        for f in free:
            vec = {f: ONE}
            for pc, pv, v in by_free[f]:
                vec[pc] = -GaussianRational(v[0], v[1]) / GaussianRational(pv[0], pv[1])
            out.append(_primitive_qi(vec))
        return out

    def rref_rows(self) -> list[dict[int, GaussianRational]]:
        """Reduced rows normalised to pivot 1, ordered by pivot preference."""
        rows = []
        for pc in sorted(self.pivots, key=lambda c: self._rank_of.get(c, c)):
            prow = self.pivots[pc]
            inv = ONE / GaussianRational(*prow[pc])
            rows.append({c: GaussianRational(a, b) * inv for c, (a, b) in prow.items()})
        return rows


def _primitive_qi(vec: dict[int, GaussianRational]) -> dict[int, GaussianRational]:
    g = _row_to_gint(vec)
    g = _primitive(g)
    return {c: GaussianRational(a, b) for c, (a, b) in g.items()}


def _dense_rows(a: Sequence[Sequence]) -> list[dict[int, GaussianRational]]:
    return [{j: as_qi(x) for j, x in enumerate(row) if as_qi(x)} for row in a]


def _eliminate(rows, ncols: int | None) -> SparseEliminator:
    if rows and not isinstance(rows[0], dict):
        ncols = len(rows[0]) if ncols is None else ncols
        rows = _dense_rows(rows)
    if ncols is None:
        ncols = 1 + max((max(r) for r in rows if r), default=-1)
    el = SparseEliminator(ncols)
    for r in rows:
        el.add_row(r)
    return el


def rank(rows, ncols: int | None = None) -> int:
    """Rank of a dense matrix or of sparse ``{col: value}`` rows."""
    return _eliminate(list(rows), ncols).rank


def nullspace(rows, ncols: int | None = None) -> list[dict[int, GaussianRational]]:
    return _eliminate(list(rows), ncols).nullspace()


def rref(rows, ncols: int, col_order: Sequence[int] | None = None) -> list[dict[int, GaussianRational]]:
    el = SparseEliminator(ncols, col_order)
    for r in rows:
        el.add_row(r)
    return el.rref_rows()


def is_consistent(a: Sequence[Sequence], b: Sequence) -> bool:
    """Whether ``A x = b`` has a solution."""
    ncols = len(a[0])
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    return rank(a, ncols) == rank(aug, ncols + 1)
