"""Dense univariate polynomials over Q(i) and exact root extraction."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .gaussian import ONE, ZERO, GaussianRational, as_qi
from .multipoly import MultiPoly

__all__ = [
    "UniPoly",
    "integer_roots",
    "gaussian_rational_roots",
    "squarefree_decomposition",
]


class UniPoly:
    """Coefficients in ascending degree; the zero polynomial has none."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_qi(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs: tuple[GaussianRational, ...] = tuple(cs)

    @classmethod
    def x(cls) -> "UniPoly":
        return cls([0, 1])

    @classmethod
    def const(cls, c) -> "UniPoly":
        return cls([c])

    @classmethod
    def from_roots(cls, roots: Iterable) -> "UniPoly":
        out = cls([1])
        for r in roots:
            out = out * cls([-as_qi(r), 1])
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def lc(self) -> GaussianRational:
        return self.coeffs[-1] if self.coeffs else ZERO

    def __getitem__(self, k: int) -> GaussianRational:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else ZERO

    # -- arithmetic ------------------------------------------------------
    @staticmethod
    def _c(x) -> "UniPoly":
        return x if isinstance(x, UniPoly) else UniPoly([x])

    def __add__(self, other):
        o = self._c(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return UniPoly(self[k] + o[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-self._c(other))

    def __rsub__(self, other):
        return self._c(other) - self

    def __mul__(self, other):
        o = self._c(other)
        if not self.coeffs or not o.coeffs:
            return UniPoly()
        out = [ZERO] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        out[i + j] = out[i + j] + a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result, base = UniPoly([1]), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        try:
            return self.coeffs == UniPoly([other]).coeffs
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def divmod(self, g: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if g.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        r = list(self.coeffs)
        dg = g.degree
        inv = ONE / g.lc()
        q = [ZERO] * max(len(r) - dg, 0)
        for k in range(len(r) - dg - 1, -1, -1):
            c = r[k + dg] * inv
            q[k] = c
            if c:
                for j, b in enumerate(g.coeffs):
                    r[k + j] = r[k + j] - c * b
        return UniPoly(q), UniPoly(r[:dg])

    def __floordiv__(self, g):
        return self.divmod(self._c(g))[0]

    def __mod__(self, g):
        return self.divmod(self._c(g))[1]

    def exquo(self, g: "UniPoly") -> "UniPoly":
        q, r = self.divmod(g)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def monic(self) -> "UniPoly":
        if not self.coeffs or self.lc() == ONE:
            return self
        inv = ONE / self.lc()
        return UniPoly(c * inv for c in self.coeffs)

    def gcd(self, other: "UniPoly") -> "UniPoly":
        a, b = self, other
        while b:
            a, b = b, a % b
        return a.monic()

    def derivative(self) -> "UniPoly":
        return UniPoly(c * k for k, c in enumerate(self.coeffs) if k)

    def is_squarefree(self) -> bool:
        return self.gcd(self.derivative()).degree <= 0

    def squarefree_part(self) -> "UniPoly":
        if self.degree <= 0:
            return self.monic()
        return self.exquo(self.gcd(self.derivative())).monic()

    # -- evaluation ------------------------------------------------------
    def __call__(self, x):
        if isinstance(x, UniPoly):
            out = UniPoly()
            for c in reversed(self.coeffs):
                out = out * x + c
            return out
        if isinstance(x, (complex, float)):
            out = 0j
            for c in reversed(self.coeffs):
                out = out * x + complex(c)
            return out
        x = as_qi(x)
        out = ZERO
        for c in reversed(self.coeffs):
            out = out * x + c
        return out

    def eval_matrix(self, a: Sequence[Sequence[GaussianRational]]):
        """Exact Horner evaluation at a square matrix."""
        from .linalg import identity, mat_add, mat_mul, mat_scale

        n = len(a)
        out = mat_scale(identity(n), ZERO)
        for c in reversed(self.coeffs):
            out = mat_add(mat_mul(out, a), mat_scale(identity(n), c))
        return out

    def to_complex(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def numeric_roots(self) -> np.ndarray:
        if self.degree <= 0:
            return np.array([], dtype=complex)
        return np.roots(self.to_complex()[::-1])

    def to_multipoly(self, nvars: int = 1, var: int = 0) -> MultiPoly:
        terms = {}
        for k, c in enumerate(self.coeffs):
            e = [0] * nvars
            e[var] = k
            terms[tuple(e)] = c
        return MultiPoly(nvars, terms)

    @classmethod
    def from_multipoly(cls, p: MultiPoly, var: int = 0) -> "UniPoly":
        if p.variables() - {var}:
            raise ValueError("polynomial is not univariate in the requested variable")
        deg = max(p.degree_in(var), 0)
        cs = [ZERO] * (deg + 1)
        for e, c in p.items():
            cs[e[var]] = c
        return cls(cs)

    def format(self, var: str = "x") -> str:
        return self.to_multipoly().format([var])

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"UniPoly({self.format()!r})"


def squarefree_decomposition(f: UniPoly) -> list[tuple[UniPoly, int]]:
    """Yun's algorithm: ``f = lc * prod g_j**j`` with coprime squarefree ``g_j``."""
    if f.degree <= 0:
        return []
    out = []
    a = f.monic()
    b = a.derivative()
    c = a.gcd(b)
    w = a.exquo(c)
    y = b.exquo(c)
    j = 1
    while w.degree > 0:
        z = y - w.derivative()
        g = w.gcd(z)
        if g.degree > 0:
            out.append((g, j))
        w = w.exquo(g)
        y = z.exquo(g)
        j += 1
    return out


def _multiplicity(f: UniPoly, root: GaussianRational) -> tuple[int, UniPoly]:
    lin = UniPoly([-root, 1])
    m = 0
    while f.degree > 0:
        q, r = f.divmod(lin)
        if r:
            break
        f, m = q, m + 1
    return m, f


def integer_roots(f: UniPoly) -> list[tuple[int, int]]:
    """All integer roots of ``f`` with multiplicities, ascending.

    Floating-point roots of the squarefree part only propose candidates;
    each candidate is accepted by exact substitution.
    """
    if f.is_zero():
        raise ValueError("integer_roots of the zero polynomial")
    if f.degree <= 0:
        return []
    candidates: set[int] = set()
    for r in f.squarefree_part().numeric_roots():
        if abs(r.imag) < 0.5 + 1e-6 * abs(r):
            base = round(r.real)
            candidates.update((base - 1, base, base + 1))
    out = []
    rest = f
    for z in sorted(candidates):
        if f(z).is_zero():
            m, rest = _multiplicity(rest, as_qi(z))
            out.append((z, m))
    return out


def gaussian_rational_roots(f: UniPoly, max_den: int = 10**6) -> list[tuple[GaussianRational, int]]:
    """Roots in Q(i) with multiplicities; candidates confirmed exactly."""
    if f.is_zero():
        raise ValueError("roots of the zero polynomial")
    if f.degree <= 0:
        return []
    found: dict[GaussianRational, int] = {}
    rest = f
    for r in f.squarefree_part().numeric_roots():
        cand = GaussianRational(
            Fraction(r.real).limit_denominator(max_den),
            Fraction(r.imag).limit_denominator(max_den),
        )
        if cand in found:
            continue
        if f(cand).is_zero():
            m, rest = _multiplicity(rest, cand)
            found[cand] = m
    return sorted(found.items(), key=lambda t: (t[0].real, t[0].imag))
