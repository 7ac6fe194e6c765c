"""Rational functions over Q(i) in canonical form.

Canonical form: ``gcd(num, den) == 1`` and ``den`` has graded-lex leading
coefficient 1.  Equality of rational functions is therefore equality of the
stored numerator/denominator pairs.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .gaussian import ONE, GaussianRational, as_qi
from .multipoly import MultiPoly, poly_gcd

__all__ = ["RatFunc", "SingularPointError", "homogeneous_degree"]


class SingularPointError(ZeroDivisionError):
    """Evaluation at a point where the denominator vanishes."""


class RatFunc:
    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None, *, reduced: bool = False):
        if den is None:
            den = MultiPoly.const(num.nvars, 1)
        if num.nvars != den.nvars:
            raise ValueError("numerator and denominator live in different rings")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = num, MultiPoly.const(num.nvars, 1)
        elif not reduced:
            g = poly_gcd(num, den)
            if not g.is_constant():
                num, den = num.exquo(g), den.exquo(g)
        lc = den.leading_coefficient()
        if lc != ONE:
            inv = ONE / lc
            num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @classmethod
    def const(cls, nvars: int, c=1) -> "RatFunc":
        return cls(MultiPoly.const(nvars, c), reduced=True)

    @classmethod
    def var(cls, nvars: int, i: int) -> "RatFunc":
        return cls(MultiPoly.var(nvars, i), reduced=True)

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "RatFunc":
        return cls(p, reduced=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> "RatFunc | None":
        if isinstance(other, RatFunc):
            if other.nvars != self.nvars:
                raise ValueError("rational functions live in different rings")
            return other
        if isinstance(other, MultiPoly):
            return RatFunc.from_poly(other)
        try:
            return RatFunc.const(self.nvars, as_qi(other))
        except TypeError:
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        g = poly_gcd(self.den, o.den)
        a, b = self.den.exquo(g), o.den.exquo(g)
        return RatFunc(self.num * b + o.num * a, a * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return RatFunc.const(self.nvars, 0)
        # cross-cancel so each product is already reduced
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n = self.num.exquo(g1) * o.num.exquo(g2)
        d = self.den.exquo(g2) * o.den.exquo(g1)
        return RatFunc(n, d, reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        return RatFunc(self.den, self.num, reduced=True)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self.num**n, self.den**n, reduced=True)

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, RatFunc) else other
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    # -- calculus, evaluation, substitution --------------------------------
    def derivative(self, i: int) -> "RatFunc":
        n, d = self.num, self.den
        if d.is_constant():
            return RatFunc(n.derivative(i), d, reduced=True)
        return RatFunc(n.derivative(i) * d - n * d.derivative(i), d * d)

    def evaluate(self, point: Sequence) -> GaussianRational:
        d = self.den.evaluate(point)
        if d.is_zero():
            raise SingularPointError(f"denominator vanishes at {[str(as_qi(x)) for x in point]}")
        return self.num.evaluate(point) / d

    def eval_complex(self, point: Sequence[complex]) -> complex:
        d = self.den.eval_complex(point)
        if d == 0:
            raise SingularPointError("denominator vanishes at the evaluation point")
        return self.num.eval_complex(point) / d

    def substitute(self, images: Sequence["RatFunc"]) -> "RatFunc":
        """Compose with ``images`` (rational functions in a common ring)."""
        target = images[0].nvars
        out = []
        for poly in (self.num, self.den):
            total = RatFunc.const(target, 0)
            for e, c in poly.items():
                t = RatFunc.const(target, c)
                for img, k in zip(images, e):
                    if k:
                        t = t * img**k
                total = total + t
            out.append(total)
        if out[1].is_zero():
            raise SingularPointError("substitution annihilates the denominator")
        return out[0] / out[1]

    def format(self, names: Sequence[str] | None = None) -> str:
        ns = self.num.format(names)
        if self.den.is_constant():
            return ns
        ds = self.den.format(names)
        if len(self.num) > 1:
            ns = f"({ns})"
        if len(self.den) > 1 or "*" in ds:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"RatFunc({self.format()!r})"


def homogeneous_degree(f: RatFunc, indices: Iterable[int] | None = None) -> int | None:
    """Degree ``k`` of a homogeneous rational function, or ``None``.

    ``indices`` restricts homogeneity to a subset of variables (the rest
    are treated as parameters).  A candidate degree read off the canonical
    numerator/denominator is confirmed by the exact Euler identity
    ``sum q_i df/dq_i == k f``.
    """
    if f.is_zero():
        raise ValueError("the zero function has no homogeneity degree")
    idx = list(range(f.nvars)) if indices is None else list(indices)
    if not (f.num.is_homogeneous(idx) and f.den.is_homogeneous(idx)):
        return None

    def deg(p: MultiPoly) -> int:
        e = next(iter(p.terms))
        return sum(e[i] for i in idx)

    k = deg(f.num) - deg(f.den)
    euler = RatFunc.const(f.nvars, 0)
    for i in idx:
        euler = euler + RatFunc.var(f.nvars, i) * f.derivative(i)
    if euler != f * k:
        return None
    return k


def degree_witness(f: RatFunc, indices: Iterable[int] | None = None) -> tuple[str, int, int] | None:
    """Two monomial degrees that disagree, for non-homogeneity diagnostics."""
    idx = list(range(f.nvars)) if indices is None else list(indices)
    for part, poly in (("numerator", f.num), ("denominator", f.den)):
        degs = sorted({sum(e[i] for i in idx) for e in poly.terms})
        if len(degs) > 1:
            return part, degs[0], degs[-1]
    return None
