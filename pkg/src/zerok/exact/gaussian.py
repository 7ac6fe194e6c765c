"""Exact arithmetic in the Gaussian rationals Q(i).

A value is stored as ``(re + im*i) / den`` with integer ``re``, ``im`` and a
positive integer ``den``, reduced so that ``gcd(re, im, den) == 1``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
import re as _re

__all__ = ["GaussianRational", "QI", "as_qi", "ZERO", "ONE", "I"]


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class GaussianRational:
    """An element of Q(i); immutable and hashable."""

    __slots__ = ("_re", "_im", "_den")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im:
                re = re + GaussianRational(0, 1) * as_qi(im)
            self._re, self._im, self._den = re._re, re._im, re._den
            return
        fr, fi = Fraction(re), Fraction(im)
        d = fr.denominator * fi.denominator // gcd(fr.denominator, fi.denominator)
        a = fr.numerator * (d // fr.denominator)
        b = fi.numerator * (d // fi.denominator)
        self._set(a, b, d)

    def _set(self, a: int, b: int, d: int) -> None:
        g = gcd(gcd(a, b), d)
        if g > 1:
            a //= g
            b //= g
            d //= g
        self._re, self._im, self._den = a, b, d

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> "GaussianRational":
        obj = object.__new__(cls)
        if d < 0:
            a, b, d = -a, -b, -d
        obj._set(a, b, d)
        return obj

    # -- accessors -----------------------------------------------------
    @property
    def real(self) -> Fraction:
        return Fraction(self._re, self._den)

    @property
    def imag(self) -> Fraction:
        return Fraction(self._im, self._den)

    @property
    def parts(self) -> tuple[int, int, int]:
        """Return the reduced triple ``(re, im, den)``."""
        return self._re, self._im, self._den

    def is_zero(self) -> bool:
        return self._re == 0 and self._im == 0

    def is_rational(self) -> bool:
        return self._im == 0

    def is_integer(self) -> bool:
        """True for rational integers only; ``i`` is not an integer."""
        return self._im == 0 and self._den == 1

    def is_gaussian_integer(self) -> bool:
        return self._den == 1

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self._re, -self._im, self._den)

    def norm(self) -> Fraction:
        return Fraction(self._re * self._re + self._im * self._im, self._den * self._den)

    def __int__(self) -> int:
        if not self.is_integer():
            raise ValueError(f"{self} is not an integer")
        return self._re

    def __complex__(self) -> complex:
        return complex(self._re / self._den, self._im / self._den)

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        d1, d2 = self._den, o._den
        if d1 == d2:
            return GaussianRational._raw(self._re + o._re, self._im + o._im, d1)
        return GaussianRational._raw(
            self._re * d2 + o._re * d1, self._im * d2 + o._im * d1, d1 * d2
        )

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._raw(-self._re, -self._im, self._den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, e = self._re, self._im, o._re, o._im
        if b == 0 and e == 0:
            return GaussianRational._raw(a * c, 0, self._den * o._den)
        return GaussianRational._raw(a * c - b * e, a * e + b * c, self._den * o._den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero in Q(i)")
        a, b, c, e = self._re, self._im, o._re, o._im
        n = c * c + e * e
        return GaussianRational._raw(
            (a * c + b * e) * o._den, (b * c - a * e) * o._den, self._den * n
        )

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return ONE / (self ** (-n))
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison ----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, complex):
            return complex(self) == other
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self._re == o._re and self._im == o._im and self._den == o._den

    def __hash__(self):
        if self._im == 0:
            return hash(Fraction(self._re, self._den))
        return hash((self._re, self._im, self._den))

    # -- text ------------------------------------------------------------
    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        re_, im_ = self.real, self.imag
        if im_ == 0:
            return _frac_str(re_)
        if im_ == 1:
            ims = "i"
        elif im_ == -1:
            ims = "-i"
        elif im_.denominator == 1:
            ims = f"{im_.numerator}i"
        else:
            ims = f"({_frac_str(im_)})i"
        if re_ == 0:
            return ims
        sep = "" if ims.startswith("-") else "+"
        return f"{_frac_str(re_)}{sep}{ims}"

    def to_json(self) -> dict:
        return {"re": _frac_str(self.real), "im": _frac_str(self.imag)}

    @classmethod
    def from_json(cls, data: dict) -> "GaussianRational":
        return cls(Fraction(data["re"]), Fraction(data["im"]))

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse forms such as ``3``, ``-1/2``, ``3i``, ``1-6i``, ``(1/2)i``."""
        s = text.replace(" ", "").replace("*", "")
        m = _QI_RE.fullmatch(s)
        if not m or not s:
            raise ValueError(f"cannot parse Gaussian rational {text!r}")
        re_s, im_s = m.group("re"), m.group("im")
        re_v = Fraction(re_s) if re_s else Fraction(0)
        im_v = Fraction(0)
        if im_s is not None:
            body = im_s.replace("(", "").replace(")", "")
            if body in ("", "+"):
                im_v = Fraction(1)
            elif body == "-":
                im_v = Fraction(-1)
            else:
                im_v = Fraction(body)
        return cls(re_v, im_v)


_QI_RE = _re.compile(
    r"(?P<re>[+-]?\d+(?:/\d+)?(?:\.\d+)?)?"
    r"(?:(?P<im>[+-]?(?:\(?[+-]?\d+(?:/\d+)?(?:\.\d+)?\)?)?)i)?"
)


def _coerce(x) -> GaussianRational | None:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, int):
        return GaussianRational._raw(x, 0, 1)
    if isinstance(x, Fraction):
        return GaussianRational._raw(x.numerator, 0, x.denominator)
    return None


def as_qi(x) -> GaussianRational:
    """Coerce ints, Fractions, numeric strings and GaussianRationals."""
    o = _coerce(x)
    if o is not None:
        return o
    if isinstance(x, str):
        return GaussianRational.parse(x)
    raise TypeError(f"cannot convert {type(x).__name__} to GaussianRational exactly")


QI = GaussianRational
ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)
