"""Probabilists' Hermite polynomials and exact Gaussian moments."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .gaussian import ZERO, GaussianRational
from .unipoly import UniPoly

__all__ = ["hermite", "HermiteExpansion", "hermite_expand", "gaussian_moment", "double_factorial"]

_P = UniPoly([0, 1])


@lru_cache(maxsize=None)
def hermite(n: int) -> UniPoly:
    """He_n from He_0 = 1 and He_{n+1} = p He_n - He_n'."""
    if n < 0:
        raise ValueError("Hermite index must be non-negative")
    if n == 0:
        return UniPoly([1])
    prev = hermite(n - 1)
    return _P * prev - prev.derivative()


@dataclass(frozen=True)
class HermiteExpansion:
    """``coeffs[n]`` is the multiple of He_n."""

    coeffs: tuple[GaussianRational, ...]

    def to_unipoly(self) -> UniPoly:
        out = UniPoly()
        for n, g in enumerate(self.coeffs):
            if g:
                out = out + hermite(n) * g
        return out

    def __getitem__(self, n: int) -> GaussianRational:
        return self.coeffs[n] if 0 <= n < len(self.coeffs) else ZERO


def hermite_expand(f: UniPoly) -> HermiteExpansion:
    # He_n is monic of degree n, so peel off leading terms top-down
    if f.is_zero():
        return HermiteExpansion(())
    gam = [ZERO] * (f.degree + 1)
    rest = f
    while not rest.is_zero():
        d = rest.degree
        g = rest.lc()
        gam[d] = g
        rest = rest - hermite(d) * g
    return HermiteExpansion(tuple(gam))


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def gaussian_moment(f: UniPoly) -> GaussianRational:
    """``∫ exp(-p²/2) f(p) dp`` over the real line, in units of sqrt(2π).

    Odd monomials integrate to zero and ``p^(2m)`` gives ``(2m-1)!!``.
    """
    total = ZERO
    for k in range(0, f.degree + 1, 2):
        c = f[k]
        if c:
            total = total + c * double_factorial(k - 1)
    return total
