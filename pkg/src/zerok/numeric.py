"""Floating-point evaluation of exact rational-function arrays.

All numerators and denominators of an array share one monomial table, so a
gradient or Hessian evaluation costs a single pass over the monomials.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .exact import RatFunc, SingularPointError

__all__ = ["RatFuncArray"]


class RatFuncArray:
    def __init__(self, funcs: Sequence[RatFunc], shape: tuple[int, ...] | None = None):
        funcs = list(funcs)
        if not funcs:
            raise ValueError("empty array")
        self.nvars = funcs[0].nvars
        self.shape = shape or (len(funcs),)
        monos: dict[tuple[int, ...], int] = {}
        for f in funcs:
            for p in (f.num, f.den):
                for e in p.terms:
                    monos.setdefault(e, len(monos))
        self._exps = np.array(list(monos), dtype=np.int64).reshape(len(monos), self.nvars)
        m = len(monos)
        self._num = np.zeros((len(funcs), m), dtype=complex)
        self._den = np.zeros((len(funcs), m), dtype=complex)
        for k, f in enumerate(funcs):
            for e, c in f.num.items():
                self._num[k, monos[e]] = complex(c)
            for e, c in f.den.items():
                self._den[k, monos[e]] = complex(c)
        self._maxexp = int(self._exps.max(initial=0))

    def _monomials(self, x: np.ndarray) -> np.ndarray:
        # powers table avoids repeated complex pow
        pw = np.ones((self._maxexp + 1, self.nvars), dtype=complex)
        for k in range(1, self._maxexp + 1):
            pw[k] = pw[k - 1] * x
        return np.prod(pw[self._exps, np.arange(self.nvars)], axis=1)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        mono = self._monomials(x)
        den = self._den @ mono
        if np.any(den == 0) or not np.all(np.isfinite(den)):
            raise SingularPointError("denominator vanishes at the evaluation point")
        return (self._num @ mono / den).reshape(self.shape)

    def denominators(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return self._den @ self._monomials(x)
