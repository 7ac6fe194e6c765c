"""Sparse multivariate polynomials over Q(i).

A polynomial maps exponent tuples (one non-negative int per variable) to
non-zero :class:`GaussianRational` coefficients.  Terms are ordered by
graded-lex order: total degree first, then lexicographic on exponents.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .gaussian import ONE, ZERO, GaussianRational, as_qi

__all__ = ["MultiPoly", "poly_gcd", "term_key"]

Exponent = tuple[int, ...]


def term_key(e: Exponent):
    """Sort key of the repo-wide graded-lex term order."""
    return (sum(e), e)


class MultiPoly:
    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        self.nvars = nvars
        clean: dict[Exponent, GaussianRational] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise ValueError(f"exponent {e} does not match nvars={nvars}")
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent in {e}")
            c = as_qi(c)
            if c:
                clean[e] = clean.get(e, ZERO) + c
                if not clean[e]:
                    del clean[e]
        self._terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, nvars: int, terms: dict) -> "MultiPoly":
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, nvars: int, c=1) -> "MultiPoly":
        c = as_qi(c)
        return cls._wrap(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> "MultiPoly":
        if not 0 <= i < nvars:
            raise ValueError(f"variable index {i} out of range for nvars={nvars}")
        e = [0] * nvars
        e[i] = 1
        return cls._wrap(nvars, {tuple(e): ONE})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "MultiPoly":
        return cls(len(exps), {tuple(exps): c})

    # -- inspection ------------------------------------------------------
    @property
    def terms(self) -> dict[Exponent, GaussianRational]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and sum(next(iter(self._terms))) == 0)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def constant_value(self) -> GaussianRational:
        return self._terms.get((0,) * self.nvars, ZERO)

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def degrees(self) -> set[int]:
        return {sum(e) for e in self._terms}

    def is_homogeneous(self, indices: Iterable[int] | None = None) -> bool:
        if indices is None:
            return len(self.degrees()) <= 1
        idx = list(indices)
        return len({sum(e[i] for i in idx) for e in self._terms}) <= 1

    def degree_in(self, i: int) -> int:
        if not self._terms:
            return -1
        return max(e[i] for e in self._terms)

    def variables(self) -> set[int]:
        out = set()
        for e in self._terms:
            out.update(i for i, x in enumerate(e) if x)
        return out

    def sorted_terms(self) -> list[tuple[Exponent, GaussianRational]]:
        return sorted(self._terms.items(), key=lambda t: term_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[Exponent, GaussianRational]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms, key=term_key)
        return e, self._terms[e]

    def leading_coefficient(self) -> GaussianRational:
        return self.leading_term()[1]

    def monic(self) -> "MultiPoly":
        if not self._terms:
            return self
        lc = self.leading_coefficient()
        if lc == ONE:
            return self
        return self.scale(ONE / lc)

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly | None":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different rings")
            return other
        try:
            return MultiPoly.const(self.nvars, other)
        except TypeError:
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return MultiPoly._wrap(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._wrap(self.nvars, {e: -c for e, c in self._terms.items()})

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

    def scale(self, c) -> "MultiPoly":
        c = as_qi(c)
        if not c:
            return MultiPoly._wrap(self.nvars, {})
        return MultiPoly._wrap(self.nvars, {e: v * c for e, v in self._terms.items()})

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if len(o._terms) == 1 and o.is_constant():
            return self.scale(o.constant_value())
        out: dict[Exponent, GaussianRational] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in o._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return MultiPoly._wrap(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = MultiPoly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def mul_monomial(self, exps: Exponent, c=ONE) -> "MultiPoly":
        c = as_qi(c)
        return MultiPoly._wrap(
            self.nvars,
            {tuple(a + b for a, b in zip(e, exps)): v * c for e, v in self._terms.items()},
        )

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        try:
            return self == MultiPoly.const(self.nvars, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and evaluation -----------------------------------------
    def derivative(self, i: int) -> "MultiPoly":
        out = {}
        for e, c in self._terms.items():
            k = e[i]
            if k:
                ne = list(e)
                ne[i] = k - 1
                out[tuple(ne)] = c * k
        return MultiPoly._wrap(self.nvars, out)

    def evaluate(self, point: Sequence) -> GaussianRational:
        """Exact value at a point with Gaussian-rational coordinates."""
        pt = [as_qi(x) for x in point]
        total = ZERO
        for e, c in self._terms.items():
            t = c
            for x, k in zip(pt, e):
                if k:
                    t = t * x**k
            total = total + t
        return total

    def eval_complex(self, point: Sequence[complex]) -> complex:
        total = 0j
        for e, c in self._terms.items():
            t = complex(c)
            for x, k in zip(point, e):
                if k:
                    t *= x**k
            total += t
        return total

    def substitute(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Replace variable ``j`` by ``images[j]`` (all in a common ring)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        target = images[0].nvars if images else 0
        cache: dict[tuple[int, int], MultiPoly] = {}

        def power(j: int, k: int) -> MultiPoly:
            key = (j, k)
            if key not in cache:
                cache[key] = images[j] ** k
            return cache[key]

        total = MultiPoly.const(target, 0)
        for e, c in self._terms.items():
            t = MultiPoly.const(target, c)
            for j, k in enumerate(e):
                if k:
                    t = t * power(j, k)
            total = total + t
        return total

    def coefficients_in(self, i: int) -> dict[int, "MultiPoly"]:
        """Split into ``{k: c_k}`` with ``self = sum c_k * x_i**k``."""
        out: dict[int, dict] = {}
        for e, c in self._terms.items():
            k = e[i]
            ne = e[:i] + (0,) + e[i + 1:]
            out.setdefault(k, {})[ne] = c
        return {k: MultiPoly._wrap(self.nvars, t) for k, t in out.items()}

    # -- division ----------------------------------------------------------
    def divmod(self, g: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        """Division by a single polynomial in graded-lex order."""
        if g.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        ge, gc = g.leading_term()
        p = dict(self._terms)
        quot: dict[Exponent, GaussianRational] = {}
        rem: dict[Exponent, GaussianRational] = {}
        gterms = list(g._terms.items())
        while p:
            pe = max(p, key=term_key)
            pc = p[pe]
            if all(a >= b for a, b in zip(pe, ge)):
                se = tuple(a - b for a, b in zip(pe, ge))
                sc = pc / gc
                quot[se] = quot.get(se, ZERO) + sc
                for e, c in gterms:
                    ne = tuple(a + b for a, b in zip(e, se))
                    v = p.get(ne, ZERO) - sc * c
                    if v:
                        p[ne] = v
                    else:
                        p.pop(ne, None)
            else:
                rem[pe] = pc
                del p[pe]
        return (
            MultiPoly._wrap(self.nvars, {e: c for e, c in quot.items() if c}),
            MultiPoly._wrap(self.nvars, rem),
        )

    def exquo(self, g: "MultiPoly") -> "MultiPoly":
        """Exact quotient; raises ``ArithmeticError`` if ``g`` does not divide."""
        if g.is_monomial():
            (ge, gc), = g._terms.items()
            inv = ONE / gc
            out = {}
            for e, c in self._terms.items():
                ne = tuple(a - b for a, b in zip(e, ge))
                if min(ne, default=0) < 0:
                    raise ArithmeticError("inexact polynomial division")
                out[ne] = c * inv
            return MultiPoly._wrap(self.nvars, out)
        q, r = self.divmod(g)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    # -- text ------------------------------------------------------------
    def format(self, names: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = list(names) if names else [f"x{j + 1}" for j in range(self.nvars)]
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
            )
            cs = str(c)
            neg = False
            if c.is_rational() and c.real < 0:
                neg, cs = True, str(-c)
            elif not c.is_rational() and c.real == 0 and c.imag < 0:
                neg, cs = True, str(-c)
            if not c.is_rational() and c.real != 0:
                cs = f"({cs})"
            if mono:
                body = mono if cs == "1" else f"{cs}*{mono}"
            else:
                body = cs
            pieces.append(("- " if neg else "+ ") + body)
        s = " ".join(pieces)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {self.format()!r})"


# ---------------------------------------------------------------------------
# gcd over Q(i)[x_1..x_n]: recursive primitive pseudo-remainder sequences


def _monomial_gcd(m: MultiPoly, f: MultiPoly) -> MultiPoly:
    (me, _), = m.items()
    low = list(me)
    for e in f._terms:
        low = [min(a, b) for a, b in zip(low, e)]
    return MultiPoly._wrap(m.nvars, {tuple(low): ONE})


def _content(f: MultiPoly, v: int) -> MultiPoly:
    g = None
    for c in f.coefficients_in(v).values():
        g = c.monic() if g is None else poly_gcd(g, c)
        if g.is_constant():
            return MultiPoly.const(f.nvars, 1)
    return g if g is not None else MultiPoly.const(f.nvars, 1)


def _prem(a: MultiPoly, b: MultiPoly, v: int) -> MultiPoly:
    db = b.degree_in(v)
    lcb = b.coefficients_in(v)[db]
    r = a
    e = a.degree_in(v) - db + 1
    while r and r.degree_in(v) >= db:
        dr = r.degree_in(v)
        lcr = r.coefficients_in(v)[dr]
        shift = [0] * a.nvars
        shift[v] = dr - db
        r = r * lcb - (lcr * b).mul_monomial(tuple(shift))
        e -= 1
    return r * lcb**e if e > 0 else r


def poly_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Monic greatest common divisor (graded-lex leading coefficient 1)."""
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    n = f.nvars
    if f.is_constant() or g.is_constant():
        return MultiPoly.const(n, 1)
    if f.is_monomial():
        return _monomial_gcd(f, g)
    if g.is_monomial():
        return _monomial_gcd(g, f)
    if f == g:
        return f.monic()
    vf, vg = f.variables(), g.variables()
    common = vf & vg
    if not common:
        return MultiPoly.const(n, 1)
    only_f = vf - vg
    if only_f:
        return poly_gcd(_content(f, min(only_f)), g)
    only_g = vg - vf
    if only_g:
        return poly_gcd(f, _content(g, min(only_g)))
    v = min(common)
    cf, cg = _content(f, v), _content(g, v)
    c = poly_gcd(cf, cg)
    a, b = f.exquo(cf), g.exquo(cg)
    if a.degree_in(v) < b.degree_in(v):
        a, b = b, a
    while True:
        r = _prem(a, b, v)
        if r.is_zero():
            break
        if r.degree_in(v) == 0:
            b = MultiPoly.const(n, 1)
            break
        a, b = b, r.exquo(_content(r, v)).monic()
    if not b.is_constant():
        b = b.exquo(_content(b, v))
    return (c * b).monic()
