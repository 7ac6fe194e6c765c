"""Homogeneous rational potentials: parsing, derivatives, corpus files.

Expression grammar (``^`` binds tighter than unary minus, so ``-q^2`` is
``-(q^2)``)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' ['-'] INT | '^' '(' ['-'] INT ')')?
    atom   := NUMBER | 'i' | NAME | '$' NAME | '(' expr ')'
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
import re
from typing import Iterable, Sequence

from .exact import GaussianRational, MultiPoly, RatFunc, homogeneous_degree
from .exact.ratfunc import degree_witness

__all__ = [
    "ParseError",
    "NotHomogeneousError",
    "Potential",
    "parse_expression",
    "parse_potential",
    "gradient",
    "hessian",
    "restrict_projective",
    "CorpusEntry",
    "read_corpus",
    "parse_corpus",
]


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        caret = f"\n  {text}\n  {' ' * position}^" if text else ""
        super().__init__(f"{message} at position {position}{caret}")


class NotHomogeneousError(ValueError):
    def __init__(self, part: str, deg_a: int, deg_b: int):
        self.part = part
        self.degrees = (deg_a, deg_b)
        super().__init__(
            f"not homogeneous: {part} has monomials of degree {deg_a} and {deg_b}"
        )


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>\$?[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[col]!r}", col, text)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.names = list(names)
        self.n = len(self.names)
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, value: str):
        t = self.take()
        if t[1] != value:
            raise ParseError(f"expected {value!r}, found {t[1] or 'end of input'!r}", t[2], self.text)

    def parse(self) -> RatFunc:
        out = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected token {t[1]!r}", t[2], self.text)
        return out

    def expr(self) -> RatFunc:
        out = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> RatFunc:
        out = self.unary()
        while self.peek()[1] in ("*", "/"):
            op, _, pos = self.take()[1], None, self.toks[self.k - 1][2]
            rhs = self.unary()
            if op == "*":
                out = out * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", pos, self.text)
                out = out / rhs
        return out

    def unary(self) -> RatFunc:
        t = self.peek()
        if t[1] == "-":
            self.take()
            return -self.unary()
        if t[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def _int_exponent(self) -> int:
        paren = self.peek()[1] == "("
        if paren:
            self.take()
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        t = self.take()
        if t[0] != "num" or "." in t[1]:
            raise ParseError("exponent must be an integer", t[2], self.text)
        if paren:
            self.expect(")")
        return sign * int(t[1])

    def power(self) -> RatFunc:
        base = self.atom()
        if self.peek()[1] == "^":
            t = self.take()
            e = self._int_exponent()
            if e < 0 and base.is_zero():
                raise ParseError("zero raised to a negative power", t[2], self.text)
            base = base**e
        return base

    def atom(self) -> RatFunc:
        kind, val, pos = self.take()
        if kind == "num":
            return RatFunc.const(self.n, Fraction(val))
        if kind == "name":
            key = val[1:] if val.startswith("$") else val
            if key in self.names:
                return RatFunc.var(self.n, self.names.index(key))
            if val == "i":
                return RatFunc.const(self.n, GaussianRational(0, 1))
            raise ParseError(f"unknown identifier {val!r}", pos, self.text)
        if val == "(":
            out = self.expr()
            self.expect(")")
            return out
        raise ParseError(f"unexpected token {val or 'end of input'!r}", pos, self.text)


def parse_expression(text: str, names: Sequence[str]) -> RatFunc:
    """Parse an arithmetic expression into an exact rational function."""
    if "i" in names:
        raise ValueError("'i' is reserved for the imaginary unit")
    return _Parser(text, names).parse()


@dataclass(frozen=True)
class Potential:
    """A homogeneous rational potential ``V(q)`` with ``H = |p|²/2 + V``."""

    expr: RatFunc
    varnames: tuple[str, ...]
    degree: int = field(default=None)  # type: ignore[assignment]
    text: str = ""

    def __post_init__(self):
        if len(self.varnames) != self.expr.nvars:
            raise ValueError("one name per variable required")
        if self.nvars < 2:
            raise ValueError("a potential needs at least two degrees of freedom")
        if self.expr.is_zero():
            k = 0 if self.degree is None else self.degree
        else:
            k = homogeneous_degree(self.expr)
            if k is None:
                w = degree_witness(self.expr) or ("expression", 0, 0)
                raise NotHomogeneousError(*w)
        if self.degree is not None and self.degree != k:
            raise NotHomogeneousError("expression", k, self.degree)
        object.__setattr__(self, "degree", k)

    @property
    def nvars(self) -> int:
        return len(self.varnames)

    def __str__(self):
        return self.expr.format(self.varnames)

    def gradient(self) -> "GradientVec":
        return gradient(self)

    def hessian(self) -> "HessianFunc":
        return hessian(self)


@dataclass(frozen=True)
class GradientVec:
    components: tuple[RatFunc, ...]

    def __getitem__(self, i):
        return self.components[i]

    def __len__(self):
        return len(self.components)

    def is_identity(self) -> bool:
        """True when the gradient is exactly ``q`` itself."""
        n = len(self.components)
        return all(c == RatFunc.var(n, i) for i, c in enumerate(self.components))


@dataclass(frozen=True)
class HessianFunc:
    entries: tuple[tuple[RatFunc, ...], ...]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def n(self) -> int:
        return len(self.entries)


def parse_potential(text: str, vars: Sequence[str] | str, degree: int | None = None) -> Potential:
    names = tuple(v.strip() for v in vars.split(",")) if isinstance(vars, str) else tuple(vars)
    expr = parse_expression(text, names)
    return Potential(expr, names, degree, text)


_grad_cache: dict = {}


def gradient(V: Potential) -> GradientVec:
    key = ("g", V.expr, V.varnames)
    if key not in _grad_cache:
        _grad_cache[key] = GradientVec(tuple(V.expr.derivative(i) for i in range(V.nvars)))
    return _grad_cache[key]


def hessian(V: Potential) -> HessianFunc:
    key = ("h", V.expr, V.varnames)
    if key not in _grad_cache:
        g = gradient(V)
        n = V.nvars
        rows = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                rows[i][j] = rows[j][i] = g[j].derivative(i)
        _grad_cache[key] = HessianFunc(tuple(tuple(r) for r in rows))
    return _grad_cache[key]


def restrict_projective(V: Potential) -> RatFunc:
    """``v(z) = V(1, z)`` as a rational function of one variable."""
    if V.nvars != 2:
        raise NotImplementedError("projective restriction is defined for two variables")
    return V.expr.substitute([RatFunc.const(1, 1), RatFunc.var(1, 0)])


# ---------------------------------------------------------------------------
# corpus files: ``name ; vars ; expression`` per line, '#' comments


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    varnames: tuple[str, ...]
    expression: str
    line: int

    def potential(self) -> Potential:
        return parse_potential(self.expression, self.varnames)


def parse_corpus(text: str) -> list[CorpusEntry]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(";")]
        if len(parts) != 3 or not all(parts):
            raise ParseError(f"corpus line {lineno}: expected 'name ; vars ; expression'", 0, raw)
        names = tuple(v.strip() for v in parts[1].split(","))
        out.append(CorpusEntry(parts[0], names, parts[2], lineno))
    return out


def read_corpus(path: str | Path) -> list[CorpusEntry]:
    return parse_corpus(Path(path).read_text(encoding="utf-8"))
