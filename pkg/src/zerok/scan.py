"""Parameter families of planar degree-zero potentials.

A family is an expression in the positions and in parameters written
``$a``, ``$b``, ...  Two modes are offered:

* grid: analyze the family at every point of a parameter grid;
* solve: impose semi-simplicity ``v'(z) + z v''(z) = 0`` at both Darboux
  points ``z = ±i`` and solve for the parameters exactly.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Sequence

from .exact import GaussianRational, MultiPoly, RatFunc, as_qi, gaussian_rational_roots, homogeneous_degree
from .exact.linalg import rref
from .exact.unipoly import UniPoly
from .obstruction import AnalysisOptions, Report, analyze
from .potential import NotHomogeneousError, Potential, parse_expression

__all__ = [
    "Family",
    "ScanRow",
    "SolveResult",
    "parse_family",
    "grid_scan",
    "constraint_solve",
]

_PARAM = re.compile(r"\$([A-Za-z_][A-Za-z_0-9]*)")


@dataclass(frozen=True)
class Family:
    """``expr`` lives in the ring (positions..., parameters...)."""

    text: str
    varnames: tuple[str, ...]
    params: tuple[str, ...]
    expr: RatFunc
    degree: int

    @property
    def n(self) -> int:
        return len(self.varnames)

    def instantiate(self, values: Sequence) -> Potential:
        n, m = self.n, len(self.params)
        images = [RatFunc.var(n, i) for i in range(n)] + [RatFunc.const(n, as_qi(v)) for v in values]
        if len(values) != m:
            raise ValueError(f"expected {m} parameter values")
        label = ", ".join(f"{p}={as_qi(v)}" for p, v in zip(self.params, values))
        expr = self.expr.substitute(images)
        return Potential(expr, self.varnames, self.degree, f"{expr.format(self.varnames)}  [{label}]")


def parse_family(text: str, vars: Sequence[str] | str, degree: int | None = 0) -> Family:
    names = tuple(v.strip() for v in vars.split(",")) if isinstance(vars, str) else tuple(vars)
    params = tuple(dict.fromkeys(_PARAM.findall(text)))
    if not params:
        raise ValueError("family has no $parameters")
    clash = set(params) & set(names)
    if clash:
        raise ValueError(f"parameter names clash with variables: {sorted(clash)}")
    expr = parse_expression(text, names + params)
    k = homogeneous_degree(expr, list(range(len(names))))
    if k is None:
        raise NotHomogeneousError("family", 0, 0)
    if degree is not None and k != degree:
        raise NotHomogeneousError("family", k, degree)
    return Family(text, names, params, expr, k)


# ---------------------------------------------------------------------------
# grid


@dataclass(frozen=True)
class ScanRow:
    values: tuple[GaussianRational, ...]
    report: Report | None
    skipped: str = ""


def grid_scan(
    family: Family,
    grid: Sequence[Sequence],
    options: AnalysisOptions = AnalysisOptions(),
    allow_equal: bool = False,
) -> list[ScanRow]:
    """Analyze every point of the product grid.

    Points with two equal parameters are skipped (the family degenerates)
    unless ``allow_equal``.
    """
    rows = []
    for values in itertools.product(*grid):
        vals = tuple(as_qi(v) for v in values)
        if not allow_equal and len(set(vals)) < len(vals):
            rows.append(ScanRow(vals, None, "equal parameters"))
            continue
        V = family.instantiate(vals)
        rows.append(ScanRow(vals, analyze(V, options)))
    return rows


# ---------------------------------------------------------------------------
# exact solve


@dataclass(frozen=True)
class SolveResult:
    params: tuple[str, ...]
    conditions: tuple[MultiPoly, ...]  # raw conditions at z = i, z = -i
    reduced: tuple[MultiPoly, ...]  # reduced row echelon form over parameter monomials
    solutions: tuple[dict[str, GaussianRational], ...]
    potentials: tuple[str, ...]
    rejected: tuple[tuple[dict[str, GaussianRational], str], ...]

    def format_conditions(self) -> list[str]:
        return [f"{p.format(self.params)} = 0" for p in self.reduced]


def _restrict_family(f: Family) -> RatFunc:
    """``v(z; params) = V(1, z; params)`` in the ring (z, params...)."""
    if f.n != 2:
        raise NotImplementedError("constraint solving is implemented for two degrees of freedom")
    m = len(f.params)
    ring = 1 + m
    images = [RatFunc.const(ring, 1), RatFunc.var(ring, 0)] + [RatFunc.var(ring, 1 + j) for j in range(m)]
    return f.expr.substitute(images)


def _at(g: RatFunc, z: GaussianRational, m: int) -> RatFunc:
    return g.substitute([RatFunc.const(m, z)] + [RatFunc.var(m, j) for j in range(m)])


def _linear_pivot(p: MultiPoly):
    """A variable appearing only as ``c * x_j`` with constant ``c``."""
    for j in sorted(p.variables()):
        coeffs = p.coefficients_in(j)
        if max(coeffs) == 1 and coeffs[1].is_constant():
            return j, coeffs[1].constant_value(), coeffs.get(0, MultiPoly(p.nvars, {}))
    return None


def _solve(eqs: list[MultiPoly], m: int) -> list[dict[int, GaussianRational]]:
    """Finite solution set of a triangularizable polynomial system."""
    eqs = [e for e in eqs if e]
    if not eqs:
        raise ValueError("parameter constraints leave a continuum of solutions")
    for e in eqs:
        if e.is_constant():
            return []
    # eliminate a linearly occurring variable
    for e in eqs:
        piv = _linear_pivot(e)
        if piv is None:
            continue
        j, c, rest = piv
        image = rest.scale(-1 / c)  # x_j = -rest/c
        images = [image if i == j else MultiPoly.var(m, i) for i in range(m)]
        sub = [o.substitute(images) for o in eqs if o is not e]
        out = []
        for sol in _solve(sub, m) if sub else _free(j, e, m):
            val = image.evaluate([sol.get(i, 0) for i in range(m)])
            full = dict(sol)
            full[j] = val
            out.append(full)
        return out
    variables = set().union(*(e.variables() for e in eqs))
    if len(variables) == 1:
        (j,) = variables
        g = None
        for e in eqs:
            u = UniPoly.from_multipoly(e, j)
            g = u if g is None else g.gcd(u)
        if g.degree <= 0:
            return []
        roots = [r for r, _ in gaussian_rational_roots(g)]
        if sum(mult for _, mult in gaussian_rational_roots(g)) != g.degree:
            raise ArithmeticError(f"roots outside Q(i): {g.format('x')}")
        return [{j: r} for r in roots]
    raise NotImplementedError("constraint system is not triangular; cannot solve exactly")


def _free(j, e, m):
    vars_left = e.variables() - {j}
    if vars_left:
        raise ValueError("parameter constraints leave a continuum of solutions")
    return [{}]


def constraint_solve(family: Family, allow_equal: bool = False) -> SolveResult:
    if family.degree != 0:
        raise ValueError("semi-simplicity conditions are set up for degree 0")
    m = len(family.params)
    v = _restrict_family(family)
    dv = v.derivative(0)
    cond = dv + RatFunc.var(1 + m, 0) * dv.derivative(0)
    i = GaussianRational(0, 1)
    raw = []
    for z in (i, -i):
        c = _at(cond, z, m)
        raw.append(c.num)
    # reduce over parameter monomials, highest graded-lex first
    monos = sorted({e for p in raw for e in p.terms}, key=lambda e: (sum(e), e), reverse=True)
    idx = {e: k for k, e in enumerate(monos)}
    rows = [{idx[e]: c for e, c in p.items()} for p in raw]
    reduced = [
        MultiPoly(m, {monos[k]: c for k, c in row.items()}) for row in rref(rows, len(monos))
    ]
    sols = _solve(list(reduced), m)

    dv_at = [(z, _at(dv, z, m)) for z in (i, -i)]
    keep, rejected, pots = [], [], []
    for s in sorted(sols, key=lambda s: [(s[j].real, s[j].imag) for j in range(m)]):
        named = {family.params[j]: s[j] for j in range(m)}
        pt = [s[j] for j in range(m)]
        if not allow_equal and len(set(pt)) < m:
            rejected.append((named, "equal parameters"))
            continue
        vanish = [str(z) for z, g in dv_at if g.num.evaluate(pt) == 0]
        if vanish:
            rejected.append((named, f"v'(z) = 0 at z = {', '.join(vanish)}: not a proper Darboux point"))
            continue
        keep.append(named)
        V = family.instantiate(pt)
        text = V.expr.format(family.varnames)
        if text not in pots:
            pots.append(text)
    return SolveResult(family.params, tuple(raw), tuple(reduced), tuple(keep), tuple(pots), tuple(rejected))
