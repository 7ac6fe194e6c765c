"""Search for first integrals polynomial in the momenta.

Phase-space functions are :class:`RatFunc` objects in ``2n`` variables,
positions first, then momenta.  The search solves ``{H, F} = 0`` for

    F = Σ c_{a,β} q^a p^β,   |β| ≤ D,  a in a Laurent box,

as an exact linear system.  ``{H, ·}`` shifts the weight ``2·deg_q + k·deg_p``
by a constant and flips momentum parity, so the system splits into
independent blocks, one per (weight, parity) class.
"""

from __future__ import annotations

import itertools
import logging
from fractions import Fraction
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exact import GaussianRational, MultiPoly, RatFunc, SingularPointError
from .exact.linalg import SparseEliminator
from .numeric import RatFuncArray
from .potential import Potential, gradient

__all__ = [
    "AnsatzTooLarge",
    "MomentumAnsatz",
    "FIBasis",
    "IndependenceReport",
    "phase_space_names",
    "lift",
    "hamiltonian",
    "poisson_bracket",
    "fi_search",
    "independence_check",
    "DEFAULT_CAP",
]

log = logging.getLogger(__name__)

DEFAULT_CAP = 20000

Laurent = dict  # {(q exponents, p exponents): GaussianRational}


class AnsatzTooLarge(ValueError):
    def __init__(self, dimension: int, cap: int):
        self.dimension = dimension
        super().__init__(f"ansatz dimension {dimension} exceeds the cap {cap}")


def phase_space_names(varnames: Sequence[str]) -> tuple[str, ...]:
    moms = [("p" + v[1:]) if v.startswith("q") and len(v) > 1 else f"p_{v}" for v in varnames]
    return tuple(varnames) + tuple(moms)


def lift(f: RatFunc) -> RatFunc:
    """Embed a function of ``q`` into phase space (momenta appended)."""
    n = f.nvars
    return f.substitute([RatFunc.var(2 * n, i) for i in range(n)])


def hamiltonian(V: Potential) -> RatFunc:
    n = V.nvars
    kinetic = sum((RatFunc.var(2 * n, n + i) ** 2 for i in range(n)), RatFunc.const(2 * n, 0))
    return kinetic * Fraction(1, 2) + lift(V.expr)


def poisson_bracket(F: RatFunc, G: RatFunc) -> RatFunc:
    """``Σ ∂F/∂q_i ∂G/∂p_i - ∂F/∂p_i ∂G/∂q_i``."""
    if F.nvars != G.nvars or F.nvars % 2:
        raise ValueError("both functions must live on the same even-dimensional phase space")
    n = F.nvars // 2
    out = RatFunc.const(F.nvars, 0)
    for i in range(n):
        out = out + F.derivative(i) * G.derivative(n + i) - F.derivative(n + i) * G.derivative(i)
    return out


# ---------------------------------------------------------------------------
# ansatz


def _momentum_exponents(n: int, pdeg: int) -> list[tuple[int, ...]]:
    out = []
    for d in range(pdeg + 1):
        for combo in itertools.combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


@dataclass(frozen=True)
class MomentumAnsatz:
    """Momentum degree ``≤ pdeg``; q1 exponents in ``[-A, B]``, others in ``[0, B]``."""

    pdeg: int
    A: int
    B: int
    cap: int = DEFAULT_CAP

    @classmethod
    def default(cls, V: Potential, pdeg: int, cap: int = DEFAULT_CAP) -> "MomentumAnsatz":
        box = 2 * V.expr.den.total_degree() + pdeg
        return cls(pdeg, box, box, cap)

    def q_exponents(self, n: int) -> list[tuple[int, ...]]:
        ranges = [range(-self.A, self.B + 1)] + [range(0, self.B + 1)] * (n - 1)
        return list(itertools.product(*ranges))

    def dimension(self, n: int) -> int:
        return len(self.q_exponents(n)) * len(_momentum_exponents(n, self.pdeg))

    def describe(self, varnames: Sequence[str]) -> str:
        first, rest = varnames[0], ", ".join(varnames[1:])
        return (
            f"F polynomial in momenta of degree <= {self.pdeg}; coefficients Laurent "
            f"polynomials with {first}-exponents in [-{self.A}, {self.B}] and "
            f"{rest}-exponents in [0, {self.B}]"
        )


def _laurent_of(f: RatFunc) -> Laurent | None:
    """Laurent form of a phase-space function, or None if its denominator is not a monomial."""
    if not f.den.is_monomial():
        return None
    (dexp, dc), = f.den.items()
    n = f.nvars // 2
    out: Laurent = {}
    for e, c in f.num.items():
        q = tuple(e[i] - dexp[i] for i in range(n))
        p = tuple(e[n + i] - dexp[n + i] for i in range(n))
        if min(p, default=0) < 0:
            return None
        out[(q, p)] = c / dc
    return out


def _to_ratfunc(vec: Laurent, n: int) -> RatFunc:
    shift = [0] * n
    for (q, _), _c in vec.items():
        for i in range(n):
            shift[i] = max(shift[i], -q[i])
    num = MultiPoly(2 * n, {tuple(q[i] + shift[i] for i in range(n)) + p: c for (q, p), c in vec.items()})
    den = MultiPoly.monomial(tuple(shift) + (0,) * n)
    return RatFunc(num, den)


@dataclass(frozen=True)
class FIBasis:
    basis: tuple[RatFunc, ...]
    independent_of_H: tuple[RatFunc, ...]
    ansatz: MomentumAnsatz
    dimension: int
    blocks: int
    largest_block: int
    h_span: int
    notes: tuple[str, ...] = field(default_factory=tuple)

    def summary(self, varnames: Sequence[str]) -> dict:
        names = phase_space_names(varnames)
        return {
            "ansatz": {"pdeg": self.ansatz.pdeg, "A": self.ansatz.A, "B": self.ansatz.B},
            "scope": self.ansatz.describe(varnames),
            "dimension": self.dimension,
            "blocks": self.blocks,
            "largest_block": self.largest_block,
            "nullspace_dimension": len(self.basis),
            "h_span_dimension": self.h_span,
            "independent_of_H": [f.format(names) for f in self.independent_of_H],
        }


def _image(col, n, D_terms, N_terms) -> Laurent:
    """``D·{H, q^a p^β}`` as a Laurent dictionary."""
    a, beta = col
    out: Laurent = defaultdict(lambda: GaussianRational(0))
    for i in range(n):
        if a[i]:
            p = tuple(b + (j == i) for j, b in enumerate(beta))
            for e, c in D_terms:
                q = tuple(a[j] - (j == i) + e[j] for j in range(n))
                out[(q, p)] += c * a[i]
        if beta[i]:
            p = tuple(b - (j == i) for j, b in enumerate(beta))
            for e, c in N_terms[i]:
                q = tuple(a[j] + e[j] for j in range(n))
                out[(q, p)] -= c * beta[i]
    return {k: v for k, v in out.items() if v}


def fi_search(V: Potential, ansatz: MomentumAnsatz) -> FIBasis:
    n = V.nvars
    dim = ansatz.dimension(n)
    if dim > ansatz.cap:
        raise AnsatzTooLarge(dim, ansatz.cap)

    # clear the denominators of grad V with one polynomial D
    grad = gradient(V).components
    D = grad[0].den
    for g in grad[1:]:
        D = (D * g.den).exquo(_gcd(D, g.den))
    N = [g.num * D.exquo(g.den) for g in grad]
    D_terms = list(D.items())
    N_terms = [list(p.items()) for p in N]

    qexps = ansatz.q_exponents(n)
    pexps = _momentum_exponents(n, ansatz.pdeg)
    k = V.degree
    blocks: dict[tuple[int, int], list] = defaultdict(list)
    for a in qexps:
        for b in pexps:
            blocks[(2 * sum(a) + k * sum(b), sum(b) % 2)].append((a, b))

    basis_vecs: list[Laurent] = []
    largest = 0
    seen_rows: dict = {}
    for key in sorted(blocks):
        cols = blocks[key]
        largest = max(largest, len(cols))
        rows: dict = defaultdict(dict)
        for j, col in enumerate(cols):
            for r, c in _image(col, n, D_terms, N_terms).items():
                rows[r][j] = c
        for r in rows:
            # blocks must not share equations, otherwise the split is invalid
            if seen_rows.setdefault(r, key) != key:
                raise ArithmeticError("weight blocks overlap; potential not homogeneous?")
        el = SparseEliminator(len(cols))
        for row in rows.values():
            el.add_row(row)
        for vec in el.nullspace():
            basis_vecs.append({cols[j]: c for j, c in vec.items()})
    log.info(
        "fi_search: ansatz dimension %d in %d blocks (largest %d), nullspace %d",
        dim, len(blocks), largest, len(basis_vecs),
    )

    # functions of H inside the ansatz
    H = hamiltonian(V)
    in_box = set(itertools.product(qexps, pexps))
    h_vecs = []
    Hm = RatFunc.const(2 * n, 1)
    for m in range(ansatz.pdeg // 2 + 1):
        lv = _laurent_of(Hm)
        if lv is not None and set(lv) <= in_box:
            h_vecs.append(lv)
        Hm = Hm * H
    index = {col: i for i, col in enumerate(sorted(in_box))}
    el = SparseEliminator(len(index))
    h_span = sum(el.add_row({index[c]: v for c, v in hv.items()}) for hv in h_vecs)
    independent = []
    for vec in basis_vecs:
        if el.add_row({index[c]: v for c, v in vec.items()}):
            independent.append(vec)
    log.info("fi_search: %d functions of H in span, %d further integrals", h_span, len(independent))

    return FIBasis(
        basis=tuple(_to_ratfunc(v, n) for v in basis_vecs),
        independent_of_H=tuple(_to_ratfunc(v, n) for v in independent),
        ansatz=ansatz,
        dimension=dim,
        blocks=len(blocks),
        largest_block=largest,
        h_span=h_span,
    )


def _gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    from .exact import poly_gcd

    return poly_gcd(a, b)


# ---------------------------------------------------------------------------
# functional independence


@dataclass(frozen=True)
class IndependenceReport:
    ranks: tuple[int, ...]
    count: int

    @property
    def rank(self) -> int:
        return max(self.ranks)

    @property
    def independent(self) -> bool:
        return self.rank == self.count


def independence_check(
    functions: Sequence[RatFunc], samples: int = 5, rng_seed: int = 0, tol: float = 1e-8
) -> IndependenceReport:
    """Numeric rank of the Jacobian of ``functions`` at random points."""
    funcs = list(functions)
    m = funcs[0].nvars
    jac = RatFuncArray([f.derivative(j) for f in funcs for j in range(m)], (len(funcs), m))
    rng = np.random.default_rng(rng_seed)
    ranks = []
    attempts = 0
    while len(ranks) < samples and attempts < 20 * samples:
        attempts += 1
        x = rng.normal(size=m) + 1j * rng.normal(size=m)
        try:
            J = jac(x)
        except SingularPointError:
            continue
        if not np.all(np.isfinite(J)):
            continue
        s = np.linalg.svd(J, compute_uv=False)
        ranks.append(int(np.sum(s > tol * max(1.0, float(s[0])))))
    if not ranks:
        raise ArithmeticError("every sample point was singular")
    return IndependenceReport(tuple(ranks), len(funcs))
