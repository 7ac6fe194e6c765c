"""Hessian spectra at Darboux points: eigenvalues, Jordan blocks, semi-simplicity.

Exact path (matrices over Q(i)): characteristic polynomial, exact integer
and Gaussian-rational roots, Jordan block sizes from the rank sequence of
``(A - λI)^j``, and semi-simplicity from a squarefree minimal polynomial.

Numeric path (complex floats): clustered eigenvalues, integer detection by
rounding plus a residual test, and block sizes from SVD ranks.  Anything the
thresholds cannot separate is flagged ``indeterminate``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .darboux import DarbouxPointNumeric, ProjectiveDarboux
from .exact import GaussianRational, RatFunc, UniPoly, as_qi, gaussian_rational_roots, integer_roots
from .exact.linalg import (
    Matrix,
    charpoly,
    identity,
    mat_mul,
    mat_scale,
    mat_sub,
    minimal_polynomial,
    rank,
)
from .exact.unipoly import squarefree_decomposition
from .numeric import RatFuncArray
from .potential import Potential, hessian

__all__ = [
    "HessianAtPoint",
    "JordanBlockDesc",
    "Eigenvalue",
    "SpectralData",
    "hessian_at_2d",
    "hessian_at_numeric",
    "hessian_at_exact",
    "eigen_structure",
    "is_semisimple",
    "rank_sequence",
    "fmt_scalar",
    "NUMERIC_INT_TOL",
    "NUMERIC_RANK_TOL",
]

Scalar = Union[GaussianRational, complex]

NUMERIC_INT_TOL = 1e-7
NUMERIC_RANK_TOL = 1e-8
CLUSTER_TOL = 1e-5
SPLIT_TOL = 1e-10


def fmt_scalar(x: Scalar) -> str:
    """Exact values print exactly; floats with 10 significant digits."""
    if isinstance(x, GaussianRational):
        return str(x)
    z = complex(x)
    if abs(z.imag) < 1e-12 * max(1.0, abs(z)):
        return f"{z.real:.10g}"
    return f"{z.real:.10g}{z.imag:+.10g}i"


@dataclass(frozen=True)
class HessianAtPoint:
    entries: tuple[tuple[Scalar, ...], ...]
    exact: bool

    @property
    def n(self) -> int:
        return len(self.entries)

    def matrix(self) -> Matrix:
        if not self.exact:
            raise TypeError("numeric Hessian has no exact matrix")
        return [list(r) for r in self.entries]

    def array(self) -> np.ndarray:
        return np.array([[complex(x) for x in r] for r in self.entries], dtype=complex)

    def is_symmetric(self) -> bool:
        n = self.n
        if self.exact:
            return all(self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(n))
        a = self.array()
        return bool(np.allclose(a, a.T, rtol=1e-10, atol=1e-12))


@dataclass(frozen=True)
class JordanBlockDesc:
    eigenvalue: Scalar
    size: int
    exact: bool = True

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("block size must be positive")

    def __str__(self):
        return f"B({fmt_scalar(self.eigenvalue)}, {self.size})"


@dataclass(frozen=True)
class Eigenvalue:
    value: Scalar
    multiplicity: int
    exact: bool
    is_integer: bool


@dataclass(frozen=True)
class SpectralData:
    char_poly: UniPoly | None
    eigenvalues: tuple[Eigenvalue, ...]
    blocks: tuple[JordanBlockDesc, ...]
    semisimple: bool
    all_integer: bool
    exact: bool
    indeterminate: bool = False
    min_poly: UniPoly | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def n(self) -> int:
        return sum(e.multiplicity for e in self.eigenvalues)


# ---------------------------------------------------------------------------
# Hessian evaluation


def hessian_at_2d(pd: ProjectiveDarboux, v: RatFunc) -> HessianAtPoint:
    """Closed-form planar Hessian in terms of ``v = V(1, z)`` at ``z*``.

    Only ``x*^-2`` enters, so the matrix stays in Q(i).
    """
    z = pd.z_star
    v1 = v.derivative(0).evaluate([z])
    v2 = v.derivative(0).derivative(0).evaluate([z])
    s = 1 / pd.x_star_sq
    off = -(v1 + z * v2) * s
    return HessianAtPoint(((-v2 * s - 2, off), (off, v2 * s)), exact=True)


def hessian_at_exact(V: Potential, d: Sequence) -> HessianAtPoint:
    h = hessian(V)
    pt = [as_qi(x) for x in d]
    n = V.nvars
    return HessianAtPoint(
        tuple(tuple(h[i, j].evaluate(pt) for j in range(n)) for i in range(n)), exact=True
    )


def hessian_at_numeric(V: Potential, dp: DarbouxPointNumeric) -> HessianAtPoint:
    h = hessian(V)
    n = V.nvars
    arr = RatFuncArray([h[i, j] for i in range(n) for j in range(n)], (n, n))(dp.vector)
    return HessianAtPoint(tuple(tuple(complex(x) for x in row) for row in arr), exact=False)


# ---------------------------------------------------------------------------
# exact path


def rank_sequence(a: Matrix, lam, upto: int) -> list[int]:
    """``[rank (A - λI)^j for j = 0..upto]``."""
    n = len(a)
    shifted = mat_sub(a, mat_scale(identity(n), as_qi(lam)))
    out = [n]
    power = identity(n)
    for _ in range(upto):
        power = mat_mul(power, shifted)
        out.append(rank(power, n))
    return out


def _blocks_from_ranks(ranks: list[int]) -> dict[int, int]:
    """Block-size histogram ``{size: count}`` from a rank sequence."""
    ge = [ranks[j - 1] - ranks[j] for j in range(1, len(ranks))] + [0]
    return {j: ge[j - 1] - ge[j] for j in range(1, len(ranks)) if ge[j - 1] - ge[j] > 0}


def _exact_structure(a: Matrix) -> SpectralData:
    n = len(a)
    chi = charpoly(a)
    eigen: list[Eigenvalue] = []
    blocks: list[JordanBlockDesc] = []
    rest = chi
    notes = []
    for lam, m in gaussian_rational_roots(chi):
        eigen.append(Eigenvalue(lam, m, True, lam.is_integer()))
        for size, count in sorted(_blocks_from_ranks(rank_sequence(a, lam, m)).items()):
            blocks.extend([JordanBlockDesc(lam, size)] * count)
        rest = rest.exquo(UniPoly([-lam, 1]) ** m)
    # integer roots are confirmed separately: the all-integer claim must not
    # hinge on rationalising floating-point roots
    ints = dict(integer_roots(chi))
    for e in eigen:
        if e.is_integer and ints.get(int(e.value)) != e.multiplicity:
            raise ArithmeticError("integer root bookkeeping mismatch")
    if sum(ints.values()) != sum(e.multiplicity for e in eigen if e.is_integer):
        raise ArithmeticError("integer root missed by the Gaussian-rational search")

    numeric_blocks_needed = False
    if rest.degree > 0:
        for g, mult in squarefree_decomposition(rest):
            for r in g.numeric_roots():
                eigen.append(Eigenvalue(complex(r), mult, False, False))
                if mult == 1:
                    blocks.append(JordanBlockDesc(complex(r), 1, exact=False))
                else:
                    numeric_blocks_needed = True
        notes.append(f"irreducible-over-Q(i) factor: {rest.format('x')}")

    mp = minimal_polynomial(a)
    semisimple = mp.is_squarefree()
    indeterminate = False
    if numeric_blocks_needed:
        num = _numeric_structure(np.array([[complex(x) for x in r] for r in a]))
        for b in num.blocks:
            if not isinstance(b.eigenvalue, GaussianRational) and not any(
                e.exact and abs(complex(e.value) - b.eigenvalue) < 1e-6 for e in eigen
            ):
                blocks.append(JordanBlockDesc(b.eigenvalue, b.size, exact=False))
        indeterminate = num.indeterminate
    if not indeterminate and semisimple != all(b.size == 1 for b in blocks):
        indeterminate = True
        notes.append("block sizes of irrational eigenvalues disagree with the minimal polynomial")
    return SpectralData(
        char_poly=chi,
        eigenvalues=tuple(eigen),
        blocks=tuple(blocks),
        semisimple=semisimple,
        all_integer=all(e.is_integer for e in eigen),
        exact=True,
        indeterminate=indeterminate,
        min_poly=mp,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# numeric path


def _numeric_rank(m: np.ndarray, scale: float) -> tuple[int, bool]:
    """Rank at NUMERIC_RANK_TOL, plus whether some singular value sits in the
    grey zone below CLUSTER_TOL where the decision is not trustworthy."""
    s = np.linalg.svd(m, compute_uv=False)
    lo, hi = NUMERIC_RANK_TOL * max(1.0, scale), CLUSTER_TOL * max(1.0, scale)
    return int(np.sum(s > lo)), bool(np.any((s > lo) & (s < hi)))


def _numeric_structure(a: np.ndarray) -> SpectralData:
    n = a.shape[0]
    norm = float(np.linalg.norm(a, 2)) if n else 0.0
    scale = max(1.0, norm)
    w = np.linalg.eigvals(a)
    # single-linkage clustering
    order = sorted(range(n), key=lambda k: (w[k].real, w[k].imag))
    clusters: list[list[complex]] = []
    for k in order:
        for c in clusters:
            if min(abs(w[k] - x) for x in c) < CLUSTER_TOL * scale:
                c.append(w[k])
                break
        else:
            clusters.append([w[k]])

    eigen, blocks, notes = [], [], []
    indeterminate = False
    for c in clusters:
        m = len(c)
        mu = complex(np.mean(c))
        spread = max(abs(x - mu) for x in c)
        nearest = complex(round(mu.real), 0)
        is_int = False
        if abs(mu - nearest) < NUMERIC_INT_TOL * scale:
            smin = np.linalg.svd(a - nearest * np.eye(n), compute_uv=False)[-1]
            if smin < NUMERIC_INT_TOL * scale:
                is_int = True
                mu = nearest
        shifted = a - mu * np.eye(n)
        ranks = [n]
        grey = False
        power = np.eye(n, dtype=complex)
        for _ in range(m):
            power = power @ shifted
            pscale = max(1.0, float(np.linalg.norm(power, 2)), scale ** len(ranks))
            r, g = _numeric_rank(power, pscale)
            ranks.append(r)
            grey = grey or (g and m > 1)
        hist = _blocks_from_ranks(ranks)
        if grey:
            indeterminate = True
            notes.append(f"rank of (A - {mu:.6g} I)^j undecidable at the numeric thresholds")
        elif sum(s * k for s, k in hist.items()) != m or n - ranks[-1] != m:
            indeterminate = True
            notes.append(f"rank sequence {ranks} inconsistent with multiplicity {m} near {mu:.6g}")
        elif m > 1 and hist == {1: m} and spread > SPLIT_TOL * scale:
            indeterminate = True
            notes.append(f"{m} eigenvalues within {spread:.2e} of {mu:.6g} but not resolved")
        value = mu
        eigen.append(Eigenvalue(value, m, False, is_int))
        for size, count in sorted(hist.items()):
            blocks.extend([JordanBlockDesc(value, size, exact=False)] * count)
    semisimple = all(b.size == 1 for b in blocks)
    return SpectralData(
        char_poly=None,
        eigenvalues=tuple(eigen),
        blocks=tuple(blocks),
        semisimple=semisimple,
        all_integer=all(e.is_integer for e in eigen),
        exact=False,
        indeterminate=indeterminate,
        notes=tuple(notes),
    )


def eigen_structure(hd: HessianAtPoint) -> SpectralData:
    if hd.exact:
        return _exact_structure(hd.matrix())
    return _numeric_structure(hd.array())


def is_semisimple(hd: HessianAtPoint | SpectralData) -> tuple[bool, JordanBlockDesc | None]:
    """Semi-simplicity plus the largest offending block as witness."""
    sd = hd if isinstance(hd, SpectralData) else eigen_structure(hd)
    if sd.indeterminate:
        raise ArithmeticError("Jordan structure is indeterminate at the numeric thresholds")
    if sd.semisimple:
        return True, None
    witness = max((b for b in sd.blocks if b.size > 1), key=lambda b: b.size)
    return False, witness
