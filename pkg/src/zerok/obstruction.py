"""Integrability verdicts at Darboux points.

Degree zero: every Hessian eigenvalue must be an integer and the Hessian
must be semi-simple.  Other degrees: every pair ``(k, λ)`` must lie in the
Morales-Ramis table, and for ``k ∉ {-2, 0, 2}`` the Jordan-block rules apply
(no block of size ≥ 3; a size-2 block needs a table row above 2).

All verdicts are necessary conditions only.  Every negative verdict carries
certificates that can be re-checked against the Hessian alone.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, asdict
from enum import Enum
from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence, Union

import numpy as np

from . import __version__
from .darboux import (
    DEFAULT_DEDUP,
    DEFAULT_SEEDS,
    DEFAULT_TOL,
    DarbouxContinuum,
    DarbouxPointNumeric,
    ProjectiveDarboux,
    darboux_2d,
    darboux_nd,
    embed_2d,
    exact_representative,
)
from .exact import GaussianRational, UniPoly, as_qi, integer_roots
from .exact.linalg import charpoly
from .potential import Potential, restrict_projective
from .spectral import (
    NUMERIC_INT_TOL,
    HessianAtPoint,
    JordanBlockDesc,
    SpectralData,
    eigen_structure,
    fmt_scalar as _fmt,
    hessian_at_2d,
    hessian_at_exact,
    hessian_at_numeric,
    rank_sequence,
)
from .variational import Alpha1Certificate, alpha1_for_eigenvalue

__all__ = [
    "Status",
    "TableFamily",
    "TableRow",
    "TABLE",
    "TableRowMatch",
    "NonIntegerEigenvalue",
    "JordanBlock",
    "TableMiss",
    "JordanRowRule",
    "Certificate",
    "Verdict",
    "AnalysisOptions",
    "PointAnalysis",
    "Report",
    "rationalize",
    "mr_table_membership",
    "degree_zero_check",
    "table_check",
    "jordan_obstruction",
    "recheck",
    "combine_status",
    "analyze",
]

Scalar = Union[GaussianRational, complex]
RATIONALIZE_MAX_DEN = 10**6
RATIONALIZE_TOL = 1e-9


class Status(str, Enum):
    NON_INTEGRABLE = "NonIntegrable"
    HOLD = "NecessaryConditionsHold"
    INDETERMINATE = "Indeterminate"
    NOT_APPLICABLE = "NotApplicable"


# ---------------------------------------------------------------------------
# the table, as data
#
# A family is λ = α + β(γ + δp)², or for rows 2-3 a quadratic whose
# coefficients depend on k.  ``k_values`` is the row's k-predicate (None means
# every k).


@dataclass(frozen=True)
class TableFamily:
    alpha: Fraction
    beta: Fraction
    gamma: int
    delta: int

    def value(self, p: int) -> Fraction:
        return self.alpha + self.beta * (self.gamma + self.delta * p) ** 2

    def quadratic(self, k: int) -> tuple[Fraction, Fraction, Fraction]:
        b, g, d = self.beta, self.gamma, self.delta
        return b * d * d, 2 * b * g * d, self.alpha + b * g * g


@dataclass(frozen=True)
class _Row2:
    def value(self, k: int, p: int) -> Fraction:
        return p + Fraction(k, 2) * p * (p - 1)

    def quadratic(self, k: int) -> tuple[Fraction, Fraction, Fraction]:
        return Fraction(k, 2), 1 - Fraction(k, 2), Fraction(0)


@dataclass(frozen=True)
class _Row3:
    def value(self, k: int, p: int) -> Fraction:
        return (Fraction(k - 1, k) + p * (p + 1) * k) / 2

    def quadratic(self, k: int) -> tuple[Fraction, Fraction, Fraction]:
        return Fraction(k, 2), Fraction(k, 2), Fraction(k - 1, 2 * k)


@dataclass(frozen=True)
class TableRow:
    number: int
    k_values: tuple[int, ...] | None
    families: tuple = ()
    arbitrary: bool = False

    def applies(self, k: int) -> bool:
        return self.k_values is None or k in self.k_values

    def family_value(self, family: int, k: int, p: int) -> Fraction:
        f = self.families[family - 1]
        return f.value(k, p) if isinstance(f, (_Row2, _Row3)) else f.value(p)


def _fams(*rows) -> tuple[TableFamily, ...]:
    return tuple(TableFamily(Fraction(a), Fraction(b), g, d) for a, b, g, d in rows)


_K3 = ("-1/24", "1/6", 1, 3), ("-1/24", "3/32", 1, 4), ("-1/24", "3/50", 1, 5), ("-1/24", "3/50", 2, 5)
_KM3 = ("25/24", "-1/6", 1, 3), ("25/24", "-3/32", 1, 4), ("25/24", "-3/50", 1, 5), ("25/24", "-3/50", 2, 5)

TABLE: tuple[TableRow, ...] = (
    TableRow(1, (2, -2), arbitrary=True),
    TableRow(2, None, (_Row2(),)),
    TableRow(3, None, (_Row3(),)),
    TableRow(4, (3,), _fams(*_K3)),
    TableRow(5, (4,), _fams(("-1/8", "2/9", 1, 3))),
    TableRow(6, (5,), _fams(("-9/40", "5/18", 1, 3), ("-9/40", "1/10", 2, 5))),
    TableRow(7, (-3,), _fams(*_KM3)),
    TableRow(8, (-4,), _fams(("9/8", "-2/9", 1, 3))),
    TableRow(9, (-5,), _fams(("49/40", "-5/18", 1, 3), ("49/40", "-1/10", 2, 5))),
)


@dataclass(frozen=True)
class TableRowMatch:
    row: int
    family: int
    p: int | None
    lam: Scalar

    def revalidate(self, k: int) -> bool:
        row = TABLE[self.row - 1]
        if not row.applies(k):
            return False
        if row.arbitrary:
            return True
        lam = rationalize(self.lam)
        return lam is not None and row.family_value(self.family, k, self.p) == lam

    def __str__(self):
        return f"row {self.row}" if self.p is None else f"row {self.row} family {self.family} p={self.p}"


def rationalize(lam) -> Fraction | None:
    """Exact rational value of ``lam``, or None when it is not (close to) rational."""
    if isinstance(lam, GaussianRational):
        return lam.real if lam.is_rational() else None
    if isinstance(lam, (int, Fraction)):
        return Fraction(lam)
    z = complex(lam)
    scale = max(1.0, abs(z))
    if abs(z.imag) > RATIONALIZE_TOL * scale or not np.isfinite(z.real):
        return None
    r = Fraction(z.real).limit_denominator(RATIONALIZE_MAX_DEN)
    return r if abs(float(r) - z.real) <= RATIONALIZE_TOL * scale else None


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    return Fraction(rn, rd) if rn * rn == n and rd * rd == d else None


def _integer_solutions(c2: Fraction, c1: Fraction, c0: Fraction) -> list[int]:
    """Integer p with c2 p² + c1 p + c0 = 0."""
    if c2 == 0:
        if c1 == 0:
            raise ValueError("degenerate table family")
        p = -c0 / c1
        return [int(p)] if p.denominator == 1 else []
    s = _rational_sqrt(c1 * c1 - 4 * c2 * c0)
    if s is None:
        return []
    roots = {(-c1 + s) / (2 * c2), (-c1 - s) / (2 * c2)}
    return sorted(int(r) for r in roots if r.denominator == 1)


def mr_table_membership(k: int, lam) -> list[TableRowMatch]:
    if k == 0:
        raise ValueError("the table is for non-zero degree")
    out: list[TableRowMatch] = []
    exact_lam = rationalize(lam)
    for row in TABLE:
        if not row.applies(k):
            continue
        if row.arbitrary:
            out.append(TableRowMatch(row.number, 1, None, lam))
            continue
        if exact_lam is None:
            continue
        for fi, fam in enumerate(row.families, 1):
            c2, c1, c0 = fam.quadratic(k)
            for p in _integer_solutions(c2, c1, c0 - exact_lam):
                m = TableRowMatch(row.number, fi, p, lam)
                assert m.revalidate(k)
                out.append(m)
    return out


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class NonIntegerEigenvalue:
    """``value`` is a non-integer eigenvalue.

    For eigenvalues outside Q(i) ``factor`` is the exact characteristic
    polynomial factor carrying them and ``value`` a numeric approximation.
    """

    value: Scalar
    exact: bool
    factor: UniPoly | None = None
    kind = "NonIntegerEigenvalue"

    def __str__(self):
        if self.factor is not None:
            return f"NonIntegerEigenvalue(roots of {self.factor.format('x')})"
        return f"NonIntegerEigenvalue({_fmt(self.value)})"


@dataclass(frozen=True)
class JordanBlock:
    value: Scalar
    size: int
    exact: bool
    kind = "JordanBlock"

    def __str__(self):
        return f"JordanBlock(B({_fmt(self.value)}, {self.size}))"


@dataclass(frozen=True)
class TableMiss:
    k: int
    value: Scalar
    numeric: bool
    kind = "TableMiss"

    def __str__(self):
        tag = ", numeric" if self.numeric else ""
        return f"TableMiss(k={self.k}, λ={_fmt(self.value)}{tag})"


@dataclass(frozen=True)
class JordanRowRule:
    value: Scalar
    rows: tuple[int, ...]
    exact: bool
    kind = "JordanRowRule"

    def __str__(self):
        rows = ",".join(map(str, self.rows)) or "none"
        return f"JordanRowRule(λ={_fmt(self.value)}, rows={rows})"


Certificate = Union[NonIntegerEigenvalue, JordanBlock, TableMiss, JordanRowRule]


@dataclass(frozen=True)
class Verdict:
    status: Status
    reasons: tuple[Certificate, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.status == Status.NON_INTEGRABLE and not self.reasons:
            raise ValueError("a NonIntegrable verdict needs at least one certificate")


def _merge(*verdicts: Verdict) -> Verdict:
    reasons = tuple(r for v in verdicts for r in v.reasons)
    notes = tuple(n for v in verdicts for n in v.notes)
    status = combine_status(v.status for v in verdicts)
    return Verdict(status, reasons, notes)


def combine_status(statuses: Iterable[Status]) -> Status:
    """NonIntegrable anywhere wins; otherwise any Indeterminate wins."""
    statuses = list(statuses)
    if Status.NON_INTEGRABLE in statuses:
        return Status.NON_INTEGRABLE
    if Status.INDETERMINATE in statuses:
        return Status.INDETERMINATE
    if statuses and all(s == Status.NOT_APPLICABLE for s in statuses):
        return Status.NOT_APPLICABLE
    return Status.HOLD


def _irrational_factor(sd: SpectralData) -> UniPoly | None:
    if not sd.exact or sd.char_poly is None:
        return None
    rest = sd.char_poly
    for e in sd.eigenvalues:
        if e.exact:
            rest = rest.exquo(UniPoly([-e.value, 1]) ** e.multiplicity)
    return rest if rest.degree > 0 else None


def degree_zero_check(sd: SpectralData) -> Verdict:
    if sd.indeterminate:
        return Verdict(Status.INDETERMINATE, (), sd.notes)
    reasons: list[Certificate] = []
    factor = _irrational_factor(sd)
    for e in sd.eigenvalues:
        if e.is_integer or (not e.exact and factor is not None):
            continue
        reasons.append(NonIntegerEigenvalue(e.value, e.exact))
    if factor is not None:
        approx = next(e.value for e in sd.eigenvalues if not e.exact)
        reasons.append(NonIntegerEigenvalue(approx, False, factor))
    ints = {_key(e.value) for e in sd.eigenvalues if e.is_integer}
    for b in sd.blocks:
        if b.size >= 2 and _key(b.eigenvalue) in ints:
            reasons.append(JordanBlock(b.eigenvalue, b.size, b.exact))
    return Verdict(Status.NON_INTEGRABLE if reasons else Status.HOLD, tuple(reasons))


def _key(x: Scalar):
    return x if isinstance(x, GaussianRational) else complex(x)


def table_check(k: int, sd: SpectralData) -> tuple[Verdict, dict]:
    """Table membership of every eigenvalue; also returns the matches found."""
    if sd.indeterminate:
        return Verdict(Status.INDETERMINATE, (), sd.notes), {}
    reasons, matches = [], {}
    for e in sd.eigenvalues:
        found = mr_table_membership(k, e.value)
        matches[_key(e.value)] = tuple(found)
        if not found:
            reasons.append(TableMiss(k, e.value, not e.exact))
    return Verdict(Status.NON_INTEGRABLE if reasons else Status.HOLD, tuple(reasons)), matches


def jordan_obstruction(k: int, sd: SpectralData) -> Verdict:
    if k in (-2, 0, 2):
        raise ValueError("Jordan-block rules need k ∉ {-2, 0, 2}")
    if sd.indeterminate:
        return Verdict(Status.INDETERMINATE, (), sd.notes)
    reasons: list[Certificate] = []
    for b in sd.blocks:
        if b.size >= 3:
            reasons.append(JordanBlock(b.eigenvalue, b.size, b.exact))
        elif b.size == 2:
            rows = tuple(sorted({m.row for m in mr_table_membership(k, b.eigenvalue)}))
            if not rows or max(rows) <= 2:
                reasons.append(JordanRowRule(b.eigenvalue, rows, b.exact))
    return Verdict(Status.NON_INTEGRABLE if reasons else Status.HOLD, tuple(reasons))


# ---------------------------------------------------------------------------
# independent re-checks against the Hessian only


def _smin(a: np.ndarray, lam: complex) -> float:
    return float(np.linalg.svd(a - lam * np.eye(a.shape[0]), compute_uv=False)[-1])


def _numeric_has_block(a: np.ndarray, lam: complex, size: int) -> bool:
    n = a.shape[0]
    scale = max(1.0, float(np.linalg.norm(a, 2)))
    shifted = a - lam * np.eye(n)
    ranks, power = [n], np.eye(n, dtype=complex)
    tol = 1e-6 * scale
    for _ in range(size):
        power = power @ shifted
        s = np.linalg.svd(power, compute_uv=False)
        ranks.append(int(np.sum(s > tol * max(1.0, float(s[0]) if len(s) else 1.0))))
    return ranks[size - 1] - ranks[size] >= 1


def _is_eigenvalue(hd: HessianAtPoint, lam: Scalar) -> bool:
    if hd.exact and isinstance(lam, GaussianRational):
        return charpoly(hd.matrix())(lam).is_zero()
    a = hd.array()
    return _smin(a, complex(lam)) < 1e-6 * max(1.0, float(np.linalg.norm(a, 2)))


def _has_block(hd: HessianAtPoint, lam: Scalar, size: int) -> bool:
    if hd.exact and isinstance(lam, GaussianRational):
        r = rank_sequence(hd.matrix(), lam, size)
        return r[size - 1] - r[size] >= 1
    return _numeric_has_block(hd.array(), complex(lam), size)


def recheck(cert: Certificate, hd: HessianAtPoint) -> bool:
    """Re-derive a certificate from the Hessian matrix alone."""
    if isinstance(cert, NonIntegerEigenvalue):
        if cert.factor is not None:
            if not hd.exact:
                return False
            chi = charpoly(hd.matrix())
            _, r = divmod(chi, cert.factor)
            return cert.factor.degree >= 1 and r.is_zero() and not integer_roots(cert.factor)
        if isinstance(cert.value, GaussianRational):
            return _is_eigenvalue(hd, cert.value) and not cert.value.is_integer()
        z = complex(cert.value)
        return _is_eigenvalue(hd, z) and abs(z - round(z.real)) > NUMERIC_INT_TOL
    if isinstance(cert, JordanBlock):
        return cert.size >= 2 and _has_block(hd, cert.value, cert.size)
    if isinstance(cert, TableMiss):
        return _is_eigenvalue(hd, cert.value) and not mr_table_membership(cert.k, cert.value)
    if isinstance(cert, JordanRowRule):
        raise TypeError("JordanRowRule needs the degree; use recheck_with_degree")
    raise TypeError(f"unknown certificate {cert!r}")


def recheck_with_degree(cert: Certificate, hd: HessianAtPoint, k: int) -> bool:
    if isinstance(cert, JordanRowRule):
        rows = tuple(sorted({m.row for m in mr_table_membership(k, cert.value)}))
        return (
            _has_block(hd, cert.value, 2)
            and rows == tuple(cert.rows)
            and (not rows or max(rows) <= 2)
        )
    if isinstance(cert, TableMiss) and cert.k != k:
        return False
    return recheck(cert, hd)


# ---------------------------------------------------------------------------
# pipeline

HYPOTHESIS_K0 = (
    "degree 0: the conditions are necessary for integrability with first "
    "integrals that are rational functions of positions and momenta"
)
HYPOTHESIS_K = (
    "degree k != 0: the conditions are necessary for integrability with "
    "meromorphic first integrals"
)
SCOPE_NOTE = "necessary conditions only; a passing verdict does not assert integrability"


@dataclass(frozen=True)
class AnalysisOptions:
    numeric: bool = False
    seeds: int = DEFAULT_SEEDS
    tol: float = DEFAULT_TOL
    rng_seed: int = 0
    dedup: float = DEFAULT_DEDUP
    mr_table: bool = False
    epsilon: complex = 0j
    fi_pdeg: int | None = None
    fi_box: tuple[int, int] | None = None
    workers: int = 1

    def config(self) -> dict:
        d = asdict(self)
        d["epsilon"] = [self.epsilon.real, self.epsilon.imag]
        d["fi_box"] = list(self.fi_box) if self.fi_box else None
        d.pop("workers")  # does not affect results
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.config(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class PointAnalysis:
    index: int
    hessian: HessianAtPoint
    spectral: SpectralData
    verdict: Verdict
    projective: ProjectiveDarboux | None = None
    exact_coords: tuple[GaussianRational, ...] | None = None
    numeric: DarbouxPointNumeric | None = None
    crosscheck: SpectralData | None = None
    table_matches: tuple[tuple[Scalar, tuple[TableRowMatch, ...]], ...] = ()
    alpha1: tuple[Alpha1Certificate, ...] = ()
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class Report:
    input: dict
    degree: int
    nvars: int
    method: str
    status: Status
    message: str
    points: tuple[PointAnalysis, ...]
    hypotheses: tuple[str, ...]
    config: dict
    config_hash: str
    version: str = __version__
    continuum: bool = False
    fi_search: dict | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)


def _alpha1_for(verdict: Verdict) -> tuple[Alpha1Certificate, ...]:
    out = []
    seen = set()
    for r in verdict.reasons:
        if isinstance(r, JordanBlock):
            lam = rationalize(r.value)
            if lam is not None and lam.denominator == 1 and int(lam) not in seen:
                seen.add(int(lam))
                out.append(alpha1_for_eigenvalue(int(lam)))
    return tuple(out)


def _verdict_for(k: int, sd: SpectralData, mr_table: bool):
    matches: dict = {}
    if k == 0:
        return degree_zero_check(sd), matches
    v, matches = table_check(k, sd)
    if k not in (-2, 2):
        v = _merge(v, jordan_obstruction(k, sd))
    return v, matches


def _analyze_point(index, k, hd, mr_table, **extra) -> PointAnalysis:
    sd = eigen_structure(hd)
    verdict, matches = _verdict_for(k, sd, mr_table)
    alpha1 = _alpha1_for(verdict) if k == 0 else ()
    table = tuple(matches.items()) if (mr_table and k != 0) else ()
    return PointAnalysis(index, hd, sd, verdict, table_matches=table, alpha1=alpha1, **extra)


def _agreement_notes(exact: SpectralData, numeric: SpectralData) -> tuple[str, ...]:
    out = []
    if numeric.indeterminate:
        out.append("numeric cross-check indeterminate")
    else:
        if exact.all_integer != numeric.all_integer:
            out.append("exact and numeric paths disagree on integrality")
        if exact.semisimple != numeric.semisimple:
            out.append("exact and numeric paths disagree on semi-simplicity")
    return tuple(out)


def analyze(V: Potential, options: AnalysisOptions = AnalysisOptions(), name: str = "") -> Report:
    k = V.degree
    points: list[PointAnalysis] = []
    notes: list[str] = []
    continuum = False
    if k == 0 and V.nvars == 2:
        method = "exact-2d"
        v = restrict_projective(V)
        for idx, pd in enumerate(darboux_2d(V)):
            hd = hessian_at_2d(pd, v)
            extra = {"projective": pd}
            if options.numeric:
                dp = embed_2d(pd, V, options.tol)
                cross = eigen_structure(hessian_at_numeric(V, dp))
                extra.update(numeric=dp, crosscheck=cross)
            pa = _analyze_point(idx, k, hd, options.mr_table, **extra)
            if pa.crosscheck is not None:
                pa = _with_notes(pa, _agreement_notes(pa.spectral, pa.crosscheck))
                pa = _with_notes(pa, _numeric_flow_notes(V, pa, options.epsilon))
            points.append(pa)
    else:
        method = "numeric"
        try:
            found = darboux_nd(
                V, options.seeds, options.tol, rng_seed=options.rng_seed, dedup=options.dedup,
                workers=options.workers,
            )
            for idx, dp in enumerate(found):
                points.append(_analyze_point(idx, k, hessian_at_numeric(V, dp), options.mr_table, numeric=dp))
        except DarbouxContinuum:
            continuum = True
            method = "exact-representative"
            d = exact_representative(V)
            notes.append("gradient is the identity: continuum of Darboux points; analyzed at e_1")
            points.append(_analyze_point(0, k, hessian_at_exact(V, d), options.mr_table, exact_coords=d))

    hyps = (HYPOTHESIS_K0 if k == 0 else HYPOTHESIS_K, SCOPE_NOTE)
    if points:
        status = combine_status(p.verdict.status for p in points)
        message = {
            Status.NON_INTEGRABLE: "not integrable: certified obstruction at a Darboux point",
            Status.HOLD: "necessary conditions hold at every Darboux point found",
            Status.INDETERMINATE: "indeterminate: numeric thresholds could not decide",
        }[status]
    else:
        status = Status.NOT_APPLICABLE
        message = "no proper Darboux point; theorems not applicable"

    fi = None
    if options.fi_pdeg is not None:
        from .fisearch import MomentumAnsatz, fi_search

        box = options.fi_box
        ansatz = MomentumAnsatz.default(V, options.fi_pdeg) if box is None else MomentumAnsatz(
            options.fi_pdeg, box[0], box[1]
        )
        fi = fi_search(V, ansatz).summary(V.varnames)

    return Report(
        input={"name": name, "expression": V.text or str(V), "vars": list(V.varnames)},
        degree=k,
        nvars=V.nvars,
        method=method,
        status=status,
        message=message,
        points=tuple(points),
        hypotheses=hyps,
        config=options.config(),
        config_hash=options.config_hash(),
        continuum=continuum,
        fi_search=fi,
        notes=tuple(notes),
    )


def _numeric_flow_notes(V: Potential, pa: PointAnalysis, epsilon: complex) -> tuple[str, ...]:
    """Flow-level checks on the phase curve of level ``epsilon``."""
    import cmath

    from .variational import PhaseCurve, TrajectoryError, integrate_ve_numeric, plane_invariance

    out = []
    q0 = cmath.exp(epsilon)
    try:
        drift = plane_invariance(V, pa.numeric.coords, initial=(q0, 0j))
        out.append(f"plane invariance: off-plane drift {drift:.2e} over t in [0, 1]")
    except TrajectoryError as e:
        out.append(f"plane invariance check failed: {e}")
    for e in pa.spectral.eigenvalues:
        if e.is_integer:
            lam = int(e.value.real)
            try:
                t = integrate_ve_numeric(lam, PhaseCurve(epsilon), initial=(q0, 0j))
                out.append(f"VE check λ={lam}: closed form reproduced to {t.max_relative_deviation:.2e}")
            except TrajectoryError as err:
                out.append(f"VE check λ={lam} failed: {err}")
    return tuple(out)


def _with_notes(pa: PointAnalysis, notes: Sequence[str]) -> PointAnalysis:
    from dataclasses import replace

    return replace(pa, notes=pa.notes + tuple(notes))
