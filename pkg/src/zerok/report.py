"""Lossless JSON and plain-text rendering of analysis reports.

Exact numbers are written as strings ``"num/den"`` (real and imaginary part
separately); floats are written with ``repr`` so they parse back bit-for-bit.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from typing import Any

from .darboux import DarbouxPointNumeric, ProjectiveDarboux
from .exact import GaussianRational, UniPoly
from .obstruction import (
    JordanBlock,
    JordanRowRule,
    NonIntegerEigenvalue,
    PointAnalysis,
    Report,
    Status,
    TableMiss,
    TableRowMatch,
    Verdict,
    recheck_with_degree,
)
from .spectral import Eigenvalue, HessianAtPoint, JordanBlockDesc, SpectralData, fmt_scalar as _s
from .variational import Alpha1Certificate

__all__ = [
    "SCHEMA_VERSION",
    "load_schema",
    "scalar_to_json",
    "scalar_from_json",
    "report_to_dict",
    "report_from_dict",
    "dumps",
    "loads",
    "render_text",
    "certificate_lines",
    "recheck_report",
]

SCHEMA_VERSION = "report_v1"


def load_schema() -> dict:
    text = resources.files("zerok.data").joinpath("report_v1.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


# ---------------------------------------------------------------------------
# scalars


def scalar_to_json(x) -> dict:
    if isinstance(x, GaussianRational):
        return {"kind": "exact", **x.to_json()}
    z = complex(x)
    return {"kind": "float", "re": repr(z.real), "im": repr(z.imag)}


def scalar_from_json(d: dict):
    if d["kind"] == "exact":
        return GaussianRational.from_json(d)
    return complex(float(d["re"]), float(d["im"]))


def _frac(x: Fraction) -> str:
    return str(Fraction(x))


def _poly_to(p: UniPoly | None):
    return None if p is None else [scalar_to_json(c) for c in p.coeffs]


def _poly_from(d) -> UniPoly | None:
    return None if d is None else UniPoly([scalar_from_json(c) for c in d])


# ---------------------------------------------------------------------------
# components


def _hessian_to(h: HessianAtPoint) -> dict:
    return {"exact": h.exact, "entries": [[scalar_to_json(x) for x in row] for row in h.entries]}


def _hessian_from(d: dict) -> HessianAtPoint:
    return HessianAtPoint(tuple(tuple(scalar_from_json(x) for x in row) for row in d["entries"]), d["exact"])


def _spectral_to(sd: SpectralData | None) -> dict | None:
    if sd is None:
        return None
    return {
        "char_poly": _poly_to(sd.char_poly),
        "min_poly": _poly_to(sd.min_poly),
        "eigenvalues": [
            {"value": scalar_to_json(e.value), "multiplicity": e.multiplicity, "exact": e.exact, "is_integer": e.is_integer}
            for e in sd.eigenvalues
        ],
        "blocks": [{"eigenvalue": scalar_to_json(b.eigenvalue), "size": b.size, "exact": b.exact} for b in sd.blocks],
        "semisimple": sd.semisimple,
        "all_integer": sd.all_integer,
        "exact": sd.exact,
        "indeterminate": sd.indeterminate,
        "notes": list(sd.notes),
    }


def _spectral_from(d: dict | None) -> SpectralData | None:
    if d is None:
        return None
    return SpectralData(
        char_poly=_poly_from(d["char_poly"]),
        eigenvalues=tuple(
            Eigenvalue(scalar_from_json(e["value"]), e["multiplicity"], e["exact"], e["is_integer"])
            for e in d["eigenvalues"]
        ),
        blocks=tuple(JordanBlockDesc(scalar_from_json(b["eigenvalue"]), b["size"], b["exact"]) for b in d["blocks"]),
        semisimple=d["semisimple"],
        all_integer=d["all_integer"],
        exact=d["exact"],
        indeterminate=d["indeterminate"],
        min_poly=_poly_from(d["min_poly"]),
        notes=tuple(d["notes"]),
    )


def _cert_to(c) -> dict:
    if isinstance(c, NonIntegerEigenvalue):
        return {"kind": c.kind, "value": scalar_to_json(c.value), "exact": c.exact, "factor": _poly_to(c.factor)}
    if isinstance(c, JordanBlock):
        return {"kind": c.kind, "value": scalar_to_json(c.value), "size": c.size, "exact": c.exact}
    if isinstance(c, TableMiss):
        return {"kind": c.kind, "k": c.k, "value": scalar_to_json(c.value), "numeric": c.numeric}
    if isinstance(c, JordanRowRule):
        return {"kind": c.kind, "value": scalar_to_json(c.value), "rows": list(c.rows), "exact": c.exact}
    raise TypeError(f"unknown certificate {c!r}")


def _cert_from(d: dict):
    kind = d["kind"]
    v = scalar_from_json(d["value"])
    if kind == "NonIntegerEigenvalue":
        return NonIntegerEigenvalue(v, d["exact"], _poly_from(d["factor"]))
    if kind == "JordanBlock":
        return JordanBlock(v, d["size"], d["exact"])
    if kind == "TableMiss":
        return TableMiss(d["k"], v, d["numeric"])
    if kind == "JordanRowRule":
        return JordanRowRule(v, tuple(d["rows"]), d["exact"])
    raise ValueError(f"unknown certificate kind {kind!r}")


def _verdict_to(v: Verdict) -> dict:
    return {"status": v.status.value, "reasons": [_cert_to(r) for r in v.reasons], "notes": list(v.notes)}


def _verdict_from(d: dict) -> Verdict:
    return Verdict(Status(d["status"]), tuple(_cert_from(r) for r in d["reasons"]), tuple(d["notes"]))


def _alpha1_to(a: Alpha1Certificate) -> dict:
    return {
        "lam": a.lam,
        "moment_value": _frac(a.moment_value),
        "he0_component": _frac(a.he0_component),
        "searched_degree": a.searched_degree,
        "system_consistent": a.system_consistent,
        "source_eigenvalue": a.source_eigenvalue,
        "conclusion": a.conclusion,
    }


def _alpha1_from(d: dict) -> Alpha1Certificate:
    return Alpha1Certificate(
        lam=d["lam"],
        moment_value=Fraction(d["moment_value"]),
        he0_component=Fraction(d["he0_component"]),
        searched_degree=d["searched_degree"],
        system_consistent=d["system_consistent"],
        source_eigenvalue=d["source_eigenvalue"],
        conclusion=d["conclusion"],
    )


def _match_to(m: TableRowMatch) -> dict:
    return {"row": m.row, "family": m.family, "p": m.p, "lambda": scalar_to_json(m.lam)}


def _match_from(d: dict) -> TableRowMatch:
    return TableRowMatch(d["row"], d["family"], d["p"], scalar_from_json(d["lambda"]))


def _point_to(p: PointAnalysis) -> dict:
    pd = p.projective
    num = p.numeric
    return {
        "index": p.index,
        "projective": None
        if pd is None
        else {
            "z_star": scalar_to_json(pd.z_star),
            "v1": scalar_to_json(pd.v1),
            "x_star_sq": scalar_to_json(pd.x_star_sq),
            "branch": pd.branch,
        },
        "exact_coords": None if p.exact_coords is None else [scalar_to_json(c) for c in p.exact_coords],
        "numeric": None
        if num is None
        else {
            "coords": [scalar_to_json(c) for c in num.coords],
            "residual": repr(float(num.residual)),
            "newton_iters": num.newton_iters,
        },
        "hessian": _hessian_to(p.hessian),
        "spectral": _spectral_to(p.spectral),
        "crosscheck": _spectral_to(p.crosscheck),
        "verdict": _verdict_to(p.verdict),
        "table_matches": [
            {"eigenvalue": scalar_to_json(lam), "matches": [_match_to(m) for m in ms]} for lam, ms in p.table_matches
        ],
        "alpha1": [_alpha1_to(a) for a in p.alpha1],
        "notes": list(p.notes),
    }


def _point_from(d: dict) -> PointAnalysis:
    pd = d["projective"]
    num = d["numeric"]
    return PointAnalysis(
        index=d["index"],
        hessian=_hessian_from(d["hessian"]),
        spectral=_spectral_from(d["spectral"]),
        verdict=_verdict_from(d["verdict"]),
        projective=None
        if pd is None
        else ProjectiveDarboux(
            scalar_from_json(pd["z_star"]), scalar_from_json(pd["v1"]), scalar_from_json(pd["x_star_sq"]), pd["branch"]
        ),
        exact_coords=None if d["exact_coords"] is None else tuple(scalar_from_json(c) for c in d["exact_coords"]),
        numeric=None
        if num is None
        else DarbouxPointNumeric(
            tuple(scalar_from_json(c) for c in num["coords"]), float(num["residual"]), num["newton_iters"]
        ),
        crosscheck=_spectral_from(d["crosscheck"]),
        table_matches=tuple(
            (scalar_from_json(t["eigenvalue"]), tuple(_match_from(m) for m in t["matches"])) for t in d["table_matches"]
        ),
        alpha1=tuple(_alpha1_from(a) for a in d["alpha1"]),
        notes=tuple(d["notes"]),
    )


# ---------------------------------------------------------------------------
# reports


def report_to_dict(r: Report) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "version": r.version,
        "input": dict(r.input),
        "degree": r.degree,
        "nvars": r.nvars,
        "method": r.method,
        "status": r.status.value,
        "message": r.message,
        "continuum": r.continuum,
        "points": [_point_to(p) for p in r.points],
        "hypotheses": list(r.hypotheses),
        "config": r.config,
        "config_hash": r.config_hash,
        "fi_search": r.fi_search,
        "notes": list(r.notes),
    }


def report_from_dict(d: dict) -> Report:
    if d.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema {d.get('schema')!r}")
    return Report(
        input=dict(d["input"]),
        degree=d["degree"],
        nvars=d["nvars"],
        method=d["method"],
        status=Status(d["status"]),
        message=d["message"],
        points=tuple(_point_from(p) for p in d["points"]),
        hypotheses=tuple(d["hypotheses"]),
        config=d["config"],
        config_hash=d["config_hash"],
        version=d["version"],
        continuum=d["continuum"],
        fi_search=d["fi_search"],
        notes=tuple(d["notes"]),
    )


def dumps(obj: Report | list[Report], indent: int | None = 2) -> str:
    data: Any = [report_to_dict(r) for r in obj] if isinstance(obj, list) else report_to_dict(obj)
    return json.dumps(data, sort_keys=True, indent=indent, ensure_ascii=False)


def loads(text: str) -> Report | list[Report]:
    data = json.loads(text)
    if isinstance(data, list):
        return [report_from_dict(d) for d in data]
    return report_from_dict(data)


def recheck_report(r: Report) -> list[tuple[int, str, bool]]:
    """Re-derive every certificate from the Hessians stored in the report."""
    out = []
    for p in r.points:
        for c in p.verdict.reasons:
            out.append((p.index, str(c), recheck_with_degree(c, p.hessian, r.degree)))
        for a in p.alpha1:
            out.append((p.index, f"alpha1(λ={a.lam})", a.check()))
    return out


# ---------------------------------------------------------------------------
# text


def certificate_lines(r: Report) -> list[str]:
    return [str(c) for p in r.points for c in p.verdict.reasons]


def render_text(r: Report) -> str:
    lines = []
    name = r.input.get("name") or ""
    head = f"{name}: " if name else ""
    lines.append(f"{head}V = {r.input['expression']}   vars: {', '.join(r.input['vars'])}   degree k = {r.degree}")
    lines.append(f"status: {r.status.value} ({r.message})")
    lines.append(f"method: {r.method}   config {r.config_hash}   zerok {r.version}")
    for note in r.notes:
        lines.append(f"note: {note}")
    for p in r.points:
        lines.append(f"point {p.index}:")
        if p.projective is not None:
            pd = p.projective
            lines.append(f"  z* = {pd.z_star}, v'(z*) = {pd.v1}, x*^2 = {pd.x_star_sq}")
        if p.exact_coords is not None:
            lines.append(f"  d = ({', '.join(map(str, p.exact_coords))})")
        if p.numeric is not None:
            lines.append(f"  d ≈ ({', '.join(_s(c) for c in p.numeric.coords)})  residual {p.numeric.residual:.2e}")
        rows = ["[" + ", ".join(_s(x) for x in row) + "]" for row in p.hessian.entries]
        lines.append(f"  Hessian: [{', '.join(rows)}]")
        sd = p.spectral
        eig = ", ".join(f"{_s(e.value)} (x{e.multiplicity})" for e in sd.eigenvalues)
        lines.append(f"  eigenvalues: {eig}")
        lines.append(f"  blocks: {' '.join(str(b) for b in sd.blocks)}   semisimple: {sd.semisimple}")
        if sd.char_poly is not None:
            lines.append(f"  char poly: {sd.char_poly.format('x')}")
        lines.append(f"  verdict: {p.verdict.status.value}")
        for c in p.verdict.reasons:
            lines.append(f"    certificate: {c}")
        for a in p.alpha1:
            lines.append(
                f"    alpha1: λ={a.lam} (from {a.source_eigenvalue}), Gaussian moment {a.moment_value}·√(2π) ≠ 0, "
                f"{a.conclusion}"
            )
        for lam, ms in p.table_matches:
            lines.append(f"    table λ={_s(lam)}: {', '.join(map(str, ms)) or 'no match'}")
        if p.crosscheck is not None:
            cc = p.crosscheck
            lines.append(f"  numeric cross-check: all_integer={cc.all_integer} semisimple={cc.semisimple}")
        for note in p.notes + p.verdict.notes:
            lines.append(f"  note: {note}")
    if r.fi_search is not None:
        fi = r.fi_search
        lines.append(f"first-integral search: {fi['scope']}")
        lines.append(
            f"  dimension {fi['dimension']} in {fi['blocks']} blocks, nullspace {fi['nullspace_dimension']}, "
            f"functions of H {fi['h_span_dimension']}"
        )
        extra = fi["independent_of_H"]
        lines.append("  further integrals: " + ("; ".join(extra) if extra else "none in this ansatz"))
    for h in r.hypotheses:
        lines.append(f"scope: {h}")
    return "\n".join(lines)
