"""Command-line interface: ``zerok analyze | scan | variational``.

Exit codes: 0 necessary conditions hold, 3 non-integrability certified,
4 indeterminate or no Darboux point, 1 usage error, 2 input error.
"""

from __future__ import annotations

import argparse
import cmath
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .exact import GaussianRational
from .obstruction import AnalysisOptions, Report, Status, analyze, combine_status
from .potential import NotHomogeneousError, ParseError, parse_potential, read_corpus
from .report import dumps, render_text
from .scan import constraint_solve, grid_scan, parse_family
from .variational import (
    NoClosedFormError,
    PathTooCloseError,
    PhaseCurve,
    alpha1_for_eigenvalue,
    galois_class,
    hermite_solution,
    integrate_ve_numeric,
    kummer_params,
    p_form,
    second_solution_numeric,
    verify_solution,
)

EXIT_HOLD = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_NONINTEGRABLE = 3
EXIT_INDETERMINATE = 4

_EXIT = {
    Status.HOLD: EXIT_HOLD,
    Status.NON_INTEGRABLE: EXIT_NONINTEGRABLE,
    Status.INDETERMINATE: EXIT_INDETERMINATE,
    Status.NOT_APPLICABLE: EXIT_INDETERMINATE,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def exit_code(status: Status) -> int:
    return _EXIT[status]


def thread_cap() -> int:
    env = os.environ.get("ZERO_K_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"ZERO_K_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _box(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected A,B")
    return a, b


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zerok", description="Integrability obstructions for homogeneous potentials.")
    p.add_argument("--version", action="version", version=f"zerok {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="analyze one potential or a corpus file")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("--potential", help="expression, e.g. 'q2*(9*q1^2+q2^2)/q1^3'")
    src.add_argument("--corpus", type=Path, help="file with 'name ; vars ; expression' lines")
    a.add_argument("--vars", help="comma-separated variable names (with --potential)")
    a.add_argument("--mr-table", action="store_true", help="list table matches for every eigenvalue")
    a.add_argument("--numeric", action="store_true", help="add numeric cross-checks to the exact path")
    a.add_argument("--seeds", type=int, default=64, help="Newton seeds for numeric Darboux search")
    a.add_argument("--tol", type=float, default=1e-9, help="Darboux residual tolerance")
    a.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    a.add_argument("--epsilon", type=_complex, default=0j, help="phase-curve level for numeric VE checks")
    a.add_argument("--fi-pdeg", type=int, help="also search first integrals of this momentum degree")
    a.add_argument("--fi-box", type=_box, help="Laurent box A,B for the first-integral search")
    a.add_argument("--format", choices=("json", "text"), default="text")
    a.add_argument("--out", type=Path, help="write the report here instead of stdout")

    s = sub.add_parser("scan", help="scan a parameter family")
    s.add_argument("--family", required=True, help="expression with $-parameters")
    s.add_argument("--vars", required=True)
    s.add_argument("--degree", type=int, default=0, help="declared degree of homogeneity")
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--grid", help="comma-separated values used for every parameter, or name=v1,v2;name=...")
    mode.add_argument("--solve", action="store_true", help="solve the semi-simplicity conditions exactly")
    s.add_argument("--allow-equal", action="store_true", help="keep points with equal parameters")
    s.add_argument("--format", choices=("json", "text"), default="text")

    v = sub.add_parser("variational", help="variational-equation certificates")
    lam = v.add_mutually_exclusive_group(required=True)
    lam.add_argument("--lambda", dest="lam", type=_fraction, help="Hessian eigenvalue")
    lam.add_argument("--from-potential", help="take the eigenvalues from this potential")
    v.add_argument("--vars", help="variables for --from-potential")
    v.add_argument("--hermite", action="store_true", help="require the closed-form Hermite solution")
    v.add_argument("--numeric", action="store_true", help="integrate the equation and check the Wronskian")
    v.add_argument("--epsilon", type=_complex, default=0j)
    v.add_argument("--format", choices=("json", "text"), default="text")
    return p


# ---------------------------------------------------------------------------
# analyze


def _analyze_entries(entries, options: AnalysisOptions) -> list[Report]:
    def run(entry):
        name, V = entry
        return analyze(V, options, name=name)

    workers = min(thread_cap(), max(1, len(entries)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(run, entries))
    return [run(e) for e in entries]


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def cmd_analyze(args) -> int:
    if args.potential is not None:
        if not args.vars:
            raise UsageError("--potential needs --vars")
        entries = [("", parse_potential(args.potential, args.vars))]
    else:
        if args.vars:
            raise UsageError("--vars is not used with --corpus")
        entries = [(e.name, e.potential()) for e in read_corpus(args.corpus)]
        if not entries:
            raise UsageError("corpus is empty")
    options = AnalysisOptions(
        numeric=args.numeric,
        seeds=args.seeds,
        tol=args.tol,
        rng_seed=args.seed,
        mr_table=args.mr_table,
        epsilon=args.epsilon,
        fi_pdeg=args.fi_pdeg,
        fi_box=args.fi_box,
    )
    reports = _analyze_entries(entries, options)
    if args.format == "json":
        text = dumps(reports if args.corpus is not None else reports[0])
    else:
        text = "\n\n".join(render_text(r) for r in reports)
    _emit(text, args.out)
    return exit_code(combine_status(r.status for r in reports))


# ---------------------------------------------------------------------------
# scan


def _grid(spec: str, params: Sequence[str]) -> list[list[GaussianRational]]:
    def values(s):
        return [GaussianRational.parse(x) for x in s.split(",") if x.strip()]

    if "=" not in spec:
        vals = values(spec)
        return [vals] * len(params)
    by_name = {}
    for part in spec.split(";"):
        name, _, vs = part.partition("=")
        by_name[name.strip().lstrip("$")] = values(vs)
    missing = [p for p in params if p not in by_name]
    if missing:
        raise UsageError(f"grid missing parameters: {', '.join(missing)}")
    return [by_name[p] for p in params]


def cmd_scan(args) -> int:
    fam = parse_family(args.family, args.vars, args.degree)
    if args.solve:
        res = constraint_solve(fam, allow_equal=args.allow_equal)
        if args.format == "json":
            data = {
                "params": list(res.params),
                "conditions": res.format_conditions(),
                "solutions": [{k: v.to_json() for k, v in s.items()} for s in res.solutions],
                "potentials": list(res.potentials),
                "rejected": [{"values": {k: v.to_json() for k, v in s.items()}, "reason": why} for s, why in res.rejected],
            }
            _emit(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False), None)
        else:
            lines = ["conditions:"] + [f"  {c}" for c in res.format_conditions()]
            lines.append("solutions:")
            for s in res.solutions:
                lines.append("  " + ", ".join(f"{k} = {v}" for k, v in s.items()))
            for s, why in res.rejected:
                lines.append("  rejected " + ", ".join(f"{k} = {v}" for k, v in s.items()) + f": {why}")
            lines.append("potentials:")
            lines += [f"  V = {p}" for p in res.potentials]
            _emit("\n".join(lines), None)
        return EXIT_HOLD
    rows = grid_scan(fam, _grid(args.grid, fam.params), allow_equal=args.allow_equal)
    if args.format == "json":
        data = [
            {
                "values": {p: v.to_json() for p, v in zip(fam.params, r.values)},
                "status": r.report.status.value if r.report else None,
                "skipped": r.skipped or None,
                "certificates": [str(c) for pt in r.report.points for c in pt.verdict.reasons] if r.report else [],
            }
            for r in rows
        ]
        _emit(json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False), None)
    else:
        lines = []
        for r in rows:
            label = ", ".join(f"{p}={v}" for p, v in zip(fam.params, r.values))
            if r.report is None:
                lines.append(f"{label}: skipped ({r.skipped})")
            else:
                certs = sorted({str(c) for pt in r.report.points for c in pt.verdict.reasons})
                lines.append(f"{label}: {r.report.status.value}" + (f"  {'; '.join(certs)}" if certs else ""))
        _emit("\n".join(lines), None)
    return EXIT_HOLD


# ---------------------------------------------------------------------------
# variational


def _sample_path(sol, lo=0.5, hi=2.0, count=7, clearance=0.1) -> list[float]:
    zeros = [complex(z) for z in sol.poly.numeric_roots()] if sol.poly.degree > 0 else []
    pts = []
    for k in range(4 * count):
        p = lo + (hi - lo) * k / (4 * count - 1)
        if all(abs(p - z) >= clearance for z in zeros):
            pts.append(p)
    step = max(1, len(pts) // count)
    out = pts[::step]
    if pts and out[-1] != pts[-1]:
        out.append(pts[-1])
    return out


def variational_bundle(lam: Fraction, hermite: bool, numeric: bool, epsilon: complex = 0j) -> dict:
    kp = kummer_params(lam)
    gc = galois_class(lam)
    out: dict = {
        "lambda": str(lam),
        "equation": str(p_form(lam)),
        "kummer": {"a": str(kp.a), "c": str(kp.c)},
        "galois": str(gc),
    }
    if lam.denominator != 1:
        if hermite:
            raise NoClosedFormError(
                f"λ={lam} is not an integer: the equation has no closed-form Hermite solution "
                "and its Galois group is GL(2,C)"
            )
        return out
    n = int(lam)
    sol = hermite_solution(n)
    residual = verify_solution(sol)
    a1 = alpha1_for_eigenvalue(n)
    out["solution"] = str(sol)
    out["solution_poly"] = sol.poly.format("p")
    out["residual_zero"] = not residual
    out["alpha1"] = {
        "lam": a1.lam,
        "gaussian_moment": str(a1.moment_value),
        "he0_component": str(a1.he0_component),
        "searched_degree": a1.searched_degree,
        "system_consistent": a1.system_consistent,
        "conclusion": a1.conclusion,
    }
    if numeric:
        pc = PhaseCurve(epsilon)
        q0 = cmath.exp(epsilon)
        traj = integrate_ve_numeric(n, pc, initial=(q0, 0j))
        out["numeric"] = {"ve_max_relative_deviation": repr(traj.max_relative_deviation)}
        if n >= 1:
            try:
                w = second_solution_numeric(n, _sample_path(sol), pc)
                out["numeric"]["wronskian_deviation"] = repr(w.wronskian_deviation)
                out["numeric"]["quadrature_vs_ode"] = repr(w.quadrature_vs_ode)
            except PathTooCloseError as e:
                out["numeric"]["wronskian_error"] = str(e)
    return out


def cmd_variational(args) -> int:
    if args.lam is not None:
        lams = [args.lam]
    else:
        if not args.vars:
            raise UsageError("--from-potential needs --vars")
        V = parse_potential(args.from_potential, args.vars)
        if V.degree != 0:
            raise UsageError("--from-potential needs a degree-0 potential")
        rep = analyze(V)
        lams = []
        for p in rep.points:
            for e in p.spectral.eigenvalues:
                val = e.value
                if isinstance(val, GaussianRational) and val.is_rational() and val.real not in lams:
                    lams.append(val.real)
        if not lams:
            raise UsageError("no real rational eigenvalues at the Darboux points")
    bundles = [variational_bundle(l, args.hermite, args.numeric, args.epsilon) for l in lams]
    if args.format == "json":
        _emit(json.dumps(bundles if len(bundles) > 1 else bundles[0], sort_keys=True, indent=2, ensure_ascii=False), None)
    else:
        lines = []
        for b in bundles:
            lines.append(f"λ = {b['lambda']}:  {b['equation']}")
            lines.append(f"  Kummer parameters: a = {b['kummer']['a']}, c = {b['kummer']['c']}")
            lines.append(f"  Galois group: {b['galois']}")
            if "solution" in b:
                lines.append(f"  solution: x = {b['solution']} = {'q*' if b['solution'].startswith('q*') else ''}({b['solution_poly']})")
                lines.append(f"  residual exactly zero: {b['residual_zero']}")
                a1 = b["alpha1"]
                lines.append(
                    f"  alpha1 (λ'={a1['lam']}): Gaussian moment {a1['gaussian_moment']}·√(2π), "
                    f"system up to degree {a1['searched_degree']} consistent: {a1['system_consistent']}; {a1['conclusion']}"
                )
            for k, val in b.get("numeric", {}).items():
                lines.append(f"  {k}: {val}")
        _emit("\n".join(lines), None)
    return EXIT_HOLD


# ---------------------------------------------------------------------------


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"analyze": cmd_analyze, "scan": cmd_scan, "variational": cmd_variational}
    try:
        return handlers[args.command](args)
    except UsageError as e:
        print(f"zerok: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, NotHomogeneousError, NoClosedFormError, OSError, ValueError, NotImplementedError) as e:
        print(f"zerok: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
