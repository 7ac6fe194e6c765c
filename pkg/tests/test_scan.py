"""Parameter families: exact constraint solving and grid scans."""

import pytest
import sympy as sp

from conftest import FAMILY
from zerok.exact import GaussianRational as Q
from zerok.obstruction import JordanBlock, Status
from zerok.potential import parse_potential
from zerok.scan import constraint_solve, grid_scan, parse_family


@pytest.fixture(scope="module")
def family():
    return parse_family(FAMILY, "q1,q2")


def sympy_solutions():
    """Solve v'(z) + z v''(z) = 0 at z = ±i for v = z (z - a)(z - b)."""
    z, a, b = sp.symbols("z a b")
    v = z * (z - a) * (z - b)
    crit = sp.diff(v, z) + z * sp.diff(v, z, 2)
    eqs = [sp.expand(crit.subs(z, s)) for s in (sp.I, -sp.I)]
    return eqs, sp.solve(eqs, [a, b], dict=True)


def test_conditions_and_solutions(family):
    res = constraint_solve(family)
    assert res.format_conditions() == ["a*b - 9 = 0", "a + b = 0"]
    got = [(s["a"], s["b"]) for s in res.solutions]
    assert got == [(Q(0, -3), Q(0, 3)), (Q(0, 3), Q(0, -3))]
    assert res.potentials == ("(9*q1^2*q2 + q2^3)/q1^3",)
    assert res.rejected == ()


def test_solutions_match_sympy(family):
    eqs, ref = sympy_solutions()
    key = lambda pair: [(w.real, w.imag) for w in pair]
    ref_pairs = sorted(((complex(s[sp.Symbol("a")]), complex(s[sp.Symbol("b")])) for s in ref), key=key)
    got = sorted(((complex(s["a"]), complex(s["b"])) for s in constraint_solve(family).solutions), key=key)
    assert got == ref_pairs
    for s in ref:
        assert all(e.subs(s) == 0 for e in eqs)


def test_solved_potential_is_semisimple_member(family):
    from zerok.obstruction import analyze

    res = constraint_solve(family)
    r = analyze(parse_potential(res.potentials[0], "q1,q2"))
    assert r.status == Status.HOLD


def test_grid_off_diagonal_nonintegrable(family):
    vals = [Q(1), Q(2), Q(3)]
    rows = grid_scan(family, [vals, vals])
    assert len(rows) == 9
    for row in rows:
        if row.values[0] == row.values[1]:
            assert row.report is None and row.skipped == "equal parameters"
        else:
            assert row.report.status == Status.NON_INTEGRABLE
            certs = [c for p in row.report.points for c in p.verdict.reasons]
            assert certs and all(isinstance(c, JordanBlock) and c.size == 2 for c in certs)


def test_allow_equal_keeps_the_point(family):
    rows = grid_scan(family, [[Q(1)], [Q(1)]], allow_equal=True)
    assert rows[0].report is not None


def test_parse_family_params():
    fam = parse_family("$c*q2/q1 + q2^2/q1^2", "q1,q2")
    assert fam.params == ("c",)
