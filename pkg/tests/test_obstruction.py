"""Integrability verdicts: table membership, Jordan rules, certificates, reports."""

import itertools
import random
from fractions import Fraction as F

import pytest

from conftest import SEMISIMPLE_MEMBER, brute_force_table, table_oracle_families, valid_random_potentials
from zerok.darboux import darboux_2d
from zerok.exact import GaussianRational as Q
from zerok.exact import UniPoly
from zerok.obstruction import (
    TABLE,
    AnalysisOptions,
    JordanBlock,
    JordanRowRule,
    NonIntegerEigenvalue,
    Status,
    TableMiss,
    TableRowMatch,
    Verdict,
    analyze,
    combine_status,
    degree_zero_check,
    jordan_obstruction,
    mr_table_membership,
    rationalize,
    recheck,
    recheck_with_degree,
    table_check,
)
from zerok.potential import parse_potential, restrict_projective
from zerok.spectral import HessianAtPoint, eigen_structure

FAMILY_1_2 = "q2*(q2-q1)*(q2-2*q1)/q1^3"


def exact(rows):
    return HessianAtPoint(tuple(tuple(x if isinstance(x, Q) else Q(x) for x in r) for r in rows), True)


def sd_of(rows):
    return eigen_structure(exact(rows))


class TestTable:
    def test_spot_values(self):
        # row 2 at k = 2 reads λ = p², so p = ±2
        assert {(m.row, m.p) for m in mr_table_membership(2, Q(4)) if m.row == 2} == {(2, 2), (2, -2)}
        assert any(m.row == 1 for m in mr_table_membership(2, Q(F(17, 3))))
        assert any(m.row == 1 for m in mr_table_membership(-2, 0.123))
        assert mr_table_membership(3, Q(F(1, 2))) == []
        hits = [(m.row, m.family, m.p) for m in mr_table_membership(-3, Q(F(-13, 8)))]
        assert (7, 1, 1) in hits

    def test_matches_brute_force_on_random_pairs(self):
        rng = random.Random(2024)
        for trial in range(200):
            k = rng.choice([k for k in range(-5, 6) if k != 0])
            if trial % 2:
                fams = list(table_oracle_families(k).values())
                lam = rng.choice(fams)(rng.randint(-20, 20))
            else:
                lam = F(rng.randint(-60, 60), rng.choice([1, 2, 3, 4, 8, 24]))
            ours = {
                (m.row, m.family, m.p)
                for m in mr_table_membership(k, Q(lam))
                if m.p is not None and abs(m.p) <= 50
            }
            assert ours == brute_force_table(k, lam), (k, lam)

    def test_every_match_revalidates(self):
        rng = random.Random(7)
        for _ in range(100):
            k = rng.choice([-5, -4, -3, -1, 1, 3, 4, 5])
            fams = list(table_oracle_families(k).values())
            lam = rng.choice(fams)(rng.randint(-30, 30))
            found = mr_table_membership(k, Q(lam))
            assert found
            for m in found:
                assert m.revalidate(k)
                assert TABLE[m.row - 1].family_value(m.family, k, m.p) == lam

    def test_tampered_match_fails_revalidation(self):
        assert TableRowMatch(2, 1, 2, Q(4)).revalidate(2)
        assert not TableRowMatch(2, 1, 3, Q(4)).revalidate(2)

    def test_numeric_lambda_is_rationalized(self):
        assert rationalize(0.125 + 1e-13j) == F(1, 8)
        assert mr_table_membership(3, 2**0.5) == []
        found = mr_table_membership(-3, -13 / 8)
        assert any((m.row, m.p) == (7, 1) for m in found)

    def test_irrational_value_misses(self):
        assert mr_table_membership(3, Q(F(1, 2), 1)) == []

    def test_zero_degree_rejected(self):
        with pytest.raises(ValueError):
            mr_table_membership(0, Q(1))


# ---------------------------------------------------------------------------
# verdict rules


class TestVerdicts:
    def test_semisimple_minus_one(self):
        assert degree_zero_check(sd_of([[-1, 0], [0, -1]])).status == Status.HOLD

    def test_jordan_block_minus_one(self):
        v = degree_zero_check(sd_of([[-1, 0], [1, -1]]))
        assert v.status == Status.NON_INTEGRABLE
        assert [type(r) for r in v.reasons] == [JordanBlock]
        assert str(v.reasons[0]) == "JordanBlock(B(-1, 2))"

    def test_non_integer_eigenvalue(self):
        v = degree_zero_check(sd_of([[-1, 0], [0, Q(F(1, 2))]]))
        assert v.status == Status.NON_INTEGRABLE
        assert NonIntegerEigenvalue(Q(F(1, 2)), True) in v.reasons

    def test_irrational_eigenvalues(self):
        v = degree_zero_check(sd_of([[0, 1], [1, 1]]))
        assert v.status == Status.NON_INTEGRABLE
        assert any(r.factor == UniPoly([-1, -1, 1]) for r in v.reasons)

    def test_block_of_size_three_any_lambda(self):
        sd = sd_of([[Q(F(1, 8)), 0, 0], [1, Q(F(1, 8)), 0], [0, 1, Q(F(1, 8))]])
        v = jordan_obstruction(3, sd)
        assert v.status == Status.NON_INTEGRABLE
        assert JordanBlock(Q(F(1, 8)), 3, True) in v.reasons

    def test_size_two_block_only_in_row_two(self):
        assert {m.row for m in mr_table_membership(3, Q(5))} == {2}
        v = jordan_obstruction(3, sd_of([[5, 0], [1, 5]]))
        assert v.status == Status.NON_INTEGRABLE
        assert v.reasons == (JordanRowRule(Q(5), (2,), True),)

    def test_size_two_block_in_higher_row_passes(self):
        lam = Q(F(1, 8))  # row 4, family 1, p = 0
        assert 4 in {m.row for m in mr_table_membership(3, lam)}
        assert jordan_obstruction(3, sd_of([[lam, 0], [1, lam]])).status == Status.HOLD

    def test_all_in_table_semisimple_holds(self):
        lam = Q(F(1, 8))
        v, matches = table_check(3, sd_of([[lam, 0], [0, lam]]))
        assert v.status == Status.HOLD and matches[lam]

    def test_table_miss(self):
        v, _ = table_check(3, sd_of([[Q(F(1, 2)), 0], [0, 1]]))
        assert v.status == Status.NON_INTEGRABLE
        assert TableMiss(3, Q(F(1, 2)), False) in v.reasons

    def test_jordan_rules_exclude_special_degrees(self):
        for k in (-2, 0, 2):
            with pytest.raises(ValueError):
                jordan_obstruction(k, sd_of([[1, 0], [0, 1]]))

    def test_non_integrable_needs_a_reason(self):
        with pytest.raises(ValueError):
            Verdict(Status.NON_INTEGRABLE)

    def test_adding_points_is_monotone(self):
        rank = {Status.NOT_APPLICABLE: 0, Status.HOLD: 1, Status.INDETERMINATE: 2, Status.NON_INTEGRABLE: 3}
        statuses = [Status.HOLD, Status.INDETERMINATE, Status.NON_INTEGRABLE]
        for n in range(1, 4):
            for combo in itertools.product(statuses, repeat=n):
                before = combine_status(combo)
                for extra in statuses:
                    assert rank[combine_status(combo + (extra,))] >= rank[before]

    def test_degree_zero_check_is_the_planar_criterion(self):
        for V in valid_random_potentials(50, seed=31):
            v = restrict_projective(V)
            rep = analyze(V)
            assert len(rep.points) == 2
            for pa, pd in zip(rep.points, darboux_2d(V)):
                z = pd.z_star
                crit = v.derivative(0).evaluate([z]) + z * v.derivative(0).derivative(0).evaluate([z])
                assert (pa.verdict.status == Status.HOLD) == crit.is_zero()


# ---------------------------------------------------------------------------
# certificates re-derived from the Hessian


class TestRecheck:
    def test_certificates_from_corpus_recheck(self):
        from importlib import resources

        from zerok.potential import read_corpus

        seen = 0
        for e in read_corpus(str(resources.files("zerok.data") / "potentials.txt")):
            rep = analyze(e.potential())
            for pa in rep.points:
                for cert in pa.verdict.reasons:
                    assert recheck_with_degree(cert, pa.hessian, rep.degree), (e.name, cert)
                    seen += 1
        assert seen > 0

    def test_tampered_certificates_fail(self):
        minus_id = exact([[-1, 0], [0, -1]])
        assert not recheck(NonIntegerEigenvalue(Q(F(1, 2)), True), minus_id)
        assert not recheck(JordanBlock(Q(-1), 2, True), minus_id)
        block = exact([[-1, 0], [1, -1]])
        assert recheck(JordanBlock(Q(-1), 2, True), block)
        assert not recheck(JordanBlock(Q(-1), 3, True), block)
        assert recheck(TableMiss(3, Q(-1), False), minus_id)
        assert not recheck(TableMiss(3, Q(5), False), exact([[5, 0], [0, 5]]))
        assert not recheck(TableMiss(3, Q(F(1, 2)), False), minus_id)
        assert not recheck_with_degree(JordanRowRule(Q(5), (2,), True), exact([[5, 0], [0, 5]]), 3)


# ---------------------------------------------------------------------------
# full pipeline


class TestAnalyze:
    def test_semisimple_member_holds(self):
        rep = analyze(parse_potential(SEMISIMPLE_MEMBER, "q1,q2"))
        assert rep.status == Status.HOLD
        assert [pa.verdict.status for pa in rep.points] == [Status.HOLD, Status.HOLD]
        assert rep.method == "exact-2d"

    def test_family_1_2_blocks_everywhere(self):
        rep = analyze(parse_potential(FAMILY_1_2, "q1,q2"))
        assert rep.status == Status.NON_INTEGRABLE
        for pa in rep.points:
            assert [str(r) for r in pa.verdict.reasons] == ["JordanBlock(B(-1, 2))"]
            assert pa.alpha1 and pa.alpha1[0].check() and pa.alpha1[0].lam == 2

    def test_harmonic_holds(self):
        rep = analyze(parse_potential("(q1^2+q2^2)/2", "q1,q2"), AnalysisOptions(mr_table=True))
        assert rep.status == Status.HOLD
        for pa in rep.points:
            for _, matches in pa.table_matches:
                assert any(m.row == 1 for m in matches)

    def test_identity_gradient_continuum(self):
        rep = analyze(parse_potential("(q1^2+q2^2+q3^2)/2", "q1,q2,q3"))
        assert rep.continuum and rep.status == Status.HOLD
        assert rep.points[0].exact_coords == (Q(1), Q(0), Q(0))

    def test_no_proper_darboux_point(self):
        # v(z) = z^3/3 + z has v'(±i) = 0
        rep = analyze(parse_potential("(q2^3/3 + q1^2*q2)/q1^3", "q1,q2"))
        assert rep.status == Status.NOT_APPLICABLE and rep.points == ()
        assert analyze(parse_potential("1", "q1,q2")).status == Status.NOT_APPLICABLE

    def test_inverse_cubic_table_exercise(self):
        rep = analyze(parse_potential("1/(q1^2*q2)", "q1,q2"), AnalysisOptions(mr_table=True))
        assert rep.degree == -3 and rep.points
        for pa in rep.points:
            for cert in pa.verdict.reasons:
                assert recheck_with_degree(cert, pa.hessian, -3)

    def test_crafted_3d_is_non_integrable(self):
        rep = analyze(parse_potential("q2/q1 + q3^2/(q1*q2)", "q1,q2,q3"))
        assert rep.status == Status.NON_INTEGRABLE and len(rep.points) == 4
        for pa in rep.points:
            assert any(isinstance(r, JordanBlock) and r.size == 2 for r in pa.verdict.reasons)

    def test_numeric_crosscheck_notes(self):
        rep = analyze(parse_potential(SEMISIMPLE_MEMBER, "q1,q2"), AnalysisOptions(numeric=True))
        for pa in rep.points:
            assert pa.crosscheck is not None
            assert not any("disagree" in n for n in pa.notes)
            assert any(n.startswith("plane invariance") for n in pa.notes)

    def test_hypotheses_are_stated(self):
        rep = analyze(parse_potential(SEMISIMPLE_MEMBER, "q1,q2"))
        assert any("rational" in h for h in rep.hypotheses)
        assert any("necessary" in h for h in rep.hypotheses)

    def test_config_hash_ignores_workers(self):
        assert AnalysisOptions(workers=1).config_hash() == AnalysisOptions(workers=8).config_hash()
        assert AnalysisOptions(rng_seed=1).config_hash() != AnalysisOptions(rng_seed=2).config_hash()
