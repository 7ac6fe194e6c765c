"""Exact arithmetic over Q(i): scalars, polynomials, rational functions."""

import math
import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    from_sympy_scalar,
    gaussians,
    multipolys,
    nonzero_gaussians,
    poly_to_sympy,
    uni_to_sympy,
    unipolys,
)
from zerok.exact import (
    GaussianRational,
    I,
    MultiPoly,
    RatFunc,
    SingularPointError,
    UniPoly,
    gaussian_moment,
    gaussian_rational_roots,
    hermite,
    hermite_expand,
    homogeneous_degree,
    integer_roots,
    poly_gcd,
    squarefree_decomposition,
)
from zerok.exact import linalg
from zerok.potential import parse_expression

Q = GaussianRational
X = sp.Symbol("x")
S1, S2 = sp.symbols("q1 q2")


def rf(text, names=("q1", "q2")):
    return parse_expression(text, names)


# ---------------------------------------------------------------------------
# Gaussian rationals


class TestGaussianRational:
    def test_normalizes_to_lowest_terms(self):
        assert Q(Fraction(2, 4), Fraction(6, 8)) == Q(Fraction(1, 2), Fraction(3, 4))
        assert Q(Fraction(2, 4)).parts == (1, 0, 2)

    def test_i_squared(self):
        assert I * I == Q(-1)

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            Q(1) / Q(0)

    @pytest.mark.parametrize("text,value", [("3/2-2i", Q(Fraction(3, 2), -2)), ("i", I), ("-7", Q(-7))])
    def test_parse(self, text, value):
        assert Q.parse(text) == value

    @given(gaussians, gaussians, gaussians)
    def test_field_axioms(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a - a == Q(0)

    @given(gaussians, nonzero_gaussians)
    def test_division_inverts_multiplication(self, a, b):
        assert (a / b) * b == a

    @given(gaussians)
    def test_matches_python_complex(self, a):
        assert abs(complex(a * a) - complex(a) ** 2) < 1e-9

    @given(gaussians)
    def test_json_round_trip(self, a):
        assert Q.from_json(a.to_json()) == a

    def test_integrality_excludes_imaginary_units(self):
        assert Q(3).is_integer()
        assert not I.is_integer()
        assert I.is_gaussian_integer()


# ---------------------------------------------------------------------------
# multivariate polynomials


class TestMultiPoly:
    @given(multipolys(), multipolys(), multipolys())
    def test_ring_axioms(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c

    @given(multipolys(), multipolys())
    def test_product_agrees_with_sympy(self, a, b):
        syms = (S1, S2)
        assert sp.expand(poly_to_sympy(a * b, syms) - poly_to_sympy(a, syms) * poly_to_sympy(b, syms)) == 0

    @settings(max_examples=25)
    @given(multipolys(max_terms=3, max_deg=2), multipolys(max_terms=3, max_deg=2), multipolys(max_terms=2, max_deg=2))
    def test_gcd_agrees_with_sympy_up_to_unit(self, a, b, c):
        f, g = a * c, b * c
        if f.is_zero() or g.is_zero():
            return
        ours = poly_to_sympy(poly_gcd(f, g), (S1, S2))
        ref = sp.gcd(poly_to_sympy(f, (S1, S2)), poly_to_sympy(g, (S1, S2)), extension=sp.I)
        ratio = sp.simplify(ours / ref)
        assert ratio.free_symbols == set()

    @given(multipolys(), multipolys())
    def test_exact_division(self, a, b):
        if b.is_zero():
            return
        assert (a * b).exquo(b) == a

    def test_derivative(self):
        p = MultiPoly(2, {(2, 1): 3, (0, 3): 1})
        assert p.derivative(0) == MultiPoly(2, {(1, 1): 6})
        assert p.derivative(1) == MultiPoly(2, {(2, 0): 3, (0, 2): 3})


# ---------------------------------------------------------------------------
# rational functions


class TestRatFunc:
    def test_inverse_pair(self):
        assert rf("(1/q1)*q1") == RatFunc.const(2, 1)

    def test_sum(self):
        assert rf("q2/q1 + q2/q1") == rf("2*q2/q1")

    def test_product_form_matches_expanded_form(self):
        a = rf("q2*(q2-q1)*(q2-2*q1)/q1^3")
        b = rf("(q2^3 - 3*q1*q2^2 + 2*q1^2*q2)/q1^3")
        assert a == b
        assert a.num == b.num and a.den == b.den

    def test_canonical_denominator_is_monic(self):
        f = rf("q2/(2*q1 - 4*q2)")
        assert f.den.leading_coefficient() == Q(1)

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            rf("q1") / RatFunc.const(2, 0)

    @pytest.mark.parametrize(
        "f,i,expected",
        [
            ("q2^2/q1^2", 1, "2*q2/q1^2"),
            ("q2*(9*q1^2+q2^2)/q1^3", 0, "(-9*q1^2*q2 - 3*q2^3)/q1^4"),
            ("7", 0, "0"),
        ],
    )
    def test_derivatives(self, f, i, expected):
        assert rf(f).derivative(i) == rf(expected)

    def test_evaluate_at_pole(self):
        with pytest.raises(SingularPointError):
            rf("q2/q1").evaluate([0, 1])

    @pytest.mark.parametrize("f,k", [("q2*(9*q1^2+q2^2)/q1^3", 0), ("q1^2 + q2^2", 2), ("1/(q1^2*q2)", -3), ("q1 + q2^2", None)])
    def test_homogeneous_degree(self, f, k):
        assert homogeneous_degree(rf(f)) == k

    def test_ring_axioms_on_random_triples(self):
        rng = random.Random(5)

        def rnd():
            num = MultiPoly(2, {(rng.randint(0, 2), rng.randint(0, 2)): rng.randint(-3, 3) for _ in range(3)})
            den = MultiPoly(2, {(rng.randint(0, 2), rng.randint(0, 2)): rng.randint(1, 3) for _ in range(2)})
            return RatFunc(num, den)

        for _ in range(25):
            a, b, c = rnd(), rnd(), rnd()
            assert (a + b) + c == a + (b + c)
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c

    def test_euler_identity_for_homogeneous_inputs(self):
        for text in ["q2*(9*q1^2+q2^2)/q1^3", "(q1^3 - 2*q2^3)/(q1 + q2)", "1/(q1^2*q2)", "q1*q2"]:
            f = rf(text)
            k = homogeneous_degree(f)
            euler = rf("q1") * f.derivative(0) + rf("q2") * f.derivative(1)
            assert euler == f * k

    def test_derivative_agrees_with_sympy(self):
        f = rf("(q1^3 - 2*q2^3 + q1*q2^2)/(q1^2 + 3*q2^2)")
        ref = sp.diff((S1**3 - 2 * S2**3 + S1 * S2**2) / (S1**2 + 3 * S2**2), S1)
        ours = poly_to_sympy(f.derivative(0).num, (S1, S2)) / poly_to_sympy(f.derivative(0).den, (S1, S2))
        assert sp.simplify(ours - ref) == 0


# ---------------------------------------------------------------------------
# univariate polynomials and roots


class TestUniPoly:
    def test_double_root(self):
        assert integer_roots(UniPoly([1, 2, 1])) == [(-1, 2)]

    def test_no_integer_roots(self):
        assert integer_roots(UniPoly([-1, -1, 1])) == []

    def test_three_roots(self):
        assert sorted(r for r, _ in integer_roots(UniPoly([2, -1, -2, 1]))) == [-1, 1, 2]

    @given(st.lists(st.integers(-6, 6), min_size=1, max_size=4), st.lists(st.integers(-3, 3), max_size=3))
    def test_integer_roots_no_false_positives_or_misses(self, roots, extra):
        # an extra irreducible-ish quadratic factor x^2 + 2 hides no integer roots
        f = UniPoly.from_roots(roots) * UniPoly([2, 0, 1])
        found = dict(integer_roots(f))
        for r, m in found.items():
            assert f(Q(r)) == Q(0)
        assert found == {r: roots.count(r) for r in set(roots)}

    def test_gaussian_roots(self):
        f = UniPoly.from_roots([I, -I, Q(Fraction(1, 2), 3)])
        roots = {r for r, _ in gaussian_rational_roots(f)}
        assert roots == {I, -I, Q(Fraction(1, 2), 3)}

    @settings(max_examples=25)
    @given(unipolys(), unipolys())
    def test_gcd_agrees_with_sympy(self, a, b):
        if a.is_zero() and b.is_zero():
            return
        ours = uni_to_sympy(a.gcd(b), X)
        ref = sp.gcd(uni_to_sympy(a, X), uni_to_sympy(b, X), extension=sp.I)
        if ref == 0:
            assert ours == 0
            return
        assert sp.degree(ours, X) == sp.degree(ref, X)
        assert sp.rem(ours, ref, X, extension=sp.I) == 0

    def test_squarefree_decomposition(self):
        f = UniPoly.from_roots([1, 1, 1, 2, 2, 3])
        parts = squarefree_decomposition(f)
        prod = UniPoly([1])
        for g, m in parts:
            prod = prod * g**m
        assert prod == f.monic()
        assert {m for _, m in parts} == {1, 2, 3}


# ---------------------------------------------------------------------------
# Hermite polynomials and Gaussian moments


class TestHermite:
    def test_low_orders(self):
        assert hermite(0) == UniPoly([1])
        assert hermite(2) == UniPoly([-1, 0, 1])
        assert hermite(3) == UniPoly([0, -3, 0, 1])

    def test_recurrence(self):
        p = UniPoly.x()
        for n in range(20):
            assert hermite(n + 1) == p * hermite(n) - hermite(n).derivative()

    def test_matches_sympy_probabilists_convention(self):
        for n in range(12):
            ref = sp.expand(2 ** sp.Rational(-n, 2) * sp.hermite(n, X / sp.sqrt(2)))
            assert sp.expand(uni_to_sympy(hermite(n), X) - ref) == 0

    def test_expand_examples(self):
        e = hermite_expand(UniPoly([0, 0, 1]))
        assert (e[2], e[0], e[1]) == (Q(1), Q(1), Q(0))
        e5 = hermite_expand(hermite(5))
        assert [e5[n] for n in range(6)] == [Q(0)] * 5 + [Q(1)]
        e4 = hermite_expand(UniPoly([0, 0, 0, 0, 1]))
        assert (e4[4], e4[2], e4[0]) == (Q(1), Q(6), Q(3))

    @given(st.lists(gaussians, max_size=21))
    def test_expand_round_trip(self, coeffs):
        f = UniPoly(coeffs)
        assert hermite_expand(f).to_unipoly() == f

    def test_moment_examples(self):
        assert gaussian_moment(UniPoly([1])) == Q(1)
        assert gaussian_moment(hermite(2) * hermite(2)) == Q(2)
        assert gaussian_moment(hermite(7)) == Q(0)

    def test_orthogonality(self):
        for n in range(13):
            for m in range(13):
                expected = math.factorial(n) if n == m else 0
                assert gaussian_moment(hermite(n) * hermite(m)) == Q(expected)

    def test_moment_against_sympy_integral(self):
        f = UniPoly([3, -1, 2, 0, 5, 1])
        ref = sp.integrate(sp.exp(-X**2 / 2) * uni_to_sympy(f, X), (X, -sp.oo, sp.oo)) / sp.sqrt(2 * sp.pi)
        assert from_sympy_scalar(sp.nsimplify(ref)) == gaussian_moment(f)


# ---------------------------------------------------------------------------
# linear algebra


def _rand_matrix(rng, n, lo=-4, hi=4, cplx=True):
    return [
        [Q(rng.randint(lo, hi), rng.randint(lo, hi) if cplx else 0) for _ in range(n)] for _ in range(n)
    ]


def _to_sympy_matrix(a):
    from conftest import to_sympy_scalar

    return sp.Matrix([[to_sympy_scalar(x) for x in row] for row in a])


def _cofactor_det(m):
    if len(m) == 1:
        return m[0][0]
    total = Q(0)
    for j in range(len(m)):
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        term = m[0][j] * _cofactor_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


class TestLinalg:
    def test_charpoly_against_cofactor_determinant(self):
        rng = random.Random(11)
        for n in (1, 2, 3, 4):
            a = _rand_matrix(rng, n)
            cp = linalg.charpoly(a)
            for t in (Q(0), Q(2), Q(-1, 3), Q(Fraction(1, 2), 1)):
                shifted = [[(t if i == j else Q(0)) - a[i][j] for j in range(n)] for i in range(n)]
                assert cp(t) == _cofactor_det(shifted)

    def test_charpoly_against_sympy(self):
        rng = random.Random(12)
        for n in (2, 3, 4):
            a = _rand_matrix(rng, n)
            ref = _to_sympy_matrix(a).charpoly(X).as_expr()
            assert sp.expand(uni_to_sympy(linalg.charpoly(a), X) - ref) == 0

    def test_minimal_polynomial_of_jordan_block(self):
        a = [[Q(-1), Q(0)], [Q(1), Q(-1)]]
        assert linalg.minimal_polynomial(a) == UniPoly([1, 2, 1])
        assert linalg.minimal_polynomial([[Q(-1), Q(0)], [Q(0), Q(-1)]]) == UniPoly([1, 1])

    def test_nullspace_vectors_annihilate(self):
        rng = random.Random(13)
        for _ in range(10):
            rows = [[Q(rng.randint(-2, 2), rng.randint(-1, 1)) for _ in range(6)] for _ in range(3)]
            rows.append([rows[0][j] + rows[1][j] for j in range(6)])
            ns = linalg.nullspace(rows, 6)
            assert len(ns) == 6 - linalg.rank(rows, 6)
            for v in ns:
                for r in rows:
                    assert sum((r[j] * c for j, c in v.items()), Q(0)) == Q(0)
            assert linalg.rank(rows, 6) == _to_sympy_matrix(rows).rank()

    def test_consistency(self):
        a = [[Q(1), Q(1)], [Q(2), Q(2)]]
        assert linalg.is_consistent(a, [Q(1), Q(2)])
        assert not linalg.is_consistent(a, [Q(1), Q(3)])
