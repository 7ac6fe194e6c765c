import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from zerok.exact import GaussianRational, MultiPoly, UniPoly

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

SEMISIMPLE_MEMBER = "q2*(9*q1^2 + q2^2)/q1^3"
FAMILY = "q2*(q2 - $a*q1)*(q2 - $b*q1)/q1^3"


# ---------------------------------------------------------------------------
# sympy bridges, used as independent oracles


def to_sympy_scalar(c: GaussianRational):
    return sp.Rational(c.real.numerator, c.real.denominator) + sp.I * sp.Rational(
        c.imag.numerator, c.imag.denominator
    )


def poly_to_sympy(p: MultiPoly, syms):
    out = sp.Integer(0)
    for e, c in p.items():
        term = to_sympy_scalar(c)
        for s, k in zip(syms, e):
            term *= s**k
        out += term
    return sp.expand(out)


def uni_to_sympy(p: UniPoly, x):
    return sp.expand(sum(to_sympy_scalar(p[k]) * x**k for k in range(p.degree + 1)))


def from_sympy_scalar(v) -> GaussianRational:
    re, im = sp.re(v), sp.im(v)
    return GaussianRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


# ---------------------------------------------------------------------------
# strategies

small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
gaussians = st.builds(GaussianRational, small_fracs, small_fracs)
nonzero_gaussians = gaussians.filter(lambda g: not g.is_zero())


@st.composite
def multipolys(draw, nvars=2, max_terms=4, max_deg=3):
    terms = draw(
        st.dictionaries(
            st.tuples(*[st.integers(0, max_deg)] * nvars), gaussians, max_size=max_terms
        )
    )
    return MultiPoly(nvars, terms)


@st.composite
def unipolys(draw, max_deg=4):
    coeffs = draw(st.lists(gaussians, max_size=max_deg + 1))
    return UniPoly(coeffs)


# ---------------------------------------------------------------------------
# random planar degree-zero potentials


def random_degree_zero_text(rng: random.Random) -> str:
    """A random ratio of two forms of equal degree in q1, q2."""
    d = rng.randint(1, 3)

    def form():
        coeffs = [rng.randint(-4, 4) for _ in range(d + 1)]
        if all(c == 0 for c in coeffs):
            coeffs[0] = 1
        terms = [f"({c})*q1^{d - j}*q2^{j}" for j, c in enumerate(coeffs) if c]
        return " + ".join(terms)

    return f"({form()})/({form()})"


@pytest.fixture
def rng():
    return random.Random(20240613)


def valid_random_potentials(count: int, seed: int = 20240613):
    """Random planar degree-zero potentials with proper Darboux points at both ±i."""
    from zerok.exact import I, SingularPointError
    from zerok.potential import parse_potential, restrict_projective

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        V = parse_potential(random_degree_zero_text(rng), "q1,q2")
        if V.expr.is_constant():
            continue
        dv = restrict_projective(V).derivative(0)
        try:
            ok = all(not dv.evaluate([z]).is_zero() for z in (I, -I))
        except SingularPointError:
            ok = False
        if ok:
            out.append(V)
    return out


# ---------------------------------------------------------------------------
# independent rendering of the table, straight from its displayed formulas


def table_oracle_families(k):
    sq = lambda a, b, g, d: (lambda p: Fraction(a) + Fraction(b) * (g + d * p) ** 2)  # noqa: E731
    fams = {
        (2, 1): lambda p: p + Fraction(k, 2) * p * (p - 1),
        (3, 1): lambda p: Fraction(1, 2) * (Fraction(k - 1, k) + p * (p + 1) * k),
    }
    extra = {
        3: {(4, 1): sq("-1/24", "1/6", 1, 3), (4, 2): sq("-1/24", "3/32", 1, 4),
            (4, 3): sq("-1/24", "3/50", 1, 5), (4, 4): sq("-1/24", "3/50", 2, 5)},
        4: {(5, 1): sq("-1/8", "2/9", 1, 3)},
        5: {(6, 1): sq("-9/40", "5/18", 1, 3), (6, 2): sq("-9/40", "1/10", 2, 5)},
        -3: {(7, 1): sq("25/24", "-1/6", 1, 3), (7, 2): sq("25/24", "-3/32", 1, 4),
             (7, 3): sq("25/24", "-3/50", 1, 5), (7, 4): sq("25/24", "-3/50", 2, 5)},
        -4: {(8, 1): sq("9/8", "-2/9", 1, 3)},
        -5: {(9, 1): sq("49/40", "-5/18", 1, 3), (9, 2): sq("49/40", "-1/10", 2, 5)},
    }
    fams.update(extra.get(k, {}))
    return fams


def brute_force_table(k, lam, window=50):
    out = set()
    for (row, fam), f in table_oracle_families(k).items():
        for p in range(-window, window + 1):
            if f(p) == lam:
                out.add((row, fam, p))
    return out
