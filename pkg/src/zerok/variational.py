"""Variational equations along the degree-zero phase curves.

On the invariant plane the reduced dynamics is ``q' = p, p' = -1/q`` with
phase curves ``p²/2 + ln q = ε``, so ``q = exp(ε - p²/2)``.  Taking ``p`` as
the independent variable turns each Jordan block of the Hessian into
``x'' + p x' + λ x = 0`` (plus ``+ x_prev`` couplings for larger blocks).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp

from .exact import GaussianRational, UniPoly, as_qi, gaussian_moment, hermite, hermite_expand
from .exact.linalg import is_consistent
from .numeric import RatFuncArray
from .potential import Potential, gradient
from .spectral import JordanBlockDesc, SpectralData

__all__ = [
    "PhaseCurve",
    "BlockEquation",
    "VESystem",
    "PForm",
    "KummerParams",
    "HermiteSolution",
    "GaloisClass",
    "Alpha1Certificate",
    "NoClosedFormError",
    "PathTooCloseError",
    "TrajectoryError",
    "variational_system",
    "p_form",
    "kummer_params",
    "hermite_solution",
    "verify_solution",
    "galois_class",
    "alpha1_obstruction",
    "alpha1_for_eigenvalue",
    "second_solution_numeric",
    "integrate_ve_numeric",
    "plane_invariance",
    "RTOL",
    "ATOL",
]

RTOL = 1e-10
ATOL = 1e-10


class NoClosedFormError(ValueError):
    pass


class PathTooCloseError(ValueError):
    def __init__(self, zero: complex, sample: complex, distance: float):
        self.zero = zero
        super().__init__(
            f"sample p={sample:.6g} lies {distance:.3g} from the zero {zero:.6g} of the polynomial part"
        )


class TrajectoryError(RuntimeError):
    pass


def _rational(lam) -> Fraction:
    if isinstance(lam, GaussianRational):
        if not lam.is_rational():
            raise ValueError(f"eigenvalue {lam} is not real")
        return lam.real
    if isinstance(lam, str):
        return Fraction(lam)
    return Fraction(lam)


def _integer(lam) -> int | None:
    try:
        f = _rational(lam)
    except (ValueError, TypeError):
        return None
    return int(f) if f.denominator == 1 else None


@dataclass(frozen=True)
class PhaseCurve:
    epsilon: complex = 0j

    def q(self, p):
        return np.exp(self.epsilon - np.asarray(p) ** 2 / 2)


# ---------------------------------------------------------------------------
# equation descriptors


@dataclass(frozen=True)
class PForm:
    """``a2 x'' + a1 x' + a0 x (+ coupling * x_prev) = 0`` in the variable p."""

    lam: Fraction
    a2: UniPoly = field(default_factory=lambda: UniPoly([1]))
    a1: UniPoly = field(default_factory=lambda: UniPoly([0, 1]))
    coupled: bool = False

    @property
    def a0(self) -> UniPoly:
        return UniPoly([self.lam])

    def __str__(self):
        lam = self.lam
        tail = "" if lam == 0 else (f" + {lam}*x" if lam > 0 else f" - {-lam}*x")
        s = f"x'' + p*x'{tail} = 0"
        if self.coupled:
            s = s.replace("x", "y") .replace(" = 0", " + x = 0")
        return s


def p_form(lam, coupled: bool = False) -> PForm:
    return PForm(_rational(lam), coupled=coupled)


@dataclass(frozen=True)
class BlockEquation:
    block: JordanBlockDesc
    t_form: tuple[str, ...]
    p_form: tuple[PForm, ...]


@dataclass(frozen=True)
class VESystem:
    equations: tuple[BlockEquation, ...]
    epsilon: complex = 0j

    @property
    def lambda_blocks(self) -> tuple[JordanBlockDesc, ...]:
        return tuple(e.block for e in self.equations)

    @property
    def dimension(self) -> int:
        return 2 * sum(b.size for b in self.lambda_blocks)


def variational_system(sd: SpectralData, pc: PhaseCurve = PhaseCurve()) -> VESystem:
    """Jordan-form variational system ``x_tt = -q^-2 Λ x`` split by block."""
    eqs = []
    for b in sd.blocks:
        lam = b.eigenvalue
        t_eqs = [f"x1_tt = -({lam})/q^2 * x1"]
        p_eqs = []
        real = isinstance(lam, GaussianRational) and lam.is_rational()
        for j in range(2, b.size + 1):
            t_eqs.append(f"x{j}_tt = -({lam})/q^2 * x{j} - 1/q^2 * x{j - 1}")
        if real:
            p_eqs = [p_form(lam)] + [p_form(lam, coupled=True)] * (b.size - 1)
        eqs.append(BlockEquation(b, tuple(t_eqs), tuple(p_eqs)))
    return VESystem(tuple(eqs), pc.epsilon)


@dataclass(frozen=True)
class KummerParams:
    a: Fraction
    c: Fraction


def kummer_params(lam) -> KummerParams:
    """Kummer-form parameters after ``z = -p²/2``."""
    return KummerParams(a=-_rational(lam) / 2, c=Fraction(1, 2))


# ---------------------------------------------------------------------------
# closed-form solutions


@dataclass(frozen=True)
class HermiteSolution:
    """``x = q^[q_factor] * poly(p)`` with ``poly`` already in the variable p."""

    lam: int
    poly: UniPoly
    q_factor: bool
    argument: str
    hermite_index: int

    def __str__(self):
        arg = "p" if self.argument == "p" else "-i*p"
        base = f"He_{self.hermite_index}({arg})"
        return f"q*{base}" if self.q_factor else base

    def value(self, p, q=None, pc: PhaseCurve = PhaseCurve()):
        p = np.asarray(p, dtype=complex)
        poly = np.polynomial.polynomial.polyval(p, self.poly.to_complex())
        if self.q_factor:
            q = pc.q(p) if q is None else q
            return q * poly
        return poly

    def derivative(self, p, q=None, pc: PhaseCurve = PhaseCurve()):
        """d/dp of the solution, using q' = -p q."""
        p = np.asarray(p, dtype=complex)
        c = self.poly.to_complex()
        poly = np.polynomial.polynomial.polyval(p, c)
        dpoly = np.polynomial.polynomial.polyval(p, np.polynomial.polynomial.polyder(c)) if len(c) > 1 else 0 * p
        if self.q_factor:
            q = pc.q(p) if q is None else q
            return q * (dpoly - p * poly)
        return dpoly


def hermite_solution(lam) -> HermiteSolution:
    n = _integer(lam)
    if n is None:
        raise NoClosedFormError(
            f"λ={lam} is not an integer: no closed-form Hermite solution "
            "(the Galois group is GL(2,C))"
        )
    if n >= 1:
        return HermiteSolution(n, hermite(n - 1), True, "p", n - 1)
    he = hermite(-n)
    minus_ip = UniPoly([0, GaussianRational(0, -1)])
    return HermiteSolution(n, he(minus_ip), False, "-ip", -n)


# elements of C[p][q] as {q power: coefficient polynomial in p}
_QPoly = dict


def _d_dp(f: _QPoly) -> _QPoly:
    """Derivative in p of sum c_j(p) q^j, with q' = -p q."""
    out: _QPoly = {}
    p = UniPoly([0, 1])
    for j, c in f.items():
        t = c.derivative() - p * c * j
        if t:
            out[j] = out.get(j, UniPoly()) + t
    return {j: c for j, c in out.items() if c}


def verify_solution(sol: HermiteSolution) -> _QPoly:
    """Residual of ``x'' + p x' + λ x`` computed symbolically; ``{}`` means 0."""
    x: _QPoly = {1 if sol.q_factor else 0: sol.poly}
    dx = _d_dp(x)
    ddx = _d_dp(dx)
    p = UniPoly([0, 1])
    res: _QPoly = {}
    for j in set(x) | set(dx) | set(ddx):
        t = ddx.get(j, UniPoly()) + p * dx.get(j, UniPoly()) + x.get(j, UniPoly()) * sol.lam
        if t:
            res[j] = t
    return res


# ---------------------------------------------------------------------------
# Galois classification and the α₁ obstruction


@dataclass(frozen=True)
class GaloisClass:
    over_base: str  # "GL2" or "AdditiveSemidirect"
    virtually_abelian_over_qp: bool
    dimension_over_qp: int

    def __str__(self):
        g = "GL(2,C)" if self.over_base == "GL2" else "C* ⋉ C"
        return f"{g}; over C(q,p): dim {self.dimension_over_qp}, virtually abelian={self.virtually_abelian_over_qp}"


def galois_class(lam) -> GaloisClass:
    if isinstance(lam, (complex, float)) and not isinstance(lam, bool):
        lam_int = abs(lam - round(complex(lam).real)) < 1e-12
    else:
        lam_int = _integer(lam) is not None
    if lam_int:
        return GaloisClass("AdditiveSemidirect", True, 1)
    return GaloisClass("GL2", False, 3)


@dataclass(frozen=True)
class Alpha1Certificate:
    """No polynomial α with α' - pα = -He_{λ-1}² exists.

    ``moment_value`` is the Gaussian moment of He_{λ-1}² in units of
    sqrt(2π); the left side integrates to zero against exp(-p²/2).
    """

    lam: int
    moment_value: Fraction
    he0_component: Fraction
    searched_degree: int
    system_consistent: bool
    source_eigenvalue: int | None = None
    conclusion: str = "no polynomial α₁ exists"

    def check(self) -> bool:
        return (
            self.moment_value == factorial(self.lam - 1)
            and self.moment_value != 0
            and self.he0_component == self.moment_value
            and not self.system_consistent
        )


def _alpha1_system(h2: UniPoly, deg: int):
    # unknown α = sum a_k p^k, k = 0..deg; equation α' - pα + h2 = 0
    rows, rhs = [], []
    for j in range(deg + 2):
        row = [GaussianRational(0)] * (deg + 1)
        if j + 1 <= deg:
            row[j + 1] = GaussianRational(j + 1)
        if 0 <= j - 1 <= deg:
            row[j - 1] = row[j - 1] - 1
        rows.append(row)
        rhs.append(-h2[j])
    return rows, rhs


def alpha1_obstruction(lam: int, source_eigenvalue: int | None = None) -> Alpha1Certificate:
    if lam < 1:
        raise ValueError("alpha1_obstruction needs λ ≥ 1; reduce λ ≤ 0 via 1 - λ first")
    h2 = hermite(lam - 1) ** 2
    moment = gaussian_moment(h2)
    he0 = hermite_expand(h2)[0]
    deg = 2 * lam
    rows, rhs = _alpha1_system(h2, deg)
    consistent = is_consistent(rows, rhs)
    cert = Alpha1Certificate(
        lam=lam,
        moment_value=moment.real,
        he0_component=he0.real,
        searched_degree=deg,
        system_consistent=consistent,
        source_eigenvalue=source_eigenvalue,
    )
    if not cert.check():
        raise ArithmeticError(f"α₁ certificate failed to verify for λ={lam}")
    return cert


def alpha1_for_eigenvalue(lam: int) -> Alpha1Certificate:
    """Certificate for a Jordan block at integer ``lam``; λ ≤ 0 maps to 1 - λ."""
    lam = int(lam)
    return alpha1_obstruction(lam if lam >= 1 else 1 - lam, source_eigenvalue=lam)


# ---------------------------------------------------------------------------
# numerics


def _poly_zeros(sol: HermiteSolution) -> np.ndarray:
    return sol.poly.numeric_roots()


def _segment_distance(z: complex, a: complex, b: complex) -> float:
    ab = b - a
    if ab == 0:
        return abs(z - a)
    t = ((z - a) * ab.conjugate()).real / abs(ab) ** 2
    t = min(1.0, max(0.0, t))
    return abs(z - (a + t * ab))


def _contour(a: complex, b: complex, zeros: np.ndarray, clearance: float) -> list[complex]:
    """Polyline from a to b staying ``clearance`` away from all zeros."""
    if all(_segment_distance(z, a, b) >= clearance for z in zeros):
        return [a, b]
    for h in (0.3, -0.3, 0.6, -0.6, 1.0, -1.0, 1.5, -1.5):
        pts = [a, a + 1j * h, b + 1j * h, b]
        if all(
            _segment_distance(z, pts[k], pts[k + 1]) >= clearance
            for z in zeros
            for k in range(3)
        ):
            return pts
    raise PathTooCloseError(complex(zeros[0]), a, 0.0)


def _cquad(f, a: complex, b: complex) -> complex:
    d = b - a

    def re(s):
        return (f(a + s * d) * d).real

    def im(s):
        return (f(a + s * d) * d).imag

    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    return quad(re, 0.0, 1.0, **opts)[0] + 1j * quad(im, 0.0, 1.0, **opts)[0]


def _integrate_p1(lam: float, path: Sequence[complex], y0: np.ndarray) -> np.ndarray:
    """Integrate x'' + p x' + λx = 0 along a polyline; states at the vertices."""
    out = [y0]
    y = y0
    for a, b in zip(path[:-1], path[1:]):
        d = b - a

        def rhs(s, u, a=a, d=d):
            p = a + s * d
            x, dx = u[0::2], u[1::2]
            ddx = -p * dx - lam * x
            out_ = np.empty_like(u)
            out_[0::2] = dx * d
            out_[1::2] = ddx * d
            return out_

        sol = solve_ivp(rhs, (0.0, 1.0), y, method="DOP853", rtol=RTOL * 1e-2, atol=ATOL * 1e-2)
        if not sol.success:
            raise TrajectoryError(sol.message)
        y = sol.y[:, -1]
        out.append(y)
    return np.array(out)


@dataclass(frozen=True)
class SecondSolutionReport:
    lam: int
    p: tuple[complex, ...]
    x: tuple[complex, ...]
    x_tilde: tuple[complex, ...]
    wronskian_constant: complex
    wronskian_deviation: float
    quadrature_vs_ode: float


def second_solution_numeric(
    lam: int, path: Sequence[complex], pc: PhaseCurve = PhaseCurve(), clearance: float = 0.1
) -> SecondSolutionReport:
    """Second solution ``x̃ = x_λ ∫ q/x_λ² dp`` along sample points ``path``.

    The integral is accumulated by adaptive quadrature between consecutive
    samples (detouring through the complex plane around zeros of x_λ, where
    the integrand has zero residue).  Independently, both solutions are
    propagated through the ODE itself; their Wronskian must stay
    proportional to q.
    """
    sol = hermite_solution(lam)
    pts = [complex(p) for p in path]
    if len(pts) < 2:
        raise ValueError("need at least two sample points")
    zeros = _poly_zeros(sol)
    for s in pts:
        for z in zeros:
            if abs(s - z) < clearance:
                raise PathTooCloseError(complex(z), s, abs(s - z))

    def integrand(p):
        x = sol.value(p, pc=pc)
        return pc.q(p) / (x * x)

    integral = [0j]
    for a, b in zip(pts[:-1], pts[1:]):
        poly = _contour(a, b, zeros, clearance / 2)
        integral.append(integral[-1] + sum(_cquad(integrand, u, v) for u, v in zip(poly[:-1], poly[1:])))
    p_arr = np.array(pts)
    x = sol.value(p_arr, pc=pc)
    xt = x * np.array(integral)

    # ODE route: states (x, x', x̃, x̃') from exact data at the first sample
    p0 = pts[0]
    x0, dx0 = complex(sol.value(p0, pc=pc)), complex(sol.derivative(p0, pc=pc))
    q0 = complex(pc.q(p0))
    y0 = np.array([x0, dx0, 0j, q0 / x0], dtype=complex)
    states = _integrate_p1(float(lam), pts, y0)
    xs, dxs, xts, dxts = states[:, 0], states[:, 1], states[:, 2], states[:, 3]
    w = dxts * xs - xts * dxs
    q = pc.q(p_arr)
    c = w[0] / q[0]
    wdev = float(np.max(np.abs(w / (c * q) - 1)))
    scale = max(float(np.max(np.abs(xt))), 1e-300)
    qdev = float(np.max(np.abs(xts - xt)) / scale)
    return SecondSolutionReport(
        lam=int(lam),
        p=tuple(pts),
        x=tuple(complex(v) for v in x),
        x_tilde=tuple(complex(v) for v in xt),
        wronskian_constant=complex(c),
        wronskian_deviation=wdev,
        quadrature_vs_ode=qdev,
    )


@dataclass(frozen=True)
class VETrajectory:
    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    x: np.ndarray
    closed_form: np.ndarray
    max_relative_deviation: float
    epsilon: complex


def integrate_ve_numeric(
    lam: int,
    pc: PhaseCurve | None = None,
    t_span: tuple[float, float] = (0.0, 1.0),
    initial: tuple[complex, complex] = (1.0, 0.0),
    n_eval: int = 201,
    min_q: float = 1e-6,
) -> VETrajectory:
    """Integrate base flow and ``x_tt = -λ x / q²`` together in real time.

    ``x`` starts on the closed-form solution x_λ(p(t)); the report gives the
    largest deviation from x_λ along the trajectory, relative to max |x_λ|.
    ``pc`` defaults to the phase curve through ``initial``.
    """
    sol = hermite_solution(lam)
    q0, p0 = complex(initial[0]), complex(initial[1])
    if q0 == 0:
        raise ValueError("initial q must be non-zero")
    eps = p0 * p0 / 2 + cmath.log(q0)
    if pc is None:
        pc = PhaseCurve(eps)
    elif abs(pc.epsilon - eps) > 1e-12 * max(1.0, abs(eps)):
        raise ValueError(f"initial data lie on ε={eps}, not on ε={pc.epsilon}")

    def x_closed(q, p):
        return sol.value(p, q=q)

    def xdot_closed(q, p):
        # dx/dt = dx/dp * dp/dt with dp/dt = -1/q
        return sol.derivative(p, q=q) * (-1.0 / q)

    y0 = np.array([q0, p0, complex(x_closed(q0, p0)), complex(xdot_closed(q0, p0))])

    def near_zero(t, y):
        return abs(y[0]) - min_q

    near_zero.terminal = True

    def rhs(t, y):
        q, p, x, xd = y
        return np.array([p, -1.0 / q, xd, -lam * x / (q * q)])

    t_eval = np.linspace(t_span[0], t_span[1], n_eval)
    out = solve_ivp(
        rhs, t_span, y0, method="DOP853", rtol=RTOL, atol=ATOL * 1e-2, t_eval=t_eval, events=near_zero
    )
    if out.status == 1 or (out.t_events and len(out.t_events[0])):
        raise TrajectoryError(f"trajectory came within {min_q:g} of q=0")
    if not out.success:
        raise TrajectoryError(out.message)
    q, p, x = out.y[0], out.y[1], out.y[2]
    cf = x_closed(q, p)
    dev = float(np.max(np.abs(x - cf)) / max(float(np.max(np.abs(cf))), 1e-300))
    return VETrajectory(out.t, q, p, x, cf, dev, pc.epsilon)


def plane_invariance(
    V: Potential,
    d: Sequence[complex],
    initial: tuple[complex, complex] = (1.0, 0.0),
    t_span: tuple[float, float] = (0.0, 1.0),
    n_eval: int = 101,
) -> float:
    """Max off-plane component of the full flow started at ``(q0 d, p0 d)``.

    Measured as the component of ``(q, p)`` orthogonal to ``d`` (Hermitian
    projection), relative to ``|d|``.
    """
    if V.degree != 0:
        raise ValueError("plane flow check is set up for degree 0")
    grad = RatFuncArray(gradient(V).components)
    d = np.asarray(d, dtype=complex)
    n = len(d)
    dn = d / np.linalg.norm(d)
    y0 = np.concatenate([initial[0] * d, initial[1] * d])

    def rhs(t, y):
        return np.concatenate([y[n:], -grad(y[:n])])

    out = solve_ivp(
        rhs, t_span, y0.astype(complex), method="DOP853", rtol=1e-12, atol=1e-14,
        t_eval=np.linspace(*t_span, n_eval),
    )
    if not out.success:
        raise TrajectoryError(out.message)
    worst = 0.0
    for k in range(out.y.shape[1]):
        for part in (out.y[:n, k], out.y[n:, k]):
            perp = part - np.vdot(dn, part) * dn
            worst = max(worst, float(np.linalg.norm(perp) / np.linalg.norm(d)))
    return worst


def as_exact_lambda(lam) -> GaussianRational:
    return as_qi(Fraction(lam)) if not isinstance(lam, GaussianRational) else lam
