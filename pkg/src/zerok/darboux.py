"""Proper Darboux points: non-zero solutions of ``grad V(d) = d``.

Two routes are provided.  For two degrees of freedom and degree zero the
points are found exactly in the affine chart ``z = q2/q1``, where they can
only sit at ``z = ±i``.  Any dimension is handled by Newton multistart on
``F(q) = grad V(q) - q`` with residual certification.
"""

from __future__ import annotations

import cmath
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exact import I, GaussianRational, SingularPointError
from .numeric import RatFuncArray
from .potential import Potential, gradient, hessian, restrict_projective

__all__ = [
    "ProjectiveDarboux",
    "DarbouxPointNumeric",
    "DarbouxContinuum",
    "darboux_2d",
    "darboux_nd",
    "embed_2d",
    "DEFAULT_TOL",
    "DEFAULT_DEDUP",
    "DEFAULT_SEEDS",
]

DEFAULT_TOL = 1e-9
DEFAULT_DEDUP = 1e-6
DEFAULT_SEEDS = 64
SEED_RADIUS = 3.0


class DarbouxContinuum(Exception):
    """``grad V(q) == q`` identically: every non-zero point is a Darboux point."""


@dataclass(frozen=True)
class ProjectiveDarboux:
    z_star: GaussianRational
    v1: GaussianRational
    x_star_sq: GaussianRational
    branch: int = 1

    def __post_init__(self):
        if self.z_star not in (I, -I):
            raise ValueError(f"affine coordinate must be ±i, got {self.z_star}")
        if self.v1.is_zero():
            raise ValueError("v'(z*) must be non-zero at a proper Darboux point")
        if self.x_star_sq != -self.v1 * self.z_star or self.x_star_sq != self.v1 / self.z_star:
            raise ValueError("x*² inconsistent with v'(z*)")
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")

    def with_branch(self, branch: int) -> "ProjectiveDarboux":
        return ProjectiveDarboux(self.z_star, self.v1, self.x_star_sq, branch)


@dataclass(frozen=True)
class DarbouxPointNumeric:
    coords: tuple[complex, ...]
    residual: float
    newton_iters: int = 0

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)


def darboux_2d(V: Potential) -> list[ProjectiveDarboux]:
    """Exact Darboux points of a planar degree-zero potential."""
    if V.nvars != 2 or V.degree != 0:
        raise ValueError("darboux_2d needs two variables and degree 0")
    v = restrict_projective(V)
    dv = v.derivative(0)
    out = []
    for z in (I, -I):
        try:
            v1 = dv.evaluate([z])
        except SingularPointError:
            # potential singular along the whole line q2 = z q1
            continue
        if v1:
            out.append(ProjectiveDarboux(z, v1, -v1 * z))
    return out


def _residual(grad: RatFuncArray, d: np.ndarray) -> float:
    return float(np.max(np.abs(grad(d) - d)))


def embed_2d(pd: ProjectiveDarboux, V: Potential, tol: float = DEFAULT_TOL) -> DarbouxPointNumeric:
    """The affine point ``d = x*·(1, z*)`` with ``x*`` picked by the branch flag."""
    x = cmath.sqrt(complex(pd.x_star_sq)) * pd.branch
    d = np.array([x, x * complex(pd.z_star)])
    grad = RatFuncArray(gradient(V).components)
    res = _residual(grad, d)
    if not res < tol * max(1.0, float(np.max(np.abs(d)))):
        raise ArithmeticError(f"embedded Darboux point fails certification (residual {res:.3e})")
    return DarbouxPointNumeric(tuple(complex(c) for c in d), res, 0)


def _seed_points(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    # uniform in the ball of radius SEED_RADIUS in C^n = R^(2n)
    g = rng.normal(size=(count, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = SEED_RADIUS * rng.uniform(size=(count, 1)) ** (1.0 / (2 * n))
    g *= r
    return g[:, :n] + 1j * g[:, n:]


def _newton(q, grad, hess, tol, max_iter):
    n = len(q)
    eye = np.eye(n)
    for it in range(1, max_iter + 1):
        try:
            f = grad(q) - q
            if np.max(np.abs(f)) < tol * 1e-3:
                return q, it
            step = np.linalg.solve(hess(q) - eye, f)
        except (SingularPointError, np.linalg.LinAlgError, FloatingPointError):
            return None, it
        q = q - step
        if not np.all(np.isfinite(q)) or np.max(np.abs(q)) > 1e8:
            return None, it
        if np.max(np.abs(step)) < 1e-15 * (1 + np.max(np.abs(q))):
            return q, it
    return q, max_iter


def darboux_nd(
    V: Potential,
    seeds: int = DEFAULT_SEEDS,
    tol: float = DEFAULT_TOL,
    *,
    rng_seed: int = 0,
    dedup: float = DEFAULT_DEDUP,
    max_iter: int = 100,
    workers: int = 1,
) -> list[DarbouxPointNumeric]:
    """Certified Darboux points from Newton multistart.

    Seeds are drawn from the complex ball of radius 3; runs that hit a pole
    or a singular Jacobian are dropped.  Converged points are sorted,
    deduplicated (distance ``dedup``) and re-certified (``residual < tol``).
    """
    if V.nvars < 2:
        raise ValueError("need at least two variables")
    g = gradient(V)
    if g.is_identity():
        raise DarbouxContinuum("gradient is the identity map: continuum of Darboux points")
    grad = RatFuncArray(g.components)
    h = hessian(V)
    n = V.nvars
    hess = RatFuncArray([h[i, j] for i in range(n) for j in range(n)], (n, n))
    starts = _seed_points(n, seeds, np.random.default_rng(rng_seed))

    def run(q0):
        with np.errstate(all="ignore"):
            return _newton(q0, grad, hess, tol, max_iter)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run, starts))
    else:
        results = [run(q0) for q0 in starts]

    found = []
    for q, iters in results:
        if q is None or np.max(np.abs(q)) < 1e-8:
            continue
        try:
            res = _residual(grad, q)
        except SingularPointError:
            continue
        if res < tol:
            found.append((q, res, iters))

    found.sort(key=lambda t: tuple(np.round(np.concatenate([t[0].real, t[0].imag]), 8)))
    kept: list[DarbouxPointNumeric] = []
    for q, res, iters in found:
        if all(np.max(np.abs(q - k.vector)) > dedup for k in kept):
            if _residual(grad, q) < tol:
                kept.append(DarbouxPointNumeric(tuple(complex(c) for c in q), res, iters))
    return kept


def is_identity_gradient(V: Potential) -> bool:
    return gradient(V).is_identity()


def exact_representative(V: Potential) -> tuple[GaussianRational, ...]:
    """A concrete Darboux point for the identity-gradient case (``e_1``)."""
    return tuple(GaussianRational(1 if i == 0 else 0) for i in range(V.nvars))
