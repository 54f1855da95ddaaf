"""
The interpolation problem on the grid x_s = q^(-s), s = 0..N.

U(x) = sum u_i phi_i(x), V(x) = sum v_i chi_i(x) with u_0 = 1 and
V(q^(-s)) = Y_s U(q^(-s)).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Any, List, Sequence, Tuple

import numpy as np

from .errors import DomainError, NumericalFailure
from .special_functions import (
    Bases,
    ell_gamma,
    theta_pochhammer,
    theta_pochhammer_multi,
)
from .utils import PARAM_MODULUS_RANGE, draw_complex

logger = logging.getLogger(__name__)

CONSTRAINT_TOL = 1e-10
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class PadeParams:
    k: Any
    a: Tuple[Any, ...]
    m: int
    n: int

    @property
    def N(self) -> int:
        return self.m + self.n

    def ai(self, i: int) -> Any:
        """1-based access: ai(1) is a_1."""
        return self.a[i - 1]

    @classmethod
    def from_free(cls, k: Any, a_free: Sequence[Any], m: int, n: int, b: Bases) -> "PadeParams":
        """Build from k, a_1..a_5; a_6 = k^3/(a_1...a_5)."""
        if len(a_free) != 5:
            raise DomainError(f"expected 5 free parameters a_1..a_5, got {len(a_free)}")
        k = b.scalar(k)
        a = [b.scalar(x) for x in a_free]
        prod = b.ctx.mpc(1)
        for x in a:
            if x == 0:
                raise DomainError("parameters a_i must be nonzero")
            prod *= x
        P = cls(k=k, a=tuple(a) + (k ** 3 / prod,), m=int(m), n=int(n))
        P.validate(b)
        return P

    def validate(self, b: Bases, tol: float = CONSTRAINT_TOL) -> None:
        if self.m < 0 or self.n < 0:
            raise DomainError(f"m, n must be >= 0, got ({self.m}, {self.n})")
        if len(self.a) != 6:
            raise DomainError("six parameters a_1..a_6 are required")
        if self.k == 0 or any(x == 0 for x in self.a):
            raise DomainError("k and a_i must be nonzero")
        prod = b.ctx.mpc(1)
        for x in self.a:
            prod *= x
        if abs(prod - self.k ** 3) > tol * abs(self.k ** 3):
            raise DomainError("constraint a_1...a_6 = k^3 violated")
        # denominators of Y_s and of the basis at the grid
        for i in range(6):
            if abs(theta_pochhammer(self.k / self.a[i], self.N, b)) < b.zero_tol:
                raise DomainError(f"theta(k/a_{i + 1})_N vanishes: non-generic parameters")


def shift_T(P: PadeParams, b: Bases) -> PadeParams:
    """(k, a_1, a_2, a_3..a_6, m, n) -> (kq, a_1/q, a_2, q a_3..q a_6, m+1, n-1)."""
    if P.n < 1:
        raise DomainError("the T-shift needs n >= 1")
    q = b.q
    a = P.a
    return PadeParams(k=P.k * q, a=(a[0] / q, a[1]) + tuple(x * q for x in a[2:]),
                      m=P.m + 1, n=P.n - 1)


def dual_params(P: PadeParams) -> PadeParams:
    """Exchange the roles of U and V: (n, m, k/a_2, k/a_1, k/a_4, k/a_3, k/a_5, k/a_6)."""
    k, a = P.k, P.a
    return PadeParams(k=k, a=(k / a[1], k / a[0], k / a[3], k / a[2], k / a[4], k / a[5]),
                      m=P.n, n=P.m)


def scale_params(P: PadeParams, index: int, power: int, b: Bases) -> PadeParams:
    """T_{a_index}^power: a_index -> q^power a_index."""
    a = list(P.a)
    a[index - 1] = a[index - 1] * b.q ** power
    return replace(P, a=tuple(a))


def draw_pade_params(rng: np.random.Generator, m: int, n: int, b: Bases) -> PadeParams:
    """a_1..a_5, k with moduli in [0.7, 1.4] and generic phases; a_6 from the constraint."""
    last_error = None
    for _ in range(50):
        k = draw_complex(rng, *PARAM_MODULUS_RANGE)
        a_free = [draw_complex(rng, *PARAM_MODULUS_RANGE) for _ in range(5)]
        try:
            return PadeParams.from_free(k, a_free, m, n, b)
        except DomainError as exc:
            last_error = exc
    raise DomainError(f"no generic parameter draw found: {last_error}")


# ===========================
# DATA
# ===========================

def y_value(s: int, P: PadeParams, b: Bases) -> Any:
    """Y_s = prod_i theta(a_i)_s / theta(k/a_i)_s."""
    if s < 0:
        raise DomainError("grid index must be >= 0")
    num = theta_pochhammer_multi(P.a, s, b)
    den = theta_pochhammer_multi([P.k / x for x in P.a], s, b)
    if abs(den) < b.zero_tol:
        raise NumericalFailure(f"denominator of Y_{s} vanishes")
    return num / den


def y_func(x: Any, P: PadeParams, b: Bases) -> Any:
    """Y(x) = prod_i Gamma(a_i/x, k/a_i) / Gamma(k/(a_i x), a_i)."""
    x = b.scalar(x)
    if x == 0:
        raise DomainError("Y(x) is undefined at x = 0")
    value = b.ctx.mpc(1)
    for a in P.a:
        value *= ell_gamma(a / x, b) * ell_gamma(P.k / a, b)
        value /= ell_gamma(P.k / (a * x), b) * ell_gamma(a, b)
    return value


def phi(i: int, x: Any, P: PadeParams, b: Bases) -> Any:
    if i < 0 or i > P.n:
        raise DomainError(f"phi index must lie in 0..{P.n}, got {i}")
    if i == 0:
        return b.ctx.mpc(1)
    x = b.scalar(x)
    q, k, a2, a4 = b.q, P.k, P.ai(2), P.ai(4)
    qi = q ** i
    num = theta_pochhammer_multi([a4 / x, k / (qi * a4 * x)], i, b) * theta_pochhammer_multi(
        [a2 / qi, k / a2], i, b)
    den = theta_pochhammer_multi([a2 / (qi * x), k / (a2 * x)], i, b) * theta_pochhammer_multi(
        [a4, k / (qi * a4)], i, b)
    if abs(den) < b.zero_tol:
        raise NumericalFailure(f"phi_{i} denominator vanishes", where=x)
    return num / den


def chi(i: int, x: Any, P: PadeParams, b: Bases) -> Any:
    if i < 0 or i > P.m:
        raise DomainError(f"chi index must lie in 0..{P.m}, got {i}")
    if i == 0:
        return b.ctx.mpc(1)
    x = b.scalar(x)
    q, k, a1, a3 = b.q, P.k, P.ai(1), P.ai(3)
    qi = q ** i
    num = theta_pochhammer_multi([a3 / (qi * x), k / (a3 * x)], i, b) * theta_pochhammer_multi(
        [a1, k / (qi * a1)], i, b)
    den = theta_pochhammer_multi([a1 / x, k / (qi * a1 * x)], i, b) * theta_pochhammer_multi(
        [a3 / qi, k / a3], i, b)
    if abs(den) < b.zero_tol:
        raise NumericalFailure(f"chi_{i} denominator vanishes", where=x)
    return num / den


def phi_grid(i: int, s: int, P: PadeParams, b: Bases) -> Any:
    """phi_i(q^(-s)) in its product-over-s form."""
    q, k, a2, a4 = b.q, P.k, P.ai(2), P.ai(4)
    qi = q ** i
    num = theta_pochhammer_multi([k / a2, k / a4, a2 / qi, qi * a4], s, b)
    den = theta_pochhammer_multi([a2, a4, qi * k / a2, k / (qi * a4)], s, b)
    return num / den


def chi_grid(i: int, s: int, P: PadeParams, b: Bases) -> Any:
    """chi_i(q^(-s)) in its product-over-s form."""
    q, k, a1, a3 = b.q, P.k, P.ai(1), P.ai(3)
    qi = q ** i
    num = theta_pochhammer_multi([a1, a3, k / (qi * a1), qi * k / a3], s, b)
    den = theta_pochhammer_multi([k / a1, k / a3, qi * a1, a3 / qi], s, b)
    return num / den


def u_den(x: Any, P: PadeParams, b: Bases) -> Any:
    x = b.scalar(x)
    return theta_pochhammer_multi([P.ai(2) / (b.q ** P.n * x), P.k / (P.ai(2) * x)], P.n, b)


def v_den(x: Any, P: PadeParams, b: Bases) -> Any:
    x = b.scalar(x)
    return theta_pochhammer_multi([P.ai(1) / x, P.k / (b.q ** P.m * P.ai(1) * x)], P.m, b)


def helper_N(x: Any, P: PadeParams, b: Bases) -> Any:
    """theta(1/(q^N x), k/(qx))_{N+1} / (U_den(x) V_den(x))."""
    x = b.scalar(x)
    q = b.q
    num = theta_pochhammer_multi([1 / (q ** P.N * x), P.k / (q * x)], P.N + 1, b)
    den = u_den(x, P, b) * v_den(x, P, b)
    if abs(den) < b.zero_tol:
        raise NumericalFailure("U_den V_den vanishes", where=x)
    return num / den


# ===========================
# SOLVE
# ===========================

@dataclass(frozen=True)
class InterpolantPair:
    u: Tuple[Any, ...]
    v: Tuple[Any, ...]
    residual_norm: float


def _equilibrate(A: Any, rhs: Any) -> List[Any]:
    """Scale rows (with the right-hand side) then columns to unit max-norm; returns column scales."""
    rows, cols = A.rows, A.cols
    for r in range(rows):
        scale = max(abs(A[r, c]) for c in range(cols))
        if scale == 0:
            raise NumericalFailure("interpolation system has a zero row")
        rhs[r] /= scale
        for c in range(cols):
            A[r, c] /= scale
    col_scales = []
    for c in range(cols):
        scale = max(abs(A[r, c]) for r in range(rows))
        if scale == 0:
            raise NumericalFailure("interpolation system has a zero column")
        col_scales.append(scale)
        for r in range(rows):
            A[r, c] /= scale
    return col_scales


def solve_interpolation(P: PadeParams, b: Bases, condition_limit: float = CONDITION_LIMIT,
                        residual_tol: float = 1e-8) -> InterpolantPair:
    ctx = b.ctx
    n, m, N = P.n, P.m, P.N
    size = N + 1
    A = ctx.matrix(size, size)
    rhs = ctx.matrix(size, 1)
    for s in range(size):
        x = b.q ** (-s)
        ys = y_value(s, P, b)
        for i in range(1, n + 1):
            A[s, i - 1] = -ys * phi(i, x, P, b)
        for j in range(m + 1):
            A[s, n + j] = chi(j, x, P, b)
        rhs[s] = ys

    col_scales = _equilibrate(A, rhs)

    try:
        condition = ctx.cond(A)
        solution = ctx.lu_solve(A, rhs)
    except ZeroDivisionError:
        raise NumericalFailure("interpolation system is singular: non-generic parameters")
    if condition > condition_limit:
        raise NumericalFailure(
            f"interpolation system is ill-conditioned (cond ~ {ctx.nstr(condition, 3)})"
        )
    logger.debug("interpolation solve (m=%d, n=%d) cond=%s", m, n, ctx.nstr(condition, 3))

    coeffs = [solution[c] / col_scales[c] for c in range(size)]
    u = (ctx.mpc(1),) + tuple(coeffs[:n])
    v = tuple(coeffs[n:])
    pair = InterpolantPair(u=u, v=v, residual_norm=0.0)
    worst = max(interpolation_residuals(pair, P, b))
    if worst > residual_tol:
        raise NumericalFailure(f"interpolation residual {float(worst):.3e} above {residual_tol:.1e}")
    return replace(pair, residual_norm=float(worst))


def eval_U(ip: InterpolantPair, x: Any, P: PadeParams, b: Bases) -> Any:
    total = b.ctx.mpc(0)
    for i, coeff in enumerate(ip.u):
        total += coeff * phi(i, x, P, b)
    return total


def eval_V(ip: InterpolantPair, x: Any, P: PadeParams, b: Bases) -> Any:
    total = b.ctx.mpc(0)
    for i, coeff in enumerate(ip.v):
        total += coeff * chi(i, x, P, b)
    return total


def interpolation_residuals(ip: InterpolantPair, P: PadeParams, b: Bases) -> List[Any]:
    """|V - Y_s U| / (|V| + |Y_s U|) at every grid point."""
    out = []
    for s in range(P.N + 1):
        x = b.q ** (-s)
        V = eval_V(ip, x, P, b)
        YU = y_value(s, P, b) * eval_U(ip, x, P, b)
        scale = abs(V) + abs(YU)
        out.append(abs(V - YU) / scale if scale else abs(V - YU))
    return out
