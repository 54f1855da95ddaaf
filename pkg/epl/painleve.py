"""
Geometry of the elliptic Painleve equation attached to the interpolation
problem: the curve parametrization (f_*, g_*), extraction of (f, g) from a
solved problem and the evolution along T.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Sequence, Tuple

from .errors import DomainError, EplError, NumericalFailure
from .pade import (
    InterpolantPair,
    PadeParams,
    eval_U,
    eval_V,
    helper_N,
    shift_T,
    solve_interpolation,
)
from .special_functions import Bases, theta, theta_multi, theta_with_derivative

logger = logging.getLogger(__name__)

CONSTRAINT_TOL = 1e-10
NEWTON_STARTS = 12
NEWTON_MAXSTEPS = 50
NEWTON_TOL = 1e-12
ANCHOR_TOL = 1e-10

EXTRACTION_PAIRS = ((3, 4), (3, 5), (3, 6), (4, 5), (4, 6), (5, 6))


@dataclass(frozen=True)
class SurfaceParams:
    kappa1: Any
    kappa2: Any
    xi: Tuple[Any, ...]
    c: Tuple[Any, ...]

    def validate(self, b: Bases, tol: float = CONSTRAINT_TOL) -> None:
        if len(self.xi) != 8 or len(self.c) != 4:
            raise DomainError("surface parameters need 8 points xi and 4 gauge constants c")
        if any(v == 0 for v in (self.kappa1, self.kappa2) + self.xi + self.c):
            raise DomainError("surface parameters must be nonzero")
        lhs = self.kappa1 ** 2 * self.kappa2 ** 2
        rhs = b.q
        for x in self.xi:
            rhs *= x
        if abs(lhs - rhs) > tol * abs(lhs):
            raise DomainError("constraint kappa1^2 kappa2^2 = q xi_1...xi_8 violated")


@dataclass(frozen=True)
class SurfacePoint:
    f: Any
    g: Any


@dataclass(frozen=True)
class CurveAnchor:
    """x certifying g = g_*(x) (role "g") or fbar = fbar_*(qx) (role "fbar")."""

    x: Any
    role: str
    residual: float


def surface_from_pade(P: PadeParams, c: Sequence[Any], b: Bases) -> SurfaceParams:
    """(kappa1, kappa2) = (k, k^2/a_1); xi = (k/q, k q^N, k/(a_1 q^m), a_2/q^n, a_3..a_6)."""
    if len(c) != 4:
        raise DomainError(f"expected 4 gauge constants, got {len(c)}")
    q, k, a = b.q, P.k, P.a
    S = SurfaceParams(
        kappa1=k,
        kappa2=k ** 2 / a[0],
        xi=(k / q, k * q ** P.N, k / (a[0] * q ** P.m), a[1] / q ** P.n) + tuple(a[2:]),
        c=tuple(b.scalar(x) for x in c),
    )
    S.validate(b)
    return S


def shift_surface(S: SurfaceParams, b: Bases) -> SurfaceParams:
    """T(S) = (q kappa1, q^3 kappa2, q xi); gauge constants unchanged."""
    q = b.q
    return SurfaceParams(kappa1=q * S.kappa1, kappa2=q ** 3 * S.kappa2,
                         xi=tuple(q * x for x in S.xi), c=S.c)


# ===========================
# CURVE
# ===========================

def _pair(c: Any, kappa: Any, x: Any, b: Bases) -> Any:
    return theta(c / x, b) * theta(kappa / (c * x), b)


def _pair_derivative(c: Any, kappa: Any, x: Any, b: Bases) -> Any:
    t1, d1 = theta_with_derivative(c / x, b)
    t2, d2 = theta_with_derivative(kappa / (c * x), b)
    return d1 * (-c / x ** 2) * t2 + t1 * d2 * (-kappa / (c * x ** 2))


def f_star(x: Any, S: SurfaceParams, b: Bases) -> Any:
    x = b.scalar(x)
    den = _pair(S.c[0], S.kappa1, x, b)
    if abs(den) < b.zero_tol:
        raise DomainError("f_* has a pole at this x", where=x)
    return _pair(S.c[1], S.kappa1, x, b) / den


def g_star(x: Any, S: SurfaceParams, b: Bases) -> Any:
    x = b.scalar(x)
    den = _pair(S.c[2], S.kappa2, x, b)
    if abs(den) < b.zero_tol:
        raise DomainError("g_* has a pole at this x", where=x)
    return _pair(S.c[3], S.kappa2, x, b) / den


def F_f(f: Any, x: Any, S: SurfaceParams, b: Bases) -> Any:
    x = b.scalar(x)
    return _pair(S.c[0], S.kappa1, x, b) * f - _pair(S.c[1], S.kappa1, x, b)


def G_g(g: Any, x: Any, S: SurfaceParams, b: Bases) -> Any:
    x = b.scalar(x)
    return _pair(S.c[2], S.kappa2, x, b) * g - _pair(S.c[3], S.kappa2, x, b)


def F_f_dx(f: Any, x: Any, S: SurfaceParams, b: Bases) -> Any:
    return _pair_derivative(S.c[0], S.kappa1, x, b) * f - _pair_derivative(S.c[1], S.kappa1, x, b)


def G_g_dx(g: Any, x: Any, S: SurfaceParams, b: Bases) -> Any:
    return _pair_derivative(S.c[2], S.kappa2, x, b) * g - _pair_derivative(S.c[3], S.kappa2, x, b)


# ===========================
# EXTRACTION
# ===========================

@dataclass(frozen=True)
class PadeSolution:
    """The interpolants at P and at T(P)."""

    params: PadeParams
    ip: InterpolantPair
    shifted_params: PadeParams
    ip_shifted: InterpolantPair


@lru_cache(maxsize=32)
def solve_pade_pair(P: PadeParams, b: Bases) -> PadeSolution:
    ip = solve_interpolation(P, b)
    P_shifted = shift_T(P, b)
    return PadeSolution(params=P, ip=ip, shifted_params=P_shifted,
                        ip_shifted=solve_interpolation(P_shifted, b))


def alpha_weight(x: Any, P: PadeParams, S: SurfaceParams, b: Bases) -> Any:
    x = b.scalar(x)
    q, k, a1 = b.q, P.k, P.ai(1)
    num = helper_N(x, P, b) * theta_multi([k / x ** 2, q / x, a1 / x], b)
    den = x * theta_multi([k / (q * x), k / (x * a1)], b) * theta_multi(
        [k / (x * xi) for xi in S.xi], b)
    return num / den


def beta_weight(x: Any, P: PadeParams, b: Bases) -> Any:
    x = b.scalar(x)
    q, k, a1 = b.q, P.k, P.ai(1)
    return helper_N(x, P, b) / theta_multi(
        [k / (q * x), k / (x * a1), k * q / (x * a1), a1 / (q * x)], b)


def _solve_ratio(wi: Any, wj: Any, Ai: Any, Bi: Any, Aj: Any, Bj: Any,
                 Wi: Any, Wj: Any, b: Bases, name: str) -> Any:
    # w_i (A_i v - B_i) W_j = w_j (A_j v - B_j) W_i, linear in v
    coef = wi * Ai * Wj - wj * Aj * Wi
    rhs = wi * Bi * Wj - wj * Bj * Wi
    scale = abs(wi * Ai * Wj) + abs(wj * Aj * Wi)
    if scale == 0 or abs(coef) < 1e-12 * scale:
        raise NumericalFailure(f"degenerate extraction equation for {name}: non-generic draw")
    return rhs / coef


def extract_fg(
    solution: PadeSolution,
    S: SurfaceParams,
    b: Bases,
    pair: Tuple[int, int] = (3, 4),
) -> SurfacePoint:
    """(f, g) from U(a), V(a/q) and Vbar(a) at two of the parameters a_3..a_6."""
    i, j = pair
    if i == j or not {i, j} <= {3, 4, 5, 6}:
        raise DomainError(f"extraction pair must be two distinct indices in 3..6, got {pair}")
    P, ip, Pbar, ipbar = solution.params, solution.ip, solution.shifted_params, solution.ip_shifted
    q = b.q
    ai, aj = P.ai(i), P.ai(j)

    Ui, Uj = eval_U(ip, ai, P, b), eval_U(ip, aj, P, b)
    f = _solve_ratio(
        alpha_weight(ai, P, S, b), alpha_weight(aj, P, S, b),
        _pair(S.c[0], S.kappa1, ai, b), _pair(S.c[1], S.kappa1, ai, b),
        _pair(S.c[0], S.kappa1, aj, b), _pair(S.c[1], S.kappa1, aj, b),
        Ui * eval_V(ip, ai / q, P, b), Uj * eval_V(ip, aj / q, P, b),
        b, "f",
    )
    g = _solve_ratio(
        beta_weight(ai, P, b), beta_weight(aj, P, b),
        _pair(S.c[2], S.kappa2, ai, b), _pair(S.c[3], S.kappa2, ai, b),
        _pair(S.c[2], S.kappa2, aj, b), _pair(S.c[3], S.kappa2, aj, b),
        Ui * eval_V(ipbar, ai, Pbar, b), Uj * eval_V(ipbar, aj, Pbar, b),
        b, "g",
    )
    return SurfacePoint(f=f, g=g)


def extract_fg_pairs(solution: PadeSolution, S: SurfaceParams, b: Bases) -> Dict[Tuple[int, int], SurfacePoint]:
    return {pair: extract_fg(solution, S, b, pair) for pair in EXTRACTION_PAIRS}


def point_from_pade(P: PadeParams, c: Sequence[Any], b: Bases,
                    pair: Tuple[int, int] = (3, 4)) -> Tuple[SurfacePoint, SurfaceParams]:
    S = surface_from_pade(P, c, b)
    return extract_fg(solve_pade_pair(P, b), S, b, pair), S


# ===========================
# ANCHORS
# ===========================

def _newton_anchor(func, dfunc, star, value: Any, kappa: Any, b: Bases, role: str,
                   tol: float) -> Any:
    ctx = b.ctx
    radius_root = ctx.sqrt(kappa)
    best = None
    for j in range(NEWTON_STARTS):
        x0 = radius_root * ctx.expjpi(ctx.mpf(2 * j) / NEWTON_STARTS)
        try:
            x = ctx.findroot(func, x0, solver="newton", df=dfunc, tol=NEWTON_TOL,
                             maxsteps=NEWTON_MAXSTEPS, verify=False)
            x = ctx.mpc(x)
            residual = abs(star(x) - value) / (1 + abs(value))
        except (ZeroDivisionError, ValueError, EplError):
            continue
        if residual <= tol:
            logger.debug("%s anchor converged from start %d, residual %s", role, j,
                         ctx.nstr(residual, 3))
            return CurveAnchor(x=x, role=role, residual=float(residual))
        if best is None or residual < best:
            best = residual
    raise NumericalFailure(
        f"no Newton start found x with {role} = {role}_*(x) "
        f"(best residual {float(best) if best is not None else float('nan'):.3e})"
    )


def anchor_from_g(g: Any, S: SurfaceParams, b: Bases, tol: float = ANCHOR_TOL) -> CurveAnchor:
    """x with g_*(x) = g; Newton on G_g(g, x) = 0 from starts on |x| = |kappa2|^(1/2)."""
    g = b.scalar(g)
    return _newton_anchor(
        lambda x: G_g(g, x, S, b),
        lambda x: G_g_dx(g, x, S, b),
        lambda x: g_star(x, S, b),
        g, S.kappa2, b, "g", tol,
    )


def anchor_from_fbar(fbar: Any, S_shifted: SurfaceParams, b: Bases,
                     tol: float = ANCHOR_TOL) -> CurveAnchor:
    """x with fbar_*(qx) = fbar; the root y = qx is found on |y| = |kappa1bar|^(1/2)."""
    fbar = b.scalar(fbar)
    anchor = _newton_anchor(
        lambda y: F_f(fbar, y, S_shifted, b),
        lambda y: F_f_dx(fbar, y, S_shifted, b),
        lambda y: f_star(y, S_shifted, b),
        fbar, S_shifted.kappa1, b, "fbar", tol,
    )
    return CurveAnchor(x=anchor.x / b.q, role="fbar", residual=anchor.residual)


# ===========================
# EVOLUTION
# ===========================

def _solve_affine(left: Any, right: Any, A1: Any, B1: Any, A2: Any, B2: Any, name: str) -> Any:
    # left (A1 v - B1) = right (A2 v - B2)
    coef = left * A1 - right * A2
    scale = abs(left * A1) + abs(right * A2)
    if scale == 0 or abs(coef) < 1e-12 * scale:
        raise NumericalFailure(f"vanishing linear coefficient while solving for {name}")
    return (left * B1 - right * B2) / coef


def step_f(f: Any, anchor: CurveAnchor, S: SurfaceParams, b: Bases) -> Any:
    """fbar from F(x) Fbar(qx) prod theta(kappa2/(x xi)) = F(y) Fbar(y) prod theta(xi/x), y = kappa1 x/kappa2.

    For f = f_*(x) the left side vanishes, so Fbar_fbar(a_1 x/k) = 0 (y = a_1 x/k).
    Either root of g = g_*(x) (x or kappa2/x) gives the same fbar.
    """
    if anchor.role != "g":
        raise DomainError("step_f needs an anchor certifying g = g_*(x)")
    q, x = b.q, anchor.x
    Sb = shift_surface(S, b)
    y = S.kappa1 * x / S.kappa2
    left = F_f(f, x, S, b) * theta_multi([S.kappa2 / (x * xi) for xi in S.xi], b)
    right = F_f(f, y, S, b) * theta_multi([xi / x for xi in S.xi], b)
    A1, B1 = _pair(Sb.c[0], Sb.kappa1, q * x, b), _pair(Sb.c[1], Sb.kappa1, q * x, b)
    A2, B2 = _pair(Sb.c[0], Sb.kappa1, y, b), _pair(Sb.c[1], Sb.kappa1, y, b)
    return _solve_affine(left, right, A1, B1, A2, B2, "fbar")


def step_g(g: Any, anchor: CurveAnchor, S: SurfaceParams, b: Bases) -> Any:
    """gbar from G(x) Gbar(qx) prod theta(kappa1/(q x xi)) = G(z) Gbar(q^2 z) prod theta(xi/x), z = q kappa2 x/kappa1."""
    if anchor.role != "fbar":
        raise DomainError("step_g needs an anchor certifying fbar = fbar_*(qx)")
    q, x = b.q, anchor.x
    Sb = shift_surface(S, b)
    z = q * S.kappa2 * x / S.kappa1
    left = G_g(g, x, S, b) * theta_multi([S.kappa1 / (q * x * xi) for xi in S.xi], b)
    right = G_g(g, z, S, b) * theta_multi([xi / x for xi in S.xi], b)
    A1, B1 = _pair(Sb.c[2], Sb.kappa2, q * x, b), _pair(Sb.c[3], Sb.kappa2, q * x, b)
    A2, B2 = _pair(Sb.c[2], Sb.kappa2, q * q * z, b), _pair(Sb.c[3], Sb.kappa2, q * q * z, b)
    return _solve_affine(left, right, A1, B1, A2, B2, "gbar")


def fev_residual(f: Any, fbar: Any, x: Any, S: SurfaceParams, b: Bases) -> Any:
    """Relative back-substitution residual of the f-evolution at anchored x."""
    x = b.scalar(x)
    Sb = shift_surface(S, b)
    y = S.kappa1 * x / S.kappa2
    lhs = F_f(f, x, S, b) * F_f(fbar, b.q * x, Sb, b) * theta_multi(
        [S.kappa2 / (x * xi) for xi in S.xi], b)
    rhs = F_f(f, y, S, b) * F_f(fbar, y, Sb, b) * theta_multi([xi / x for xi in S.xi], b)
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale if scale else abs(lhs - rhs)


def gev_residual(g: Any, gbar: Any, x: Any, S: SurfaceParams, b: Bases) -> Any:
    """Relative back-substitution residual of the g-evolution at anchored x."""
    x = b.scalar(x)
    q = b.q
    Sb = shift_surface(S, b)
    z = q * S.kappa2 * x / S.kappa1
    lhs = G_g(g, x, S, b) * G_g(gbar, q * x, Sb, b) * theta_multi(
        [S.kappa1 / (q * x * xi) for xi in S.xi], b)
    rhs = G_g(g, z, S, b) * G_g(gbar, q * q * z, Sb, b) * theta_multi([xi / x for xi in S.xi], b)
    scale = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / scale if scale else abs(lhs - rhs)


@dataclass(frozen=True)
class StepTrace:
    point: SurfacePoint
    params: SurfaceParams
    g_anchor: CurveAnchor
    fbar_anchor: CurveAnchor


def step_traced(point: SurfacePoint, S: SurfaceParams, b: Bases) -> StepTrace:
    g_anchor = anchor_from_g(point.g, S, b)
    fbar = step_f(point.f, g_anchor, S, b)
    Sb = shift_surface(S, b)
    fbar_anchor = anchor_from_fbar(fbar, Sb, b)
    gbar = step_g(point.g, fbar_anchor, S, b)
    return StepTrace(point=SurfacePoint(f=fbar, g=gbar), params=Sb,
                     g_anchor=g_anchor, fbar_anchor=fbar_anchor)


def step(point: SurfacePoint, S: SurfaceParams, b: Bases) -> Tuple[SurfacePoint, SurfaceParams]:
    trace = step_traced(point, S, b)
    return trace.point, trace.params
