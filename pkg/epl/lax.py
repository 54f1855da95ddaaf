"""
Casorati determinants of the solution pair y = (V, Y U) and the linear
relations L1, L2, L3, L1' they satisfy.

Everything is evaluated in reduced form, divided by Y(x), so the elliptic
Gamma function is only needed by :func:`casorati` itself.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, List, Sequence

import numpy as np

from .checks import relative_residual, term_normalized
from .errors import DomainError, NumericalFailure
from .pade import PadeParams, eval_U, eval_V, helper_N, y_func
from .painleve import (
    F_f,
    G_g,
    PadeSolution,
    SurfaceParams,
    alpha_weight,
    anchor_from_g,
    beta_weight,
    shift_surface,
    surface_from_pade,
)
from .special_functions import Bases, theta, theta_multi
from .utils import SAMPLE_ANNULUS
from .utils import sample_points as _sample_annulus

logger = logging.getLogger(__name__)

DENOMINATOR_FLOOR = 1e-6
FIT_POINTS = 2
RESIDUAL_POINTS = 8

LAX_RELATIONS = ("L1", "L2", "L3", "L1p")
Y_KINDS = ("V", "YU")


@dataclass(frozen=True)
class LaxData:
    """Interpolants and geometry at P and at T(P)."""

    P: PadeParams
    S: SurfaceParams
    ip: Any
    Pbar: PadeParams
    Sbar: SurfaceParams
    ipbar: Any

    @classmethod
    def from_solution(cls, solution: PadeSolution, c: Sequence[Any], b: Bases) -> "LaxData":
        S = surface_from_pade(solution.params, c, b)
        return cls(P=solution.params, S=S, ip=solution.ip, Pbar=solution.shifted_params,
                   Sbar=shift_surface(S, b), ipbar=solution.ip_shifted)


@dataclass(frozen=True)
class LaxFit:
    f: Any
    g: Any
    fbar: Any
    C0: Any
    C1: Any
    w: Any
    c: Any
    c_prime: Any
    c_bar: Any
    fit_residual: float


# ===========================
# HELPERS
# ===========================

def helper_G(x: Any, P: PadeParams, b: Bases) -> Any:
    """G(x) = Y(qx)/Y(x) = prod theta(k/(a_i q x)) / theta(a_i/(qx))."""
    x = b.scalar(x)
    q, k = b.q, P.k
    num = theta_multi([k / (a * q * x) for a in P.a], b)
    den = theta_multi([a / (q * x) for a in P.a], b)
    if abs(den) < b.zero_tol:
        raise NumericalFailure("G(x) has a pole", where=x)
    return num / den


def helper_K(x: Any, P: PadeParams, b: Bases) -> Any:
    """K(x) = Ybar(x)/Y(x)."""
    x = b.scalar(x)
    q, k, a1, a2 = b.q, P.k, P.ai(1), P.ai(2)
    num = theta_multi([k / a1, k / a2, a1 / q, k * q / a1], b)
    den = theta_multi([k / (a1 * x), k / (a2 * x), a1 / (q * x), k * q / (a1 * x)], b)
    rest = theta_multi([a / x for a in P.a[2:]], b) / theta_multi(P.a[2:], b)
    if abs(den) < b.zero_tol:
        raise NumericalFailure("K(x) has a pole", where=x)
    return num / den * rest


# ===========================
# CASORATI DETERMINANTS
# ===========================

def casorati(which: int, x: Any, data: LaxData, b: Bases) -> Any:
    """D_which(x) built from y = (V, Y U) directly, Y through elliptic Gamma."""
    x = b.scalar(x)
    q = b.q
    P, Pb = data.P, data.Pbar

    def y(arg):
        return eval_V(data.ip, arg, P, b), y_func(arg, P, b) * eval_U(data.ip, arg, P, b)

    def ybar(arg):
        return eval_V(data.ipbar, arg, Pb, b), y_func(arg, Pb, b) * eval_U(data.ipbar, arg, Pb, b)

    if which == 1:
        first, second = y(x), y(x / q)
    elif which == 2:
        first, second = y(q * x), y(x)
    elif which == 3:
        first, second = ybar(x), y(x)
    elif which == 4:
        first, second = ybar(x), y(x / q)
    else:
        raise DomainError(f"Casorati index must be 1..4, got {which}")
    return first[0] * second[1] - first[1] * second[0]


def casorati_reduced(which: int, x: Any, data: LaxData, b: Bases) -> Any:
    """D_which(x) / Y(x) from U, V, G and K only."""
    x = b.scalar(x)
    q = b.q
    P, Pb = data.P, data.Pbar

    def U(arg):
        return eval_U(data.ip, arg, P, b)

    def V(arg):
        return eval_V(data.ip, arg, P, b)

    def Ub(arg):
        return eval_U(data.ipbar, arg, Pb, b)

    def Vb(arg):
        return eval_V(data.ipbar, arg, Pb, b)

    if which == 1:
        return V(x) * U(x / q) / helper_G(x / q, P, b) - V(x / q) * U(x)
    if which == 2:
        return V(q * x) * U(x) - helper_G(x, P, b) * U(q * x) * V(x)
    if which == 3:
        return Vb(x) * U(x) - helper_K(x, P, b) * Ub(x) * V(x)
    if which == 4:
        return Vb(x) * U(x / q) / helper_G(x / q, P, b) - helper_K(x, P, b) * Ub(x) * V(x / q)
    raise DomainError(f"Casorati index must be 1..4, got {which}")


def _xi_products(x: Any, S: SurfaceParams, b: Bases):
    return (theta_multi([xi / x for xi in S.xi], b),
            theta_multi([S.kappa1 / (x * xi) for xi in S.xi], b))


def closed_form(which: int, x: Any, fit: LaxFit, data: LaxData, b: Bases) -> Any:
    """The closed expression of D_which(x)/Y(x) with the fitted constants."""
    x = b.scalar(x)
    q, P, S = b.q, data.P, data.S
    k, a1 = P.k, P.ai(1)
    if which == 1:
        return fit.c * alpha_weight(x, P, S, b) * F_f(fit.f, x, S, b)
    if which == 2:
        num = helper_N(x, P, b) * theta_multi(
            [k / (q * q * x * x), k / (q * q * x), k / (q * x * a1)], b) * F_f(fit.f, q * x, S, b)
        den = q * x * theta_multi([1 / x, a1 / (q * x)], b) * theta_multi(
            [xi / (q * x) for xi in S.xi], b)
        return fit.c * num / den
    if which == 3:
        return fit.c_prime * beta_weight(x, P, b) * G_g(fit.g, x, S, b)
    if which == 4:
        xi_num, xi_den = _xi_products(x, S, b)
        num = helper_N(x, P, b) * theta_multi([q / x, a1 / x], b) * G_g(fit.g, k * x / a1, S, b)
        den = theta_multi([k / (q * x), k / (q * x), k / (x * a1), k / (x * a1),
                           k * q / (x * a1), a1 / (q * x)], b)
        return fit.c_prime * num / den * xi_num / xi_den
    raise DomainError(f"Casorati index must be 1..4, got {which}")


# ===========================
# SAMPLE POINTS
# ===========================

def _denominators(x: Any, data: LaxData, b: Bases) -> List[Any]:
    q, P, S = b.q, data.P, data.S
    k, a1 = P.k, P.ai(1)
    args = [k / (q * x), k / (x * a1), k * q / (x * a1), a1 / (q * x), q / x, 1 / x, a1 / x,
            k / (x * x), k / (q * x * x), k * q / (x * x), k / (q * q * x * x), k / (q * q * x),
            a1 / (q * q * x), k / x, k * q * q / (x * a1)]
    args += [xi / x for xi in S.xi] + [xi / (q * x) for xi in S.xi]
    args += [k / (x * xi) for xi in S.xi] + [k / (q * x * xi) for xi in S.xi]
    args += [a / (q * x) for a in P.a] + [a / x for a in P.a]
    for c in S.c:
        args += [c / x, c / (q * x), c / (q * q * x)]
    return [theta(arg, b) for arg in args]


def admissible(x: Any, data: LaxData, b: Bases) -> bool:
    x = b.scalar(x)
    try:
        return all(abs(d) >= DENOMINATOR_FLOOR for d in _denominators(x, data, b))
    except DomainError:
        return False


def sample_points(rng: np.random.Generator, count: int,
                  predicate: Callable[[complex], bool]) -> List[complex]:
    """Points on 0.8 <= |x| <= 1.25 accepted by the predicate."""
    return _sample_annulus(rng, count, predicate, SAMPLE_ANNULUS)


# ===========================
# FITS
# ===========================

def _fit_affine(points: Sequence[Any], weight, A, B, target, b: Bases, name: str):
    """Solve target(x) = weight(x) (A(x) X - B(x) Y) at two points for (X, Y)."""
    ctx = b.ctx
    M = ctx.matrix(2, 2)
    rhs = ctx.matrix(2, 1)
    for r, x in enumerate(points[:2]):
        w = weight(x)
        M[r, 0] = w * A(x)
        M[r, 1] = -w * B(x)
        rhs[r] = target(x)
    try:
        sol = ctx.lu_solve(M, rhs)
    except ZeroDivisionError:
        raise NumericalFailure(f"degenerate fit for {name}")
    if sol[1] == 0:
        raise NumericalFailure(f"fitted constant for {name} vanishes")
    return sol[0], sol[1]


def _pair_value(c: Any, kappa: Any, x: Any, b: Bases) -> Any:
    return theta(c / x, b) * theta(kappa / (c * x), b)


def _fit_f_from_d1(data_P: PadeParams, data_S: SurfaceParams, reduced_d1, points, b: Bases, name: str):
    S = data_S
    cf, c = _fit_affine(
        points,
        lambda x: alpha_weight(x, data_P, S, b),
        lambda x: _pair_value(S.c[0], S.kappa1, x, b),
        lambda x: _pair_value(S.c[1], S.kappa1, x, b),
        reduced_d1, b, name,
    )
    return cf / c, c


def l_terms(which: str, kind: str, x: Any, fit: LaxFit, data: LaxData, b: Bases,
            C0: Any = None, C1: Any = None) -> List[Any]:
    """The three (or more) terms of a linear relation, divided by Y(x) for the YU kind."""
    if kind not in Y_KINDS:
        raise DomainError(f"y-kind must be one of {Y_KINDS}, got {kind!r}")
    x = b.scalar(x)
    q, P, S, Pb, Sb = b.q, data.P, data.S, data.Pbar, data.Sbar
    k, a1 = P.k, P.ai(1)
    C0 = fit.C0 if C0 is None else C0
    C1 = fit.C1 if C1 is None else C1
    f, g, fbar, w = fit.f, fit.g, fit.fbar, C0 * C1

    if kind == "V":
        def y(arg):
            return eval_V(data.ip, arg, P, b)

        def yb(arg):
            return eval_V(data.ipbar, arg, Pb, b)

        y_x, y_xq, y_qx = y(x), y(x / q), y(q * x)
        yb_x, yb_xq, yb_qx = yb(x), yb(x / q), yb(q * x)
    else:
        def U(arg):
            return eval_U(data.ip, arg, P, b)

        def Ub(arg):
            return eval_U(data.ipbar, arg, Pb, b)

        G_x, G_xq = helper_G(x, P, b), helper_G(x / q, P, b)
        y_x, y_xq, y_qx = U(x), U(x / q) / G_xq, G_x * U(q * x)
        yb_x = helper_K(x, P, b) * Ub(x)
        yb_qx = G_x * helper_K(q * x, P, b) * Ub(q * x)
        yb_xq = helper_K(x / q, P, b) * Ub(x / q) / G_xq

    xi_x = theta_multi([xi / x for xi in S.xi], b)
    kxi_x = theta_multi([k / (x * xi) for xi in S.xi], b)

    if which == "L2":
        return [
            G_g(g, k * x / a1, S, b) * xi_x / theta_multi([k / (a1 * x), k / (q * x)], b) * y_x,
            -G_g(g, x, S, b) * kxi_x / theta_multi([a1 / x, q / x], b) * y_xq,
            -C0 * F_f(f, x, S, b) * theta_multi([k / (x * x), a1 / (q * x), k * q / (a1 * x)], b) / x * yb_x,
        ]
    if which == "L3":
        return [
            G_g(g, k * q * x / a1, S, b) * theta_multi([k / (q * x), k * q / (a1 * x)], b) * yb_x,
            -G_g(g, x, S, b) * theta_multi([1 / x, a1 / (q * q * x)], b) * yb_qx,
            -C1 * F_f(fbar, q * x, Sb, b) * theta(k / (q * x * x), b)
            / (x * theta_multi([k / (a1 * x), a1 / (q * x)], b)) * y_x,
        ]
    if which == "L1":
        Fx, Fqx = F_f(f, x, S, b), F_f(f, q * x, S, b)
        Gx, Gqx = G_g(g, x, S, b), G_g(g, q * x, S, b)
        Gkx, Gkqx = G_g(g, k * x / a1, S, b), G_g(g, k * q * x / a1, S, b)
        xi_qx = theta_multi([xi / (q * x) for xi in S.xi], b)
        kxi_qx = theta_multi([k / (q * x * xi) for xi in S.xi], b)
        return [
            theta_multi([k / (a1 * x), k / (q * x)], b) * kxi_x
            / (Fx * theta_multi([k / (x * x), a1 / x, q / x], b)) * y_xq,
            q * theta_multi([1 / x, a1 / (q * x)], b) * xi_qx
            / (Fqx * theta_multi([k / (q * q * x * x), k / (q * q * x), k / (a1 * q * x)], b)) * y_qx,
            w * F_f(fbar, q * x, Sb, b) * theta(k / (q * x * x), b) / (x * x * Gx * Gkqx) * y_x,
            -q * Gqx * kxi_qx / (Fqx * Gkqx * theta(k / (q * q * x * x), b)) * y_x,
            -Gkx * xi_x / (Fx * Gx * theta(k / (x * x), b)) * y_x,
        ]
    if which == "L1p":
        Fb_x, Fb_qx = F_f(fbar, x, Sb, b), F_f(fbar, q * x, Sb, b)
        Gx, Gxq = G_g(g, x, S, b), G_g(g, x / q, S, b)
        Gkx, Gkqx = G_g(g, k * x / a1, S, b), G_g(g, k * q * x / a1, S, b)
        return [
            theta_multi([1 / x, a1 / (q * q * x)], b) * xi_x
            / (theta_multi([k / (q * x * x), k / (q * x), k * q / (x * a1)], b) * Fb_qx) * yb_qx,
            theta_multi([k / x, k * q * q / (x * a1)], b) * kxi_x
            / (q * theta_multi([k * q / (x * x), q / x, a1 / (q * x)], b) * Fb_x) * yb_xq,
            w * theta(k / (x * x), b) * F_f(f, x, S, b) / (x * x * Gx * Gkx) * yb_x,
            -Gxq * kxi_x / (q * theta(k * q / (x * x), b) * Fb_x * Gkx) * yb_x,
            -Gkqx * xi_x / (theta(k / (q * x * x), b) * Fb_qx * Gx) * yb_x,
        ]
    raise DomainError(f"relation must be one of {LAX_RELATIONS}, got {which!r}")


def l_residual(which: str, kind: str, x: Any, fit: LaxFit, data: LaxData, b: Bases) -> float:
    """Relative residual of a linear relation, normalized by its largest term."""
    return term_normalized(l_terms(which, kind, x, fit, data, b))


def fit_lax(data: LaxData, b: Bases, rng: np.random.Generator,
            residual_points: int = RESIDUAL_POINTS) -> LaxFit:
    """Fit (c, f), (c', g), fbar, C0 and C1, then measure the closed forms at fresh points."""
    if data.P.n < 1:
        raise DomainError("the Lax fit needs n >= 1")

    def accept(z):
        return admissible(z, data, b)

    points = [b.scalar(z) for z in sample_points(rng, FIT_POINTS + 2 + residual_points, accept)]
    fit_pts, l_pts, fresh = points[:FIT_POINTS], points[FIT_POINTS:FIT_POINTS + 2], points[FIT_POINTS + 2:]
    P, S = data.P, data.S

    f, c = _fit_f_from_d1(P, S, lambda x: casorati_reduced(1, x, data, b), fit_pts, b, "(c, f)")
    c_prime_g, c_prime = _fit_affine(
        fit_pts,
        lambda x: beta_weight(x, P, b),
        lambda x: _pair_value(S.c[2], S.kappa2, x, b),
        lambda x: _pair_value(S.c[3], S.kappa2, x, b),
        lambda x: casorati_reduced(3, x, data, b),
        b, "(c', g)",
    )
    g = c_prime_g / c_prime

    # fbar from D1 of the shifted problem
    shifted = LaxData(P=data.Pbar, S=data.Sbar, ip=data.ipbar, Pbar=data.Pbar, Sbar=data.Sbar,
                      ipbar=data.ipbar)
    fbar, c_bar = _fit_f_from_d1(data.Pbar, data.Sbar,
                                 lambda x: casorati_reduced(1, x, shifted, b), fit_pts, b, "(cbar, fbar)")

    partial = LaxFit(f=f, g=g, fbar=fbar, C0=1, C1=1, w=1, c=c, c_prime=c_prime, c_bar=c_bar,
                     fit_residual=0.0)
    x0, x1 = l_pts
    t = l_terms("L2", "V", x0, partial, data, b, C0=1)
    if t[2] == 0:
        raise NumericalFailure("degenerate fit for C0")
    C0 = -(t[0] + t[1]) / t[2]
    t = l_terms("L3", "V", x1, partial, data, b, C1=1)
    if t[2] == 0:
        raise NumericalFailure("degenerate fit for C1")
    C1 = -(t[0] + t[1]) / t[2]

    fit = LaxFit(f=f, g=g, fbar=fbar, C0=C0, C1=C1, w=C0 * C1, c=c, c_prime=c_prime,
                 c_bar=c_bar, fit_residual=0.0)
    worst = 0.0
    for x in fresh:
        for which in (1, 2, 3, 4):
            worst = max(worst, relative_residual(casorati_reduced(which, x, data, b),
                                                 closed_form(which, x, fit, data, b)))
    logger.debug("Lax fit: worst closed-form residual %.3e over %d points", worst, len(fresh))
    return LaxFit(f=f, g=g, fbar=fbar, C0=C0, C1=C1, w=C0 * C1, c=c, c_prime=c_prime,
                  c_bar=c_bar, fit_residual=worst)


def d3_d4_reflection_residual(x: Any, data: LaxData, b: Bases) -> float:
    """D3(k/(qx))/Y(k/(qx)) against G(x) D4(qx)/Y(qx)."""
    x = b.scalar(x)
    q, k = b.q, data.P.k
    lhs = casorati_reduced(3, k / (q * x), data, b)
    rhs = helper_G(x, data.P, b) * casorati_reduced(4, q * x, data, b)
    return relative_residual(lhs, rhs)


def c0c1_residual(fit: LaxFit, data: LaxData, b: Bases) -> float:
    """G(kx/a1) G(kqx/a1) prod theta(xi/x) = (w/x^2) F(x) Fbar(qx) theta(k/x^2, k/(qx^2)) at g = g_*(x)."""
    S, Sb = data.S, data.Sbar
    x = anchor_from_g(fit.g, S, b).x
    q, k, a1 = b.q, data.P.k, data.P.ai(1)
    lhs = G_g(fit.g, k * x / a1, S, b) * G_g(fit.g, k * q * x / a1, S, b) * theta_multi(
        [xi / x for xi in S.xi], b)
    rhs = fit.w / (x * x) * F_f(fit.f, x, S, b) * F_f(fit.fbar, q * x, Sb, b) * theta_multi(
        [k / (x * x), k / (q * x * x)], b)
    return relative_residual(lhs, rhs)
