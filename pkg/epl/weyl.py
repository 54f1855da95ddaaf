"""
Multiplicative action of the affine Weyl group of type E8 on
(h1, h2, u1..u8) and its birational extension to the point (f, g).

Words act left to right: ``act_word(["c", "mu12"], state)`` applies c first.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from .checks import relative_residual
from .errors import DomainError, NumericalFailure
from .painleve import SurfaceParams, SurfacePoint, f_star, g_star, shift_surface
from .special_functions import Bases, theta
from .utils import PARAM_MODULUS_RANGE, draw_complex

logger = logging.getLogger(__name__)

INDETERMINACY_TOL = 1e-12

WORD_R = ("s12", "mu12", "s34", "mu34", "s56", "mu56", "s78", "mu78")
WORD_T = WORD_R + ("c",) + WORD_R + ("c",)

SIMPLE_REFLECTIONS = ("c", "mu12", "s23", "s34", "s45", "s56", "s67", "s78", "s12")
DIAGRAM_EDGES = frozenset(
    frozenset(edge) for edge in (
        ("c", "mu12"), ("mu12", "s23"), ("s23", "s34"), ("s34", "s45"), ("s45", "s56"),
        ("s56", "s67"), ("s67", "s78"), ("s12", "s23"),
    )
)

_GENERATOR = re.compile(r"^(s|mu|nu)([1-8])([1-8])$")


@dataclass(frozen=True)
class WeylParams:
    h1: Any
    h2: Any
    u: Tuple[Any, ...]
    d1: Any
    d2: Any

    @property
    def q(self) -> Any:
        prod = 1
        for x in self.u:
            prod = prod * x
        return self.h1 ** 2 * self.h2 ** 2 / prod

    @property
    def v(self) -> Any:
        return self.q * self.h2 / self.h1

    def values(self) -> List[Any]:
        return [self.h1, self.h2, *self.u, self.d1, self.d2]


@dataclass(frozen=True)
class WeylState:
    params: WeylParams
    point: SurfacePoint


def parse_generator(gen: str) -> Tuple[str, int, int]:
    if gen == "c":
        return "c", 0, 0
    match = _GENERATOR.match(gen)
    if not match or match.group(2) == match.group(3):
        raise DomainError(f"unknown generator {gen!r}: expected c, s_ij, mu_ij or nu_ij with 1 <= i != j <= 8")
    return match.group(1), int(match.group(2)), int(match.group(3))


def act_param(gen: str, W: WeylParams) -> WeylParams:
    kind, i, j = parse_generator(gen)
    if kind == "c":
        return replace(W, h1=W.h2, h2=W.h1)
    u = list(W.u)
    ui, uj = u[i - 1], u[j - 1]
    if kind == "s":
        u[i - 1], u[j - 1] = uj, ui
        return replace(W, u=tuple(u))
    if kind == "mu":
        u[i - 1], u[j - 1] = W.h2 / uj, W.h2 / ui
        return replace(W, h1=W.h1 * W.h2 / (ui * uj), u=tuple(u))
    u[i - 1], u[j - 1] = W.h1 / uj, W.h1 / ui
    return replace(W, h2=W.h1 * W.h2 / (ui * uj), u=tuple(u))


# ===========================
# CURVE IN THE WEYL CHART
# ===========================

def _pair(d: Any, h: Any, z: Any, b: Bases) -> Any:
    return theta(d / z, b) * theta(h / (d * z), b)


def f_star_w(z: Any, W: WeylParams, b: Bases) -> Any:
    z = b.scalar(z)
    den = _pair(W.d1, W.h1, z, b)
    if abs(den) < b.zero_tol:
        raise DomainError("f_star has a pole at this z", where=z)
    return _pair(W.d2, W.h1, z, b) / den


def g_star_w(z: Any, W: WeylParams, b: Bases) -> Any:
    z = b.scalar(z)
    den = _pair(W.d1, W.h2, z, b)
    if abs(den) < b.zero_tol:
        raise DomainError("g_star has a pole at this z", where=z)
    return _pair(W.d2, W.h2, z, b) / den


def F_w(f: Any, z: Any, W: WeylParams, b: Bases) -> Any:
    z = b.scalar(z)
    return _pair(W.d1, W.h1, z, b) * f - _pair(W.d2, W.h1, z, b)


def G_w(g: Any, z: Any, W: WeylParams, b: Bases) -> Any:
    z = b.scalar(z)
    return _pair(W.d1, W.h2, z, b) * g - _pair(W.d2, W.h2, z, b)


# ===========================
# ACTION ON POINTS
# ===========================

def _cross_ratio_solve(x: Any, y: Any, xi: Any, yi: Any, xj: Any, yj: Any,
                       A: Any, B: Any, b: Bases) -> Any:
    """new solving (new - A)/(new - B) = (x - xi)(y - yj) / ((x - xj)(y - yi))."""
    num = (x - xi) * (y - yj)
    den = (x - xj) * (y - yi)
    scale = 1 + abs(x) + abs(y)
    if (abs(x - xi) + abs(y - yi) < INDETERMINACY_TOL * scale
            or abs(x - xj) + abs(y - yj) < INDETERMINACY_TOL * scale):
        raise DomainError("point sits on an indeterminacy point of the reflection")
    if abs(den - num) < b.zero_tol * (abs(den) + abs(num)):
        raise NumericalFailure("degenerate cross-ratio in the reflection")
    return (A * den - B * num) / (den - num)


def act_point(gen: str, state: WeylState, b: Bases) -> WeylState:
    kind, i, j = parse_generator(gen)
    W = state.params
    Wn = act_param(gen, W)
    f, g = state.point.f, state.point.g
    if kind == "c":
        return WeylState(params=Wn, point=SurfacePoint(f=g, g=f))
    if kind == "s":
        return WeylState(params=Wn, point=state.point)
    ui, uj = W.u[i - 1], W.u[j - 1]
    fi, gi = f_star_w(ui, W, b), g_star_w(ui, W, b)
    fj, gj = f_star_w(uj, W, b), g_star_w(uj, W, b)
    if kind == "mu":
        A, B = f_star_w(Wn.u[i - 1], Wn, b), f_star_w(Wn.u[j - 1], Wn, b)
        f_new = _cross_ratio_solve(f, g, fi, gi, fj, gj, A, B, b)
        return WeylState(params=Wn, point=SurfacePoint(f=f_new, g=g))
    A, B = g_star_w(Wn.u[i - 1], Wn, b), g_star_w(Wn.u[j - 1], Wn, b)
    g_new = _cross_ratio_solve(g, f, gi, fi, gj, fj, A, B, b)
    return WeylState(params=Wn, point=SurfacePoint(f=f, g=g_new))


def act_word(word: Sequence[str], state: WeylState, b: Bases) -> WeylState:
    for gen in word:
        state = act_point(gen, state, b)
    return state


def act_word_params(word: Sequence[str], W: WeylParams) -> WeylParams:
    for gen in word:
        W = act_param(gen, W)
    return W


# ===========================
# GENERATOR RELATIONS
# ===========================

def _param_deviation(W1: WeylParams, W2: WeylParams) -> float:
    return max(relative_residual(x, y) for x, y in zip(W1.values(), W2.values()))


def _point_deviation(p1: SurfacePoint, p2: SurfacePoint) -> float:
    return max(relative_residual(p1.f, p2.f), relative_residual(p1.g, p2.g))


def _compare_words(w1: Sequence[str], w2: Sequence[str], state: WeylState, b: Bases) -> Tuple[float, float]:
    s1 = act_word(w1, state, b)
    s2 = act_word(w2, state, b)
    return _param_deviation(s1.params, s2.params), _point_deviation(s1.point, s2.point)


def coxeter_check(W: WeylParams, point: SurfacePoint, b: Bases) -> Dict[str, Any]:
    """Involutions, braid and commutation relations of the simple reflections."""
    state = WeylState(params=W, point=point)
    checks = []
    for gen in SIMPLE_REFLECTIONS:
        dp, dq = _compare_words([gen, gen], [], state, b)
        checks.append({"relation": f"{gen}^2", "params": dp, "point": dq})
    gens = list(SIMPLE_REFLECTIONS)
    for a_index, s in enumerate(gens):
        for t in gens[a_index + 1:]:
            if frozenset((s, t)) in DIAGRAM_EDGES:
                dp, dq = _compare_words([s, t, s], [t, s, t], state, b)
                relation = f"{s} {t} {s} = {t} {s} {t}"
            else:
                dp, dq = _compare_words([s, t], [t, s], state, b)
                relation = f"{s} {t} = {t} {s}"
            checks.append({"relation": relation, "params": dp, "point": dq})
    return {
        "checks": checks,
        "params": max(c["params"] for c in checks),
        "point": max(c["point"] for c in checks),
    }


def composite_formula_residual(W: WeylParams) -> Dict[str, float]:
    """r and T against their closed parameter formulas."""
    q, v = W.q, W.v
    Wr = act_word_params(WORD_R, W)
    r_dev = max(
        [relative_residual(Wr.h1, v * W.h2), relative_residual(Wr.h2, W.h2)]
        + [relative_residual(x, W.h2 / u) for x, u in zip(Wr.u, W.u)]
    )
    Wt = act_word_params(WORD_T, W)
    t_dev = max(
        [relative_residual(Wt.h1, W.h1 * v ** 2 / q), relative_residual(Wt.h2, q * W.h2 * v ** 2)]
        + [relative_residual(x, u * v) for x, u in zip(Wt.u, W.u)]
        + [relative_residual(Wt.q, q)]
    )
    return {"r": r_dev, "T": t_dev}


def draw_weyl_params(rng: np.random.Generator, b: Bases) -> WeylParams:
    vals = [b.scalar(draw_complex(rng, *PARAM_MODULUS_RANGE)) for _ in range(12)]
    return WeylParams(h1=vals[0], h2=vals[1], u=tuple(vals[2:10]), d1=vals[10], d2=vals[11])


# ===========================
# BRIDGE TO THE SURFACE CHARTS
# ===========================

def embed_surface(S: SurfaceParams, lam: Any, b: Bases) -> WeylParams:
    """(h, u, d) = (kappa lam^2, xi lam, (c1, c2) lam)."""
    lam = b.scalar(lam)
    return WeylParams(h1=S.kappa1 * lam ** 2, h2=S.kappa2 * lam ** 2,
                      u=tuple(x * lam for x in S.xi), d1=S.c[0] * lam, d2=S.c[1] * lam)


def rescale_bridge(W: WeylParams, b: Bases, c34: Sequence[Any] = None) -> Tuple[SurfaceParams, Any]:
    """Surface parameters and lam = (h1^3/h2)^(1/4) (principal branch)."""
    ctx = b.ctx
    lam = ctx.root(W.h1 ** 3 / W.h2, 4)
    c1, c2 = W.d1 / lam, W.d2 / lam
    c3, c4 = (c1, c2) if c34 is None else (b.scalar(c34[0]), b.scalar(c34[1]))
    S = SurfaceParams(kappa1=W.h1 / lam ** 2, kappa2=W.h2 / lam ** 2,
                      xi=tuple(u / lam for u in W.u), c=(c1, c2, c3, c4))
    return S, lam


def chart_mobius(src: Sequence[Any], dst: Sequence[Any], b: Bases) -> Tuple[Any, Any, Any, Any]:
    """(a, b, c, d) with dst = (a src + b)/(c src + d) through three sample pairs."""
    if len(src) < 3 or len(dst) < 3:
        raise DomainError("a fractional-linear chart map needs three sample pairs")
    ctx = b.ctx
    # a s - c s t + b - d t = 0 for each pair, normalized by d = 1
    M = ctx.matrix(3, 3)
    rhs = ctx.matrix(3, 1)
    for r in range(3):
        s, t = src[r], dst[r]
        M[r, 0] = s
        M[r, 1] = 1
        M[r, 2] = -s * t
        rhs[r] = t
    try:
        sol = ctx.lu_solve(M, rhs)
    except ZeroDivisionError:
        raise NumericalFailure("chart samples do not determine a fractional-linear map")
    return sol[0], sol[1], sol[2], ctx.mpc(1)


def apply_mobius(coeffs: Tuple[Any, Any, Any, Any], value: Any) -> Any:
    a, bb, c, d = coeffs
    den = c * value + d
    if den == 0:
        raise NumericalFailure("fractional-linear chart map sends the point to infinity")
    return (a * value + bb) / den


def _chart_samples(b: Bases, count: int = 3) -> List[Any]:
    ctx = b.ctx
    return [ctx.mpc(0.93, 0.21) * ctx.expjpi(ctx.mpf(2 * r + 1) / (2 * count + 1)) for r in range(count)]


def weyl_step(point: SurfacePoint, S: SurfaceParams, b: Bases, lam: Any = 1) -> Tuple[SurfacePoint, SurfaceParams]:
    """T through the group action, returned in the charts of T(S)."""
    lam = b.scalar(lam)
    W = embed_surface(S, lam, b)
    xs = _chart_samples(b)

    # the Weyl g-chart uses (c1, c2); S uses (c3, c4)
    to_weyl_g = chart_mobius([g_star(x, S, b) for x in xs],
                             [g_star_w(lam * x, W, b) for x in xs], b)
    start = WeylState(params=W, point=SurfacePoint(f=point.f, g=apply_mobius(to_weyl_g, point.g)))
    end = act_word(WORD_T, start, b)

    S_shifted = shift_surface(S, b)
    lam_bar = lam * S.kappa2 / S.kappa1
    f_back = chart_mobius([f_star_w(lam_bar * x, end.params, b) for x in xs],
                          [f_star(x, S_shifted, b) for x in xs], b)
    g_back = chart_mobius([g_star_w(lam_bar * x, end.params, b) for x in xs],
                          [g_star(x, S_shifted, b) for x in xs], b)
    result = SurfacePoint(f=apply_mobius(f_back, end.point.f), g=apply_mobius(g_back, end.point.g))
    logger.debug("weyl step: q drift %s", b.ctx.nstr(abs(end.params.q - W.q), 3))
    return result, S_shifted
