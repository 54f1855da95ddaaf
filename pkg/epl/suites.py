"""
Verification suites run by ``epl verify``: each collects named residuals
against tolerances from the run configuration into a SuiteReport.
"""
from __future__ import annotations

import logging
from typing import Any, Callable, Dict, List, Sequence

import numpy as np

from .checks import SuiteReport, relative_residual, relative_spread
from .determinants import (
    det_U,
    det_V,
    draw_balanced,
    frenkel_turaev_check,
    general_det_U,
    general_det_V,
    tau_shift_check,
)
from .errors import DomainError
from .lax import (
    LaxData,
    admissible,
    c0c1_residual,
    casorati_reduced,
    d3_d4_reflection_residual,
    fit_lax,
    helper_G,
    l_residual,
)
from .pade import (
    PadeParams,
    draw_pade_params,
    eval_U,
    eval_V,
    interpolation_residuals,
    shift_T,
    solve_interpolation,
)
from .painleve import (
    CurveAnchor,
    F_f,
    SurfacePoint,
    extract_fg,
    extract_fg_pairs,
    fev_residual,
    gev_residual,
    point_from_pade,
    solve_pade_pair,
    step,
    step_f,
    step_g,
    step_traced,
    surface_from_pade,
)
from .settings import RunConfig
from .special_functions import Bases, ell_gamma, theta, theta_pochhammer
from .utils import (
    ELLIPTIC_BASE_RANGE,
    PARAM_MODULUS_RANGE,
    SAMPLE_ANNULUS,
    SPECIAL_ANNULUS,
    draw_complex,
    make_rng,
    sample_points,
)
from .weyl import (
    F_w,
    WeylState,
    act_point,
    composite_formula_residual,
    coxeter_check,
    draw_weyl_params,
    embed_surface,
    f_star_w,
    g_star_w,
    rescale_bridge,
    weyl_step,
)

logger = logging.getLogger(__name__)

SUITE_NAMES = ("special", "pade", "painleve", "lax", "det", "weyl")

# one rng stream per suite so a suite's draws do not depend on which others ran
_STREAMS = {name: index + 1 for index, name in enumerate(SUITE_NAMES)}


def _points(rng: np.random.Generator, count: int, b: Bases,
            accept: Callable[[Any], bool] = None, annulus: Sequence[float] = SAMPLE_ANNULUS) -> List[Any]:
    pts = sample_points(rng, count, accept or (lambda z: True), annulus=annulus)
    return [b.scalar(z) for z in pts]


def _params_with(cfg: RunConfig, rng: np.random.Generator, min_n: int) -> PadeParams:
    """The configured parameters, or a draw at the same m when n is too small."""
    P = cfg.pade
    if P.n >= min_n:
        return P
    logger.info("n = %d too small for this check, drawing (m, n) = (%d, %d)", P.n, P.m, min_n)
    return draw_pade_params(rng, P.m, min_n, cfg.bases)


def _max(values: Sequence[Any]) -> float:
    return max(float(v) for v in values) if values else 0.0


# ===========================
# SPECIAL FUNCTIONS
# ===========================

def run_special(cfg: RunConfig, rng: np.random.Generator) -> SuiteReport:
    """Theta and Gamma identities, each sample with its own elliptic base p."""
    b = cfg.bases
    tol = cfg.tol("special")
    report = SuiteReport("special")
    # theta and Gamma vanish or blow up at x = 1
    xs = _points(rng, cfg.sizes["special"], b, lambda z: abs(z - 1) > 1e-2, annulus=SPECIAL_ANNULUS)
    samples = [(b.with_p(draw_complex(rng, *ELLIPTIC_BASE_RANGE)), x) for x in xs]
    q = b.q

    report.run("theta_quasi_periodicity", tol, lambda: _max(
        [relative_residual(theta(bp.p * x, bp), -theta(x, bp) / x) for bp, x in samples]))
    report.run("theta_inversion", tol, lambda: _max(
        [relative_residual(theta(1 / x, bp), -theta(x, bp) / x) for bp, x in samples]))
    report.run("theta_reflection", tol, lambda: _max(
        [relative_residual(theta(bp.p / x, bp), theta(x, bp)) for bp, x in samples]))
    report.run("gamma_q_shift", tol, lambda: _max(
        [relative_residual(ell_gamma(q * x, bp), theta(x, bp) * ell_gamma(x, bp)) for bp, x in samples]))
    report.run("gamma_reflection", tol, lambda: _max(
        [relative_residual(ell_gamma(bp.p * q / x, bp) * ell_gamma(x, bp), 1) for bp, x in samples]))
    report.run("pochhammer_gamma", tol, lambda: _max(
        [relative_residual(theta_pochhammer(x, 3, bp), ell_gamma(q ** 3 * x, bp) / ell_gamma(x, bp))
         for bp, x in samples]))
    b0 = b.with_p(0)
    report.run("theta_p0", tol, lambda: _max(
        [relative_residual(theta(x, b0), 1 - x) for _, x in samples]))
    return report


# ===========================
# INTERPOLATION
# ===========================

def run_pade(cfg: RunConfig, rng: np.random.Generator) -> SuiteReport:
    b, P0 = cfg.bases, cfg.pade
    tol = cfg.tol("residual")
    report = SuiteReport("pade")
    draws = [P0] + [draw_pade_params(rng, P0.m, P0.n, b) for _ in range(cfg.sizes["draws"] - 1)]
    for index, P in enumerate(draws):
        label = f"draw{index}"
        xs = _points(rng, cfg.sizes["samples"], b)

        def grid(P=P):
            return _max(interpolation_residuals(solve_interpolation(P, b), P, b))

        def symmetry(P=P, xs=xs):
            ip = solve_interpolation(P, b)
            k, q = P.k, b.q
            return _max([max(relative_residual(eval_U(ip, k / (q * x), P, b), eval_U(ip, x, P, b)),
                             relative_residual(eval_V(ip, k / (q * x), P, b), eval_V(ip, x, P, b)))
                         for x in xs])

        report.run(f"{label}.grid_residual", tol, grid)
        report.run(f"{label}.symmetry", tol, symmetry)
    return report


# ===========================
# PAINLEVE
# ===========================

def run_painleve(cfg: RunConfig, rng: np.random.Generator) -> SuiteReport:
    b, c = cfg.bases, cfg.gauge
    report = SuiteReport("painleve")
    P = _params_with(cfg, rng, 1)

    def pair_spread():
        S = surface_from_pade(P, c, b)
        points = list(extract_fg_pairs(solve_pade_pair(P, b), S, b).values())
        return max(relative_spread([pt.f for pt in points]), relative_spread([pt.g for pt in points]))

    report.run("extraction_pair_spread", cfg.tol("evolution"), pair_spread)

    Pe = _params_with(cfg, rng, 2)
    traced: Dict[str, Any] = {}

    def evolution():
        point, S = point_from_pade(Pe, c, b)
        trace = step_traced(point, S, b)
        expected, _ = point_from_pade(shift_T(Pe, b), c, b)
        traced.update(point=point, S=S, trace=trace)
        return max(relative_residual(trace.point.f, expected.f),
                   relative_residual(trace.point.g, expected.g))

    report.run("evolution_vs_shifted_extraction", cfg.tol("evolution"), evolution)

    def back_substitution():
        if not traced:
            raise DomainError("evolution step unavailable")
        point, S, trace = traced["point"], traced["S"], traced["trace"]
        return max(fev_residual(point.f, trace.point.f, trace.g_anchor.x, S, b),
                   gev_residual(point.g, trace.point.g, trace.fbar_anchor.x, S, b))

    def anchor_independence():
        if not traced:
            raise DomainError("evolution step unavailable")
        point, S, trace = traced["point"], traced["S"], traced["trace"]
        # g_*(x) = g_*(kappa2/x) and fbar_*(qx) = fbar_*(qx') with x' = kappa1/(qx)
        other_g = CurveAnchor(x=S.kappa2 / trace.g_anchor.x, role="g", residual=trace.g_anchor.residual)
        other_fbar = CurveAnchor(x=S.kappa1 / (b.q * trace.fbar_anchor.x), role="fbar",
                                 residual=trace.fbar_anchor.residual)
        return max(relative_residual(step_f(point.f, other_g, S, b), trace.point.f),
                   relative_residual(step_g(point.g, other_fbar, S, b), trace.point.g))

    report.run("evolution_back_substitution", cfg.tol("anchor"), back_substitution)
    report.run("anchor_independence", cfg.tol("anchor"), anchor_independence)
    return report


# ===========================
# LAX PAIR
# ===========================

def run_lax(cfg: RunConfig, rng: np.random.Generator) -> SuiteReport:
    b, c = cfg.bases, cfg.gauge
    report = SuiteReport("lax")
    P = _params_with(cfg, rng, 1)
    state: Dict[str, Any] = {}

    def fit():
        data = LaxData.from_solution(solve_pade_pair(P, b), c, b)
        state["data"] = data
        state["fit"] = fit_lax(data, b, rng)
        state["xs"] = [b.scalar(z) for z in sample_points(
            rng, cfg.sizes["samples"], lambda z: admissible(z, data, b))]
        return state["fit"].fit_residual

    report.run("casorati_closed_forms", cfg.tol("lax"), fit)

    def relation(which: str, kind: str) -> Callable[[], float]:
        return _needs(state, lambda: _max(
            [l_residual(which, kind, x, state["fit"], state["data"], b) for x in state["xs"]]))

    for kind in ("V", "YU"):
        report.run(f"L2.{kind}", cfg.tol("residual"), relation("L2", kind))
        report.run(f"L3.{kind}", cfg.tol("residual"), relation("L3", kind))
        report.run(f"L1.{kind}", cfg.tol("lax"), relation("L1", kind))
        report.run(f"L1p.{kind}", cfg.tol("lax"), relation("L1p", kind))

    def d1_d2():
        data = state["data"]
        return _max([relative_residual(casorati_reduced(2, x, data, b),
                                       helper_G(x, data.P, b) * casorati_reduced(1, b.q * x, data, b))
                     for x in state["xs"]])

    def reflection():
        return _max([d3_d4_reflection_residual(x, state["data"], b) for x in state["xs"]])

    def vs_extraction():
        data, lax_fit = state["data"], state["fit"]
        point = extract_fg(solve_pade_pair(P, b), data.S, b)
        return max(relative_residual(lax_fit.f, point.f), relative_residual(lax_fit.g, point.g))

    for name, tol, check in (
        ("D2_is_shifted_D1", cfg.tol("residual"), d1_d2),
        ("D3_D4_reflection", cfg.tol("residual"), reflection),
        ("C0C1", cfg.tol("lax"), lambda: c0c1_residual(state["fit"], state["data"], b)),
        ("fit_vs_extraction", cfg.tol("evolution"), vs_extraction),
    ):
        report.run(name, tol, _needs(state, check))
    return report


def _needs(state: Dict[str, Any], check: Callable[[], float]) -> Callable[[], float]:
    def wrapped():
        if "fit" not in state:
            raise DomainError("Lax fit unavailable")
        return check()
    return wrapped


# ===========================
# DETERMINANTS
# ===========================

def run_det(cfg: RunConfig, rng: np.random.Generator) -> SuiteReport:
    b, P = cfg.bases, cfg.pade
    tol = cfg.tol("det")
    report = SuiteReport("det")
    xs = _points(rng, cfg.sizes["samples"], b)

    def ratio_spread(det_fn, eval_fn):
        def check():
            ip = solve_interpolation(P, b)
            return relative_spread([det_fn(x, P, b) / eval_fn(ip, x, P, b) for x in xs])
        return check

    report.run("det_U_vs_solve", tol, ratio_spread(det_U, eval_U))
    report.run("det_V_vs_solve", tol, ratio_spread(det_V, eval_V))
    report.run("general_det_U", tol, lambda: relative_spread(
        [general_det_U(x, P, b) / det_U(x, P, b) for x in xs]))
    report.run("general_det_V", tol, lambda: relative_spread(
        [general_det_V(x, P, b) / det_V(x, P, b) for x in xs]))

    def a_symmetry():
        a = list(P.a)
        a[3], a[5] = a[5], a[3]
        swapped = PadeParams(k=P.k, a=tuple(a), m=P.m, n=P.n)
        return relative_spread([det_U(x, swapped, b) / det_U(x, P, b) for x in xs])

    report.run("det_U_a4_a6_symmetry", tol, a_symmetry)

    for n in range(6):
        def ft(n=n):
            worst = 0.0
            for _ in range(cfg.sizes["draws"]):
                u0, us = draw_balanced(rng, n, b)
                worst = max(worst, frenkel_turaev_check(u0, us, b)[2])
            return worst
        report.run(f"frenkel_turaev.n{n}", cfg.tol("residual"), ft)

    P11 = P if (P.m, P.n) == (1, 1) else draw_pade_params(rng, 1, 1, b)
    report.run("tau_shift", tol, lambda: tau_shift_check(P11, b)["residual"])
    return report


# ===========================
# WEYL GROUP
# ===========================

def _random_point(rng: np.random.Generator, b: Bases) -> SurfacePoint:
    return SurfacePoint(f=b.scalar(draw_complex(rng, *PARAM_MODULUS_RANGE)),
                        g=b.scalar(draw_complex(rng, *PARAM_MODULUS_RANGE)))


def run_weyl(cfg: RunConfig, rng: np.random.Generator) -> SuiteReport:
    b = cfg.bases
    report = SuiteReport("weyl")
    W = draw_weyl_params(rng, b)
    point = _random_point(rng, b)
    zs = _points(rng, cfg.sizes["samples"], b)
    coxeter: Dict[str, Any] = {}

    def relations():
        if not coxeter:
            coxeter.update(coxeter_check(W, point, b))
        return coxeter

    report.run("coxeter_params", cfg.tol("weyl_params"), lambda: relations()["params"])
    report.run("coxeter_point", cfg.tol("weyl"), lambda: relations()["point"])
    report.run("r_formula", cfg.tol("special"), lambda: composite_formula_residual(W)["r"])
    report.run("T_formula", cfg.tol("special"), lambda: composite_formula_residual(W)["T"])

    def curve_equivariance():
        worst = 0.0
        for z in zs:
            on_curve = WeylState(params=W, point=SurfacePoint(f=f_star_w(z, W, b), g=g_star_w(z, W, b)))
            image = act_point("mu12", on_curve, b)
            worst = max(worst, relative_residual(image.point.f, f_star_w(z, image.params, b)))
        return worst

    report.run("curve_equivariance", cfg.tol("weyl"), curve_equivariance)

    S = surface_from_pade(cfg.pade, cfg.gauge, b)

    def bridge():
        Wb = embed_surface(S, 1, b)
        S_back, lam = rescale_bridge(Wb, b, c34=S.c[2:])
        S_back.validate(b)
        f = point.f
        return _max([relative_residual(F_w(f, z, Wb, b), F_f(f, z / lam, S_back, b)) for z in zs])

    report.run("rescale_bridge", cfg.tol("weyl"), bridge)

    def weyl_vs_step():
        start = _random_point(rng, b)
        expected, _ = step(start, S, b)
        got, _ = weyl_step(start, S, b)
        return max(relative_residual(got.f, expected.f), relative_residual(got.g, expected.g))

    report.run("weyl_T_vs_evolution", cfg.tol("evolution"), weyl_vs_step)
    return report


SUITES: Dict[str, Callable[[RunConfig, np.random.Generator], SuiteReport]] = {
    "special": run_special,
    "pade": run_pade,
    "painleve": run_painleve,
    "lax": run_lax,
    "det": run_det,
    "weyl": run_weyl,
}


def run_suites(names: Sequence[str], cfg: RunConfig) -> List[SuiteReport]:
    reports = []
    for name in names:
        if name not in SUITES:
            raise DomainError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)} or all")
        logger.info("running suite %s", name)
        reports.append(SUITES[name](cfg, make_rng(cfg.seed, _STREAMS[name])))
    return reports
