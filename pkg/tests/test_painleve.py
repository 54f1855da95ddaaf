# tests/test_painleve.py
import cmath

import pytest

from epl.checks import relative_residual, relative_spread
from epl.errors import DomainError, NumericalFailure
from epl.pade import draw_pade_params, shift_T
from epl.painleve import (
    CurveAnchor,
    F_f,
    G_g,
    SurfaceParams,
    anchor_from_g,
    extract_fg,
    extract_fg_pairs,
    f_star,
    fev_residual,
    g_star,
    gev_residual,
    point_from_pade,
    shift_surface,
    solve_pade_pair,
    step,
    step_f,
    step_g,
    step_traced,
    surface_from_pade,
)
from epl.utils import make_rng


def test_surface_constraint_holds(bases, params12, surface12):
    S = surface12
    assert relative_residual(S.kappa1, params12.k) < 1e-15
    S.validate(bases)
    shift_surface(S, bases).validate(bases)


def test_surface_constraint_violation(bases, params12, surface12):
    broken = SurfaceParams(kappa1=surface12.kappa1 * 1.01, kappa2=surface12.kappa2,
                           xi=surface12.xi, c=surface12.c)
    with pytest.raises(DomainError):
        broken.validate(bases)
    with pytest.raises(DomainError):
        surface_from_pade(params12, (1, 2, 3), bases)


def test_curve_symmetry(bases, surface12):
    S = surface12
    for x in (0.9 + 0.3j, 1.2 - 0.1j):
        x = bases.scalar(x)
        assert relative_residual(f_star(S.kappa1 / x, S, bases), f_star(x, S, bases)) < 1e-12
        assert relative_residual(g_star(S.kappa2 / x, S, bases), g_star(x, S, bases)) < 1e-12
        assert abs(F_f(f_star(x, S, bases), x, S, bases)) < 1e-10
        assert abs(G_g(g_star(x, S, bases), x, S, bases)) < 1e-10


def test_anchor_from_g_lands_on_the_curve(bases, surface12):
    S = surface12
    x0 = bases.scalar(1.05 + 0.25j)
    g = g_star(x0, S, bases)
    anchor = anchor_from_g(g, S, bases)
    assert anchor.role == "g"
    assert relative_residual(g_star(anchor.x, S, bases), g) < 1e-9


def test_step_checks_anchor_role(bases, surface12):
    anchor = CurveAnchor(x=bases.scalar(1.1), role="fbar", residual=0.0)
    with pytest.raises(DomainError):
        step_f(1, anchor, surface12, bases)
    with pytest.raises(DomainError):
        step_g(1, CurveAnchor(x=anchor.x, role="g", residual=0.0), surface12, bases)


def test_extraction_pair_independence(bases, params12, surface12):
    points = extract_fg_pairs(solve_pade_pair(params12, bases), surface12, bases)
    assert len(points) == 6
    assert relative_spread(p.f for p in points.values()) <= 1e-6
    assert relative_spread(p.g for p in points.values()) <= 1e-6


def test_extraction_pair_rejected(bases, params12, surface12):
    with pytest.raises(DomainError):
        extract_fg(solve_pade_pair(params12, bases), surface12, bases, pair=(1, 3))
    with pytest.raises(DomainError):
        extract_fg(solve_pade_pair(params12, bases), surface12, bases, pair=(4, 4))


@pytest.mark.parametrize("m,n", [(1, 2), (2, 2), (1, 3)])
def test_evolution_matches_shifted_extraction(bases, gauge, m, n):
    P = draw_pade_params(make_rng(70 + 10 * m + n), m, n, bases)
    point, S = point_from_pade(P, gauge, bases)
    trace = step_traced(point, S, bases)
    expected, S_shifted = point_from_pade(shift_T(P, bases), gauge, bases)

    assert relative_residual(trace.point.f, expected.f) <= 1e-6
    assert relative_residual(trace.point.g, expected.g) <= 1e-6
    assert relative_residual(trace.params.kappa2, S_shifted.kappa2) < 1e-12

    assert fev_residual(point.f, trace.point.f, trace.g_anchor.x, S, bases) <= 1e-8
    assert gev_residual(point.g, trace.point.g, trace.fbar_anchor.x, S, bases) <= 1e-8


def test_step_returns_shifted_surface(bases, params12, gauge):
    point, S = point_from_pade(params12, gauge, bases)
    _, S_bar = step(point, S, bases)
    q = bases.q
    assert relative_residual(S_bar.kappa1, q * S.kappa1) < 1e-15
    assert relative_residual(S_bar.kappa2, q ** 3 * S.kappa2) < 1e-15
    assert S_bar.c == S.c


def test_either_anchor_root_gives_the_same_step(bases, params12, gauge):
    point, S = point_from_pade(params12, gauge, bases)
    trace = step_traced(point, S, bases)
    # g_*(x) = g_*(kappa2/x); fbar_*(qx) = fbar_*(qx') with x' = kappa1/(qx)
    other_g = CurveAnchor(x=S.kappa2 / trace.g_anchor.x, role="g", residual=0.0)
    other_fbar = CurveAnchor(x=S.kappa1 / (bases.q * trace.fbar_anchor.x), role="fbar", residual=0.0)
    assert relative_residual(step_f(point.f, other_g, S, bases), trace.point.f) <= 1e-8
    assert relative_residual(step_g(point.g, other_fbar, S, bases), trace.point.g) <= 1e-8


def test_on_curve_f_lands_on_the_shifted_curve(bases, params12, surface12):
    S = surface12
    x0 = bases.scalar(1.05 + 0.25j)
    anchor = CurveAnchor(x=x0, role="g", residual=0.0)
    fbar = step_f(f_star(x0, S, bases), anchor, S, bases)
    y = params12.a[0] * x0 / params12.k
    assert abs(F_f(fbar, y, shift_surface(S, bases), bases)) <= 1e-9 * (1 + abs(fbar))


def test_three_step_orbit(bases, gauge):
    P = draw_pade_params(make_rng(113), 1, 3, bases)
    point, S = point_from_pade(P, gauge, bases)
    shifted = P
    for k in range(1, 4):
        point, S = step(point, S, bases)
        assert cmath.isfinite(complex(point.f)) and cmath.isfinite(complex(point.g))
        if k < 3:
            shifted = shift_T(shifted, bases)
            expected, _ = point_from_pade(shifted, gauge, bases)
            assert relative_residual(point.f, expected.f) <= 1e-6
            assert relative_residual(point.g, expected.g) <= 1e-6


def test_anchor_far_from_the_curve_fails(bases, surface12):
    with pytest.raises(NumericalFailure):
        anchor_from_g(1e8, surface12, bases)
