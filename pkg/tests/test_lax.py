# tests/test_lax.py
import pytest

from epl.checks import relative_residual
from epl.errors import DomainError
from epl.lax import (
    LaxData,
    admissible,
    c0c1_residual,
    casorati,
    casorati_reduced,
    d3_d4_reflection_residual,
    fit_lax,
    helper_G,
    helper_K,
    l_residual,
    l_terms,
    sample_points,
)
from epl.pade import draw_pade_params, eval_U, eval_V, shift_T, solve_interpolation, y_func
from epl.painleve import extract_fg, surface_from_pade
from epl.utils import make_rng


@pytest.fixture
def lax_data(solution11, gauge, bases):
    return LaxData.from_solution(solution11, gauge, bases)


@pytest.fixture
def lax_fit(lax_data, bases):
    return fit_lax(lax_data, bases, make_rng(31))


@pytest.fixture
def points(lax_data, bases):
    return [bases.scalar(z) for z in sample_points(make_rng(32), 4, lambda z: admissible(z, lax_data, bases))]


def test_closed_forms_fit(lax_fit):
    assert lax_fit.fit_residual <= 1e-7
    assert relative_residual(lax_fit.w, lax_fit.C0 * lax_fit.C1) < 1e-15


@pytest.mark.parametrize("kind", ["V", "YU"])
def test_three_term_relations(lax_fit, lax_data, points, bases, kind):
    for x in points:
        assert l_residual("L2", kind, x, lax_fit, lax_data, bases) <= 1e-8
        assert l_residual("L3", kind, x, lax_fit, lax_data, bases) <= 1e-8


@pytest.mark.parametrize("kind", ["V", "YU"])
def test_five_term_relations(lax_fit, lax_data, points, bases, kind):
    for x in points:
        assert l_residual("L1", kind, x, lax_fit, lax_data, bases) <= 1e-7
        assert l_residual("L1p", kind, x, lax_fit, lax_data, bases) <= 1e-7


def test_casorati_shift_and_reflection(lax_data, points, bases):
    q = bases.q
    for x in points:
        d2 = casorati_reduced(2, x, lax_data, bases)
        d1 = casorati_reduced(1, q * x, lax_data, bases)
        assert relative_residual(d2, helper_G(x, lax_data.P, bases) * d1) <= 1e-8
        assert d3_d4_reflection_residual(x, lax_data, bases) <= 1e-8


@pytest.mark.parametrize("which", [1, 3])
def test_reduced_casorati_matches_direct(lax_data, points, bases, which):
    x = points[0]
    direct = casorati(which, x, lax_data, bases) / y_func(x, lax_data.P, bases)
    assert relative_residual(direct, casorati_reduced(which, x, lax_data, bases)) <= 1e-8


def test_c0c1_relation(lax_fit, lax_data, bases):
    assert c0c1_residual(lax_fit, lax_data, bases) <= 1e-7


def test_fit_agrees_with_extraction(lax_fit, lax_data, solution11, bases):
    point = extract_fg(solution11, lax_data.S, bases)
    assert relative_residual(lax_fit.f, point.f) <= 1e-6
    assert relative_residual(lax_fit.g, point.g) <= 1e-6


def test_bad_arguments(lax_fit, lax_data, points, bases):
    with pytest.raises(DomainError):
        l_terms("L2", "U", points[0], lax_fit, lax_data, bases)
    with pytest.raises(DomainError):
        l_terms("L4", "V", points[0], lax_fit, lax_data, bases)
    with pytest.raises(DomainError):
        casorati_reduced(5, points[0], lax_data, bases)


def test_fit_needs_positive_n(gauge, bases):
    P = draw_pade_params(make_rng(4), 2, 0, bases)
    ip = solve_interpolation(P, bases)
    S = surface_from_pade(P, gauge, bases)
    data = LaxData(P=P, S=S, ip=ip, Pbar=P, Sbar=S, ipbar=ip)
    with pytest.raises(DomainError):
        fit_lax(data, bases, make_rng(5))


def test_gamma_free_helpers(params11, bases):
    q = bases.q
    x = bases.scalar(0.92 + 0.25j)
    y = y_func(x, params11, bases)
    assert relative_residual(helper_G(x, params11, bases), y_func(q * x, params11, bases) / y) < 1e-10
    ybar = y_func(x, shift_T(params11, bases), bases)
    assert relative_residual(helper_K(x, params11, bases), ybar / y) < 1e-10


def test_D1_zeros(lax_data, bases):
    P, ip, q = lax_data.P, lax_data.ip, bases.q
    root = bases.ctx.sqrt(P.k)
    for x in (1 / q, root, -root):
        terms = (eval_V(ip, x, P, bases) * eval_U(ip, x / q, P, bases) / helper_G(x / q, P, bases),
                 eval_V(ip, x / q, P, bases) * eval_U(ip, x, P, bases))
        d1 = casorati_reduced(1, x, lax_data, bases)
        assert abs(d1) <= 1e-8 * max(abs(t) for t in terms)


def test_K_reflection(params11, bases):
    q, k = bases.q, params11.k
    x = bases.scalar(0.92 + 0.25j)
    lhs = helper_K(k / (q * x), params11, bases) / helper_G(x, params11, bases)
    assert relative_residual(lhs, helper_K(q * x, params11, bases)) < 1e-10
