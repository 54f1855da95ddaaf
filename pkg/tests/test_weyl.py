# tests/test_weyl.py
import pytest

from epl.checks import relative_residual
from epl.errors import DomainError
from epl.painleve import F_f, SurfacePoint, point_from_pade, step
from epl.utils import make_rng
from epl.weyl import (
    WORD_T,
    WeylState,
    act_param,
    act_point,
    act_word_params,
    apply_mobius,
    chart_mobius,
    composite_formula_residual,
    coxeter_check,
    draw_weyl_params,
    embed_surface,
    f_star_w,
    F_w,
    g_star_w,
    parse_generator,
    rescale_bridge,
    weyl_step,
)


@pytest.fixture
def weyl_params(bases):
    return draw_weyl_params(make_rng(50), bases)


@pytest.fixture
def weyl_point(bases):
    return SurfacePoint(f=bases.scalar(0.8 + 0.45j), g=bases.scalar(-0.6 + 1.1j))


def test_parse_generator():
    assert parse_generator("c") == ("c", 0, 0)
    assert parse_generator("mu34") == ("mu", 3, 4)
    for bad in ("s11", "mu9", "x12", "s19", ""):
        with pytest.raises(DomainError):
            parse_generator(bad)


def test_parameter_action(weyl_params):
    W = weyl_params
    swapped = act_param("s12", W)
    assert swapped.u[:2] == (W.u[1], W.u[0]) and swapped.u[2:] == W.u[2:]
    assert act_param("c", W).h1 == W.h2
    mu = act_param("mu12", W)
    assert relative_residual(mu.h1, W.h1 * W.h2 / (W.u[0] * W.u[1])) < 1e-15
    assert relative_residual(mu.u[0], W.h2 / W.u[1]) < 1e-15
    back = act_param("mu12", mu)
    for x, y in zip(back.values(), W.values()):
        assert relative_residual(x, y) < 1e-14
    assert relative_residual(act_word_params(WORD_T, W).q, W.q) < 1e-12


def test_coxeter_relations(weyl_params, weyl_point, bases):
    report = coxeter_check(weyl_params, weyl_point, bases)
    assert len(report["checks"]) == 9 + 36
    assert report["params"] <= 1e-8
    assert report["point"] <= 1e-6


def test_composite_formulas(weyl_params):
    residual = composite_formula_residual(weyl_params)
    assert residual["r"] <= 1e-12
    assert residual["T"] <= 1e-12


def test_reflection_keeps_the_curve(weyl_params, bases):
    W = weyl_params
    for z in (0.95 + 0.2j, 1.1 - 0.35j):
        z = bases.scalar(z)
        state = WeylState(params=W, point=SurfacePoint(f=f_star_w(z, W, bases), g=g_star_w(z, W, bases)))
        image = act_point("mu12", state, bases)
        assert relative_residual(image.point.f, f_star_w(z, image.params, bases)) <= 1e-8
        assert image.point.g == state.point.g


def test_indeterminacy_point_rejected(weyl_params, bases):
    W = weyl_params
    u1 = W.u[0]
    state = WeylState(params=W, point=SurfacePoint(f=f_star_w(u1, W, bases), g=g_star_w(u1, W, bases)))
    with pytest.raises(DomainError):
        act_point("mu12", state, bases)


def test_chart_mobius_recovers_a_known_map(bases):
    known = (bases.scalar(2), bases.scalar(1), bases.scalar(0.5), bases.scalar(1))
    src = [bases.scalar(s) for s in (0.3 + 0.1j, -1.2 + 0.4j, 0.7 - 0.9j)]
    dst = [apply_mobius(known, s) for s in src]
    coeffs = chart_mobius(src, dst, bases)
    for got, want in zip(coeffs, known):
        assert abs(got - want) < 1e-12
    with pytest.raises(DomainError):
        chart_mobius(src[:2], dst[:2], bases)


def test_rescale_bridge_recovers_the_surface(surface12, bases):
    W = embed_surface(surface12, 1, bases)
    S_back, lam = rescale_bridge(W, bases, c34=surface12.c[2:])
    S_back.validate(bases)
    f = bases.scalar(0.7 + 0.2j)
    for z in (0.9 + 0.3j, 1.2 - 0.4j):
        z = bases.scalar(z)
        assert relative_residual(F_w(f, z, W, bases), F_f(f, z / lam, S_back, bases)) <= 1e-8


@pytest.mark.parametrize("lam", [1, 1j])
def test_weyl_translation_matches_evolution(params12, gauge, bases, lam):
    point, S = point_from_pade(params12, gauge, bases)
    expected, S_expected = step(point, S, bases)
    got, S_got = weyl_step(point, S, bases, lam=lam)
    assert S_got == S_expected
    assert relative_residual(got.f, expected.f) <= 1e-6
    assert relative_residual(got.g, expected.g) <= 1e-6
