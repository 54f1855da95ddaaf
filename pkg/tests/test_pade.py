# tests/test_pade.py
import pytest

from epl.checks import relative_residual
from epl.errors import DomainError
from epl.pade import (
    PadeParams,
    chi,
    chi_grid,
    draw_pade_params,
    dual_params,
    eval_U,
    eval_V,
    helper_N,
    interpolation_residuals,
    phi,
    phi_grid,
    scale_params,
    shift_T,
    solve_interpolation,
    u_den,
    v_den,
    y_func,
    y_value,
)
from epl.special_functions import theta_multi
from epl.utils import make_rng

SIZES = [(1, 1), (2, 1), (1, 2), (2, 2), (0, 3), (3, 1)]


def test_a6_is_derived_from_constraint(bases):
    P = PadeParams.from_free(1.1 + 0.2j, [0.9, 1.2j, 0.8 - 0.3j, 1.05, 0.95 + 0.4j], 1, 1, bases)
    prod = 1
    for a in P.a:
        prod *= a
    assert relative_residual(prod, P.k ** 3) < 1e-14
    assert P.N == 2
    assert P.ai(1) == P.a[0]


def test_constraint_violation_rejected(bases, params11):
    broken = PadeParams(k=params11.k, a=params11.a[:5] + (params11.a[5] * 1.01,), m=1, n=1)
    with pytest.raises(DomainError):
        broken.validate(bases)
    with pytest.raises(DomainError):
        PadeParams.from_free(1, [1, 1, 1, 1], 1, 1, bases)
    with pytest.raises(DomainError):
        PadeParams.from_free(1, [1, 1, 0, 1, 1], 1, 1, bases)


def test_trivial_problem(bases):
    P = draw_pade_params(make_rng(3), 0, 0, bases)
    ip = solve_interpolation(P, bases)
    assert ip.u == (1,)
    assert relative_residual(ip.v[0], 1) < 1e-15
    assert max(interpolation_residuals(ip, P, bases)) == 0


@pytest.mark.parametrize("m,n", SIZES)
def test_grid_residuals_and_symmetry(bases, m, n):
    rng = make_rng(100 + 10 * m + n)
    P = draw_pade_params(rng, m, n, bases)
    ip = solve_interpolation(P, bases)
    assert max(interpolation_residuals(ip, P, bases)) <= 1e-8
    k, q = P.k, bases.q
    for x in (0.9 + 0.3j, 1.1 - 0.2j, -0.85 + 0.4j):
        x = bases.scalar(x)
        assert relative_residual(eval_U(ip, k / (q * x), P, bases), eval_U(ip, x, P, bases)) <= 1e-8
        assert relative_residual(eval_V(ip, k / (q * x), P, bases), eval_V(ip, x, P, bases)) <= 1e-8


def test_grid_forms_match_basis(bases):
    P = draw_pade_params(make_rng(7), 2, 2, bases)
    q = bases.q
    for s in range(P.N + 1):
        for i in range(P.n + 1):
            assert relative_residual(phi_grid(i, s, P, bases), phi(i, q ** (-s), P, bases)) < 1e-10
        for i in range(P.m + 1):
            assert relative_residual(chi_grid(i, s, P, bases), chi(i, q ** (-s), P, bases)) < 1e-10


def test_basis_index_checked(bases, params11):
    with pytest.raises(DomainError):
        phi(2, 1.1, params11, bases)
    with pytest.raises(DomainError):
        chi(-1, 1.1, params11, bases)


def test_y_value_is_y_on_the_grid(bases, params11):
    q = bases.q
    # Y(q^{-s}) / Y(1) reproduces the grid data
    for s in range(1, 3):
        ratio = y_func(q ** (-s), params11, bases) / y_func(1, params11, bases)
        assert relative_residual(ratio, y_value(s, params11, bases)) < 1e-10


def test_shift_T(bases, params12):
    Pt = shift_T(params12, bases)
    q = bases.q
    assert (Pt.m, Pt.n) == (2, 1)
    assert relative_residual(Pt.k, params12.k * q) < 1e-15
    assert relative_residual(Pt.a[0], params12.a[0] / q) < 1e-15
    assert Pt.a[1] == params12.a[1]
    Pt.validate(bases)
    with pytest.raises(DomainError):
        shift_T(shift_T(Pt, bases), bases)


def test_dual_params_is_an_involution(params11):
    D = dual_params(dual_params(params11))
    assert (D.m, D.n) == (params11.m, params11.n)
    for a, b in zip(D.a, params11.a):
        assert relative_residual(a, b) < 1e-14


def test_scale_params(bases, params11):
    P = scale_params(params11, 3, 1, bases)
    assert relative_residual(P.a[2], params11.a[2] * bases.q) < 1e-15
    assert P.a[3] == params11.a[3]


def test_draw_is_reproducible(bases):
    P1 = draw_pade_params(make_rng(5), 1, 2, bases)
    P2 = draw_pade_params(make_rng(5), 1, 2, bases)
    assert P1 == P2


def test_first_grid_condition(bases, params12):
    ip = solve_interpolation(params12, bases)
    assert ip.u[0] == 1
    assert (len(ip.u), len(ip.v)) == (3, 2)
    assert relative_residual(eval_V(ip, 1, params12, bases), eval_U(ip, 1, params12, bases)) < 1e-10


def test_denominators(bases):
    P = draw_pade_params(make_rng(9), 0, 2, bases)
    q, k, a2 = bases.q, P.k, P.ai(2)
    x = bases.scalar(0.95 + 0.3j)
    y1, y2 = a2 / (q ** 2 * x), k / (a2 * x)
    assert relative_residual(u_den(x, P, bases), theta_multi([y1, q * y1, y2, q * y2], bases)) < 1e-13
    assert v_den(x, P, bases) == 1


def test_y_is_normalized_at_one(bases, params11):
    assert relative_residual(y_func(1, params11, bases), 1) < 1e-12
    with pytest.raises(DomainError):
        y_func(0, params11, bases)


def test_phi_vanishes_at_a4(bases, params12):
    a4 = params12.ai(4)
    for i in (1, 2):
        assert abs(phi(i, a4, params12, bases)) < 1e-12


def test_helper_N_reflection(bases, params12):
    q, k = bases.q, params12.k
    for x in (0.93 + 0.21j, 1.12 - 0.3j):
        x = bases.scalar(x)
        assert relative_residual(helper_N(k / (q * x), params12, bases),
                                 q * x * x / k * helper_N(x, params12, bases)) < 1e-10
