# tests/test_determinants.py
import logging

import pytest

from epl.checks import relative_residual, relative_spread
from epl.determinants import (
    det_U,
    det_V,
    draw_balanced,
    frenkel_turaev_check,
    general_det_U,
    general_det_V,
    stable_det,
    tau_shift_check,
)
from epl.errors import DomainError
from epl.pade import PadeParams, draw_pade_params, eval_U, eval_V, phi, solve_interpolation
from epl.utils import make_rng

XS = (0.9 + 0.3j, 1.15 - 0.2j, -0.95 + 0.1j)


@pytest.mark.parametrize("n", range(6))
def test_frenkel_turaev_summation(bases, n):
    rng = make_rng(40 + n)
    u0, us = draw_balanced(rng, n, bases)
    lhs, rhs, residual = frenkel_turaev_check(u0, us, bases)
    assert residual <= 1e-8
    if n == 0:
        assert relative_residual(lhs, 1) < 1e-15


def test_frenkel_turaev_needs_balancing(bases):
    u0, us = draw_balanced(make_rng(1), 2, bases)
    us[0] *= 1.01
    with pytest.raises(DomainError):
        frenkel_turaev_check(u0, us, bases)
    with pytest.raises(DomainError):
        frenkel_turaev_check(u0, us[:4], bases)


@pytest.mark.parametrize("m,n", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_determinants_are_multiples_of_the_solve(bases, m, n):
    P = draw_pade_params(make_rng(60 + 10 * m + n), m, n, bases)
    ip = solve_interpolation(P, bases)
    xs = [bases.scalar(x) for x in XS]
    assert relative_spread([det_U(x, P, bases) / eval_U(ip, x, P, bases) for x in xs]) <= 1e-6
    assert relative_spread([det_V(x, P, bases) / eval_V(ip, x, P, bases) for x in xs]) <= 1e-6


def test_general_determinants(bases, params11):
    xs = [bases.scalar(x) for x in XS]
    assert relative_spread([general_det_U(x, params11, bases) / det_U(x, params11, bases) for x in xs]) <= 1e-6
    assert relative_spread([general_det_V(x, params11, bases) / det_V(x, params11, bases) for x in xs]) <= 1e-6


def test_det_U_symmetric_in_a4_a6(bases, params12):
    a = list(params12.a)
    a[3], a[5] = a[5], a[3]
    swapped = PadeParams(k=params12.k, a=tuple(a), m=params12.m, n=params12.n)
    xs = [bases.scalar(x) for x in XS]
    assert relative_spread([det_U(x, swapped, bases) / det_U(x, params12, bases) for x in xs]) <= 1e-6


def test_empty_table_leaves_the_border(bases):
    P = draw_pade_params(make_rng(8), 2, 0, bases)
    x = bases.scalar(1.1 + 0.2j)
    assert relative_residual(det_U(x, P, bases), phi(0, x, P, bases)) < 1e-14


def test_tau_shift(bases, params11):
    report = tau_shift_check(params11, bases)
    assert report["U"] is not None and report["V"] is not None
    assert report["residual"] <= 1e-6
    assert report["pairs"] == [[3, 4], [3, 5], [5, 6]]


def test_singular_matrix_has_zero_determinant(bases, caplog):
    with caplog.at_level(logging.DEBUG, logger="epl.determinants"):
        value = stable_det(lambda bb: bb.ctx.matrix([[1, 2], [2, 4]]), bases)
    assert value == 0
    assert "singular 2x2 matrix" in caplog.text
