"""
Determinant expressions for U and V built from terminating
very-well-poised series, and the checks that tie them to the linear solve.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np

from .checks import relative_residual
from .errors import DomainError, NumericalFailure
from .pade import (
    PadeParams,
    chi,
    dual_params,
    eval_U,
    eval_V,
    phi,
    scale_params,
    solve_interpolation,
    y_value,
)
from .special_functions import (
    Bases,
    balanced_u5_index,
    gen_pochhammer,
    theta_pochhammer_multi,
    v_series,
)
from .utils import draw_complex

logger = logging.getLogger(__name__)

DET_ERROR_LIMIT = 1e-6
BALANCE_TOL = 1e-10
SHIFT_PAIRS = ((3, 4), (3, 5), (5, 6))


@dataclass(frozen=True)
class DetTables:
    mU: Tuple[Tuple[Any, ...], ...]
    mV: Tuple[Tuple[Any, ...], ...]
    tauU: Any
    tauV: Any


# ===========================
# ENTRIES
# ===========================

def entry_mU(i: int, j: int, P: PadeParams, b: Bases) -> Any:
    q, k, N = b.q, P.k, P.N
    a1, a2, a3, a4, a5, a6 = P.a
    us = [q ** (-N), q ** (N - i - 1) * a1, q ** (-j) * a2, q ** i * a3, q ** j * a4, a5, a6]
    return v_series(k / q, us, q, b)


def entry_mV(i: int, j: int, P: PadeParams, b: Bases) -> Any:
    q, k, N = b.q, P.k, P.N
    a1, a2, a3, a4, a5, a6 = P.a
    us = [q ** (-N), q ** (-j) * k / a1, q ** (N - i - 1) * k / a2, q ** j * k / a3,
          q ** i * k / a4, k / a5, k / a6]
    return v_series(k / q, us, q, b)


def _table(entry: Callable[[int, int, PadeParams, Bases], Any], rows: int, P: PadeParams,
           b: Bases) -> Tuple[Tuple[Any, ...], ...]:
    return tuple(tuple(entry(i, j, P, b) for j in range(rows + 1)) for i in range(rows))


def _tau(entry: Callable[[int, int, PadeParams, Bases], Any], size: int, P: PadeParams, b: Bases,
         table: Sequence[Sequence[Any]] = None) -> Any:
    """det of the leading size x size block of the table; 1 when size = 0."""
    if size == 0:
        return b.ctx.mpc(1)

    def build(bb: Bases) -> Any:
        rows = table if (table is not None and bb is b) else _table(entry, size, P, bb)
        return bb.ctx.matrix([[rows[i][j] for j in range(size)] for i in range(size)])

    return stable_det(build, b)


def tau_U(P: PadeParams, b: Bases) -> Any:
    return _tau(entry_mU, P.n, P, b)


def tau_V(P: PadeParams, b: Bases) -> Any:
    return _tau(entry_mV, P.m, P, b)


def build_tables(P: PadeParams, b: Bases) -> DetTables:
    mU = _table(entry_mU, P.n, P, b)
    mV = _table(entry_mV, P.m, P, b)
    return DetTables(mU=mU, mV=mV, tauU=_tau(entry_mU, P.n, P, b, mU),
                     tauV=_tau(entry_mV, P.m, P, b, mV))


# ===========================
# DETERMINANTS
# ===========================

def stable_det(build: Callable[[Bases], Any], b: Bases) -> Any:
    """det of build(b); rebuilt at doubled precision when cond * eps exceeds the limit."""
    ctx = b.ctx
    A = build(b)
    try:
        condition = ctx.cond(A)
    except ZeroDivisionError:
        logger.debug("singular %dx%d matrix, determinant taken as 0", A.rows, A.cols)
        return ctx.mpc(0)
    if condition * ctx.eps <= DET_ERROR_LIMIT:
        return ctx.mpc(ctx.det(A))
    logger.debug("determinant cond ~ %s at %d bits, retrying at %d bits",
                 ctx.nstr(condition, 3), b.precision_bits, 2 * b.precision_bits)
    wide = b.with_precision(2 * b.precision_bits)
    A = build(wide)
    estimate = wide.ctx.cond(A) * wide.ctx.eps
    if estimate > DET_ERROR_LIMIT:
        raise NumericalFailure(f"determinant too ill-conditioned even at {wide.precision_bits} bits")
    return ctx.mpc(wide.ctx.det(A))


def _bordered(rows: Sequence[Sequence[Any]], last: Sequence[Any], b: Bases) -> Any:
    ctx = b.ctx
    size = len(last)
    A = ctx.matrix(size, size)
    for i, row in enumerate(rows):
        for j in range(size):
            A[i, j] = row[j]
    for j in range(size):
        A[size - 1, j] = last[j]
    return A


def det_U(x: Any, P: PadeParams, b: Bases, tables: DetTables = None) -> Any:
    """U(x) up to a constant: the n x (n+1) table bordered by phi_0(x)..phi_n(x)."""
    if tables is None:
        tables = build_tables(P, b)

    def build(bb: Bases) -> Any:
        mU = tables.mU if bb is b else _table(entry_mU, P.n, P, bb)
        return _bordered(mU, [phi(j, x, P, bb) for j in range(P.n + 1)], bb)

    return stable_det(build, b)


def det_V(x: Any, P: PadeParams, b: Bases, tables: DetTables = None) -> Any:
    """V(x) up to a constant: the m x (m+1) table bordered by chi_0(x)..chi_m(x)."""
    if tables is None:
        tables = build_tables(P, b)

    def build(bb: Bases) -> Any:
        mV = tables.mV if bb is b else _table(entry_mV, P.m, P, bb)
        return _bordered(mV, [chi(j, x, P, bb) for j in range(P.m + 1)], bb)

    return stable_det(build, b)


def _general_rows(P: PadeParams, b: Bases) -> List[List[Any]]:
    rows = []
    for s in range(P.N + 1):
        xs = b.q ** (-s)
        ys = y_value(s, P, b)
        rows.append([chi(j, xs, P, b) for j in range(P.m + 1)]
                    + [ys * phi(j, xs, P, b) for j in range(P.n + 1)])
    return rows


def general_det_U(x: Any, P: PadeParams, b: Bases) -> Any:
    """The (N+2) x (N+2) determinant of the general interpolation problem for U."""
    def build(bb: Bases) -> Any:
        last = [0] * (P.m + 1) + [phi(j, x, P, bb) for j in range(P.n + 1)]
        return _bordered(_general_rows(P, bb), last, bb)

    return stable_det(build, b)


def general_det_V(x: Any, P: PadeParams, b: Bases) -> Any:
    def build(bb: Bases) -> Any:
        last = [chi(j, x, P, bb) for j in range(P.m + 1)] + [0] * (P.n + 1)
        return _bordered(_general_rows(P, bb), last, bb)

    return stable_det(build, b)


# ===========================
# FRENKEL-TURAEV SUM
# ===========================

def frenkel_turaev_check(u0: Any, us: Sequence[Any], b: Bases) -> Tuple[Any, Any, float]:
    """Terminating balanced 10V9 sum against its product evaluation."""
    if len(us) != 5:
        raise DomainError(f"expected u1..u5, got {len(us)} parameters")
    u0 = b.scalar(u0)
    u1, u2, u3, u4, u5 = (b.scalar(u) for u in us)
    q = b.q
    target = q * u0 ** 2
    if abs(u1 * u2 * u3 * u4 * u5 - target) > BALANCE_TOL * abs(target):
        raise DomainError("balancing condition u1 u2 u3 u4 u5 = q u0^2 violated")
    n = balanced_u5_index(u5, b)
    lhs = v_series(u0, [u1, u2, u3, u4, u5], q, b)
    qu0 = q * u0
    num = theta_pochhammer_multi([qu0, qu0 / (u1 * u2), qu0 / (u1 * u3), qu0 / (u2 * u3)], n, b)
    den = theta_pochhammer_multi([qu0 / u1, qu0 / u2, qu0 / u3, qu0 / (u1 * u2 * u3)], n, b)
    if abs(den) < b.zero_tol:
        raise NumericalFailure("product side of the summation has a vanishing denominator")
    rhs = num / den
    return lhs, rhs, relative_residual(lhs, rhs)


def draw_balanced(rng: np.random.Generator, n: int, b: Bases) -> Tuple[Any, List[Any]]:
    """u0..u3 generic, u5 = q^(-n), u4 fixed by the balancing condition."""
    q = b.q
    u0, u1, u2, u3 = (b.scalar(draw_complex(rng, 0.7, 1.4)) for _ in range(4))
    u5 = q ** (-n)
    u4 = q * u0 ** 2 / (u1 * u2 * u3 * u5)
    return u0, [u1, u2, u3, u4, u5]


# ===========================
# TAU SHIFTS
# ===========================

def shift_constants(P: PadeParams, b: Bases) -> Dict[int, Any]:
    """c_3..c_6 relating U(a_i) to the shifted tau functions."""
    q, k, m, n = b.q, P.k, P.m, P.n
    a1, a2, a3, a4, a5, a6 = P.a

    def gp(x: Any, v: Any) -> Any:
        return gen_pochhammer(x, v, n, b)

    c3 = q ** (n * (n - 1) // 2) * (gp(q ** (-n) * k / a3, q) * gp(a3, q) * gp(q ** (-m - n + 1) * a3 / a1, q)
               * gp(q ** (m + 1) * a1 * a3 / k, q))
    c3 = c3 / (gp(k / (a2 * a3), q) * gp(q * a3 / a2, q) * gp(q ** (-m - n + 1) * a3 / a1, q * q)
               * gp(q ** (m + n) * a1 * a3 / k, 1))
    c4 = gp(q ** (-n) * k / a4, q) * gp(a4, q) / (gp(k / (a2 * a4), 1) * gp(q * a4 / a2, q * q))
    out = {3: c3, 4: c4}
    for i, ai in ((5, a5), (6, a6)):
        out[i] = gp(k / (q * ai), 1) * gp(ai, 1) / (gp(k / (a2 * ai), q) * gp(q * ai / a2, q))
    return out


def dual_shift_constants(P: PadeParams, b: Bases) -> Dict[int, Any]:
    """(c'_3, c'_4, c'_5, c'_6) = (c_4, c_3, c_5, c_6) on the dual parameters."""
    c = shift_constants(dual_params(P), b)
    return {3: c[4], 4: c[3], 5: c[5], 6: c[6]}


def tau_shift_check(P: PadeParams, b: Bases, pairs: Sequence[Tuple[int, int]] = SHIFT_PAIRS) -> Dict[str, Any]:
    """Compare U(a_i)/U(a_j) and V(a_i/q)/V(a_j/q) with shifted tau ratios."""
    ip = solve_interpolation(P, b)
    q = b.q
    report: Dict[str, Any] = {"U": None, "V": None, "pairs": [list(p) for p in pairs]}
    if P.n >= 1:
        c = shift_constants(P, b)
        worst = 0.0
        for i, j in pairs:
            tau_i = tau_U(scale_params(scale_params(P, 2, -1, b), i, 1, b), b)
            tau_j = tau_U(scale_params(scale_params(P, 2, -1, b), j, 1, b), b)
            lhs = eval_U(ip, P.ai(i), P, b) / eval_U(ip, P.ai(j), P, b)
            rhs = c[i] * tau_i / (c[j] * tau_j)
            worst = max(worst, relative_residual(lhs, rhs))
        report["U"] = worst
    if P.m >= 1:
        c = dual_shift_constants(P, b)
        worst = 0.0
        for i, j in pairs:
            tau_i = tau_V(scale_params(scale_params(P, 1, 1, b), i, -1, b), b)
            tau_j = tau_V(scale_params(scale_params(P, 1, 1, b), j, -1, b), b)
            lhs = eval_V(ip, P.ai(i) / q, P, b) / eval_V(ip, P.ai(j) / q, P, b)
            rhs = c[i] * tau_i / (c[j] * tau_j)
            worst = max(worst, relative_residual(lhs, rhs))
        report["V"] = worst
    values = [v for v in (report["U"], report["V"]) if v is not None]
    report["residual"] = max(values) if values else 0.0
    return report
