"""
Elliptic special functions at selectable precision.

Every quantity is an ``mpc`` of the private mpmath context owned by a
:class:`Bases` instance, so two bases with different precisions can be used
side by side without touching mpmath's global state.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Sequence, Tuple

from mpmath.ctx_mp import MPContext

from .errors import DomainError, NumericalFailure

logger = logging.getLogger(__name__)

ENV_PRECISION_BITS = "EPL_PRECISION_BITS"
DEFAULT_PRECISION_BITS = 53
DEFAULT_TRUNCATION_TOL = 1e-17
DEFAULT_MAX_TERMS = 400

# u counts as q^(-Nt) inside this window
TERMINATION_WINDOW = 1e-10
MAX_TERMINATION_INDEX = 64


def resolve_precision_bits(precision_bits: Any = None) -> int:
    if precision_bits is None:
        precision_bits = os.environ.get(ENV_PRECISION_BITS) or DEFAULT_PRECISION_BITS
    try:
        bits = int(precision_bits)
    except (TypeError, ValueError):
        raise DomainError(f"precision bits must be an integer, got {precision_bits!r}")
    if bits < 24:
        raise DomainError(f"precision bits must be at least 24, got {bits}")
    return bits


@dataclass(frozen=True)
class Bases:
    """The elliptic base p, the difference base q and the truncation policy."""

    p: Any
    q: Any
    truncation_tol: Any
    max_terms: int
    precision_bits: int
    ctx: MPContext = field(repr=False, compare=False)

    @classmethod
    def create(
        cls,
        p: Any,
        q: Any,
        precision_bits: Any = None,
        truncation_tol: Any = None,
        max_terms: int = DEFAULT_MAX_TERMS,
    ) -> "Bases":
        bits = resolve_precision_bits(precision_bits)
        ctx = MPContext()
        ctx.prec = bits

        pv = ctx.mpc(ctx.mpmathify(p))
        qv = ctx.mpc(ctx.mpmathify(q))
        if not abs(pv) < 1:
            raise DomainError(f"|p| must be < 1, got |p| = {ctx.nstr(abs(pv), 8)}")
        if not abs(qv) < 1:
            raise DomainError(f"|q| must be < 1, got |q| = {ctx.nstr(abs(qv), 8)}")
        if qv == 0:
            raise DomainError("q must be nonzero")

        if truncation_tol is None:
            # tighter than the working epsilon at extended precision
            truncation_tol = min(DEFAULT_TRUNCATION_TOL, 2.0 ** -(bits + 4))
        tol = ctx.mpf(truncation_tol)
        if not tol > 0:
            raise DomainError("truncation_tol must be positive")
        if int(max_terms) < 1:
            raise DomainError("max_terms must be >= 1")

        return cls(p=pv, q=qv, truncation_tol=tol, max_terms=int(max_terms),
                   precision_bits=bits, ctx=ctx)

    def with_precision(self, precision_bits: int) -> "Bases":
        return Bases.create(self.p, self.q, precision_bits=precision_bits, max_terms=self.max_terms)

    def with_p(self, p: Any) -> "Bases":
        pv = self.ctx.mpc(self.ctx.mpmathify(p))
        if not abs(pv) < 1:
            raise DomainError("|p| must be < 1")
        return replace(self, p=pv)

    def scalar(self, value: Any) -> Any:
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return self.ctx.mpc(self.ctx.mpmathify(value[0]), self.ctx.mpmathify(value[1]))
        return self.ctx.mpc(self.ctx.mpmathify(value))

    @property
    def zero_tol(self) -> Any:
        """Modulus below which a denominator counts as vanishing."""
        return self.ctx.eps * 1024

    def qpow(self, n: Any) -> Any:
        if isinstance(n, int):
            return self.q ** n
        return self.ctx.power(self.q, n)


# ===========================
# THETA
# ===========================

def theta_terms(x: Any, b: Bases) -> Tuple[Any, int]:
    """theta(x; p) together with the number of product factors used."""
    x = b.scalar(x)
    if x == 0:
        raise DomainError("theta is undefined at x = 0")
    p = b.p
    tol = b.truncation_tol
    pk = b.ctx.mpc(1)
    value = b.ctx.mpc(1)
    for i in range(b.max_terms):
        a = x * pk
        pk = pk * p
        c = pk / x
        value *= (1 - a) * (1 - c)
        if abs(a) < tol and abs(c) < tol:
            return value, i + 1
    raise NumericalFailure(
        f"theta product did not reach tolerance within {b.max_terms} factors", where=x
    )


def theta(x: Any, b: Bases) -> Any:
    return theta_terms(x, b)[0]


def theta_with_derivative(x: Any, b: Bases) -> Tuple[Any, Any]:
    """theta(x) and d theta/dx from the product rule over the same truncation."""
    x = b.scalar(x)
    if x == 0:
        raise DomainError("theta is undefined at x = 0")
    p = b.p
    tol = b.truncation_tol
    pk = b.ctx.mpc(1)
    value = b.ctx.mpc(1)
    deriv = b.ctx.mpc(0)
    for _ in range(b.max_terms):
        a = x * pk
        dpk = pk
        pk = pk * p
        c = pk / x
        factor = (1 - a) * (1 - c)
        dfactor = -dpk * (1 - c) + (1 - a) * c / x
        deriv = deriv * factor + value * dfactor
        value = value * factor
        if abs(a) < tol and abs(c) < tol:
            return value, deriv
    raise NumericalFailure(
        f"theta product did not reach tolerance within {b.max_terms} factors", where=x
    )


def theta_multi(xs: Iterable[Any], b: Bases) -> Any:
    """theta(x1, ..., xl) = theta(x1)...theta(xl)."""
    value = b.ctx.mpc(1)
    for x in xs:
        value *= theta(x, b)
    return value


# ===========================
# ELLIPTIC GAMMA
# ===========================

def ell_gamma(x: Any, b: Bases) -> Any:
    """Gamma(x; p, q) as the truncated double product over the (i, j) lattice."""
    x = b.scalar(x)
    if x == 0:
        raise DomainError("elliptic Gamma is undefined at x = 0")
    p, q = b.p, b.q
    tol = b.truncation_tol
    pq = p * q
    value = b.ctx.mpc(1)
    pi = b.ctx.mpc(1)
    for i in range(b.max_terms):
        qj = b.ctx.mpc(1)
        for j in range(b.max_terms):
            lower = x * pi * qj
            upper = pi * pq * qj / x
            den = 1 - lower
            if abs(den) < b.zero_tol:
                raise DomainError(f"elliptic Gamma pole at lattice index ({i}, {j})", where=(i, j))
            value *= (1 - upper) / den
            if abs(lower) < tol and abs(upper) < tol:
                break
            qj *= q
        else:
            raise NumericalFailure(f"Gamma lattice row {i} did not reach tolerance", where=(i, None))
        if abs(x * pi) < tol and abs(pi * pq / x) < tol:
            logger.debug("ell_gamma truncated after %d lattice rows", i + 1)
            return value
        pi *= p
    raise NumericalFailure(f"Gamma lattice did not reach tolerance within {b.max_terms} rows")


# ===========================
# POCHHAMMER SYMBOLS
# ===========================

def _as_integer(s: Any) -> Any:
    if isinstance(s, int):
        return s
    if isinstance(s, float) and s.is_integer():
        return int(s)
    return None


def theta_pochhammer(x: Any, s: Any, b: Bases) -> Any:
    """theta(x)_s = theta(x) theta(qx) ... theta(q^(s-1) x).

    Non-integer s goes through Gamma(q^s x)/Gamma(x).
    """
    n = _as_integer(s)
    if n is None:
        x = b.scalar(x)
        return ell_gamma(b.qpow(b.ctx.mpmathify(s)) * x, b) / ell_gamma(x, b)
    if n < 0:
        raise DomainError(f"theta Pochhammer index must be >= 0, got {n}")
    return gen_pochhammer(x, b.q, n, b)


def theta_pochhammer_multi(xs: Iterable[Any], s: int, b: Bases) -> Any:
    value = b.ctx.mpc(1)
    for x in xs:
        value *= theta_pochhammer(x, s, b)
    return value


def gen_pochhammer(x: Any, v: Any, n: int, b: Bases) -> Any:
    """(x, v)_n = prod_{i<n} theta(x v^i)."""
    if n < 0:
        raise DomainError(f"Pochhammer length must be >= 0, got {n}")
    x = b.scalar(x)
    if x == 0:
        raise DomainError("Pochhammer base point must be nonzero")
    value = b.ctx.mpc(1)
    if n == 0:
        return value
    v = b.scalar(v)
    if v == 0:
        raise DomainError("Pochhammer step must be nonzero")
    y = x
    for _ in range(n):
        value *= theta(y, b)
        y = y * v
    return value


# ===========================
# VERY-WELL-POISED SERIES
# ===========================

def terminating_index(us: Sequence[Any], b: Bases) -> int:
    """Smallest Nt such that some u equals q^(-Nt) within the matching window."""
    best = None
    for u in us:
        u = b.scalar(u)
        y = u
        for nt in range(MAX_TERMINATION_INDEX + 1):
            if abs(y - 1) < TERMINATION_WINDOW:
                if best is None or nt < best:
                    best = nt
                break
            y = y * b.q
    if best is None:
        raise DomainError("series does not terminate: no argument equals q^(-N)")
    return best


def v_series(u0: Any, us: Sequence[Any], z: Any, b: Bases) -> Any:
    """Terminating very-well-poised series with parameters u0; us and argument z.

    The product runs over u0 and every entry of ``us``.
    """
    u0 = b.scalar(u0)
    z = b.scalar(z)
    factors = [u0] + [b.scalar(u) for u in us]
    nt = terminating_index(factors, b)

    theta_u0 = theta(u0, b)
    if abs(theta_u0) < b.zero_tol:
        raise NumericalFailure("well-poising factor theta(u0) vanishes", where=u0)

    q = b.q
    total = b.ctx.mpc(1)
    ratio = b.ctx.mpc(1)
    qs = b.ctx.mpc(1)
    for s in range(1, nt + 1):
        for u in factors:
            den = theta(q * u0 * qs / u, b)
            if abs(den) < b.zero_tol:
                raise NumericalFailure(
                    f"denominator Pochhammer vanishes at s = {s}", where=(u, s)
                )
            ratio *= theta(u * qs, b) / den
        ratio *= z
        qs *= q
        total += theta(u0 * qs * qs, b) / theta_u0 * ratio
    return total


def balanced_u5_index(u5: Any, b: Bases, limit: int = 12) -> int:
    """n such that u5 = q^(-n), n <= limit."""
    u5 = b.scalar(u5)
    y = u5
    for n in range(limit + 1):
        if abs(y - 1) < TERMINATION_WINDOW:
            return n
        y = y * b.q
    raise DomainError(f"u5 is not q^(-n) for any n <= {limit}")
