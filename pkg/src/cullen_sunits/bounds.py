"""Effective constants, evaluated with outward-rounded interval arithmetic.

Every upper bound returned here is the upper endpoint of an mpmath interval
that encloses the exact real value, so it can only overshoot. ``c3`` is a lower
bound and uses the lower endpoint. Precision is an explicit ``dps`` argument;
each call builds its own interval context and never touches mpmath's globals.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
from mpmath.ctx_iv import MPIntervalContext

from .errors import NoConvergence, PreconditionViolated
from .padic_core import is_prime
from .recurrence import TernaryRecurrence, closed_form, evaluate

DEFAULT_DPS = 50
MAX_ROUNDS = 1000

C2_COEFFICIENT = "2.02e12"
LOG_INEQ_COEFFICIENT = "10.49"
C3_COEFFICIENT = "2.63"
SCALE = "1.45"


def _context(dps: int) -> MPIntervalContext:
    if dps < 15:
        raise ValueError("precision below 15 digits is not supported")
    ctx = MPIntervalContext()
    ctx.dps = dps
    return ctx


def _raw_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    if not man and exp:
        raise ArithmeticError("interval endpoint is infinite or nan")
    value = Fraction(int(man) * 2**exp) if exp >= 0 else Fraction(int(man), 2**-exp)
    return -value if sign else value


def _upper(x) -> Fraction:
    """Upper endpoint of an interval, exactly, as a Fraction."""
    return _raw_fraction(x._mpi_[1])


def _lower(x) -> Fraction:
    return _raw_fraction(x._mpi_[0])


def _num(ctx, x):
    """Enclose a user-supplied real: exact for ints, Fractions and decimal strings."""
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    if isinstance(x, (int, float, mpmath.mpf)):
        return ctx.mpf(x)
    return ctx.mpf(str(x))


def decimal_up(x, digits: int = 30) -> str:
    """Decimal string >= ``x`` (a Fraction or int) with ``digits`` significant digits."""
    return _to_decimal(x, digits, decimal.ROUND_CEILING)


def decimal_down(x, digits: int = 30) -> str:
    return _to_decimal(x, digits, decimal.ROUND_FLOOR)


def _to_decimal(x, digits, rounding):
    if isinstance(x, int):
        return str(x)
    frac = Fraction(x)
    with decimal.localcontext() as dctx:
        dctx.prec = digits
        dctx.rounding = rounding
        dctx.Emax = decimal.MAX_EMAX
        dctx.Emin = decimal.MIN_EMIN
        value = decimal.Decimal(frac.numerator) / decimal.Decimal(frac.denominator)
    return f"{value:E}" if abs(value.adjusted()) > 15 else str(value)


# --- Yu's p-adic bound -------------------------------------------------------


@dataclass(frozen=True)
class YuParams:
    """Numeric inputs to Yu's bound for nu_pi(eta_1^d_1 ... eta_l^d_l - 1).

    ``H`` holds one height parameter per term, each at least max(h(eta_j), log p);
    the algebraic numbers themselves are never represented.
    """

    l: int
    D: int
    e_pi: int
    f_pi: int
    p: int
    H: tuple
    B_star: object = 3

    def __post_init__(self):
        object.__setattr__(self, "H", tuple(self.H))
        if self.l < 1 or self.D < 1 or self.e_pi < 1 or self.f_pi < 1:
            raise ValueError("l, D, e_pi and f_pi must be positive")
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if len(self.H) != self.l:
            raise ValueError(f"need {self.l} height parameters, got {len(self.H)}")
        ctx = _context(30)
        log_p = ctx.log(self.p)
        for h in self.H:
            if _upper(_num(ctx, h)) < _lower(log_p):
                raise ValueError(f"height parameter {h} is below log p")
        if _upper(_num(ctx, self.B_star)) < 3:
            raise ValueError("B_star must be at least 3")


def _yu_leading(ctx, l, D, e_pi):
    return (
        19
        * (20 * ctx.sqrt(l + 1) * D) ** (2 * (l + 1))
        * ctx.mpf(e_pi) ** (l - 1)
        * ctx.log(ctx.e**5 * l * D)
    )


def yu_leading_constant(l: int, D: int, e_pi: int = 1, dps: int = DEFAULT_DPS) -> Fraction:
    """19 (20 sqrt(l+1) D)^(2(l+1)) e_pi^(l-1) log(e^5 l D), rounded up."""
    return _upper(_yu_leading(_context(dps), l, D, e_pi))


def yu_prime_factor(p: int, f_pi: int = 1, dps: int = DEFAULT_DPS) -> Fraction:
    """p^f / (f log p)^2, rounded up."""
    ctx = _context(dps)
    return _upper(ctx.mpf(p) ** f_pi / (f_pi * ctx.log(p)) ** 2)


def yu_valuation_bound(params: YuParams, dps: int = DEFAULT_DPS) -> Fraction:
    ctx = _context(dps)
    prod_h = ctx.mpf(1)
    for h in params.H:
        prod_h *= _num(ctx, h)
    value = (
        _yu_leading(ctx, params.l, params.D, params.e_pi)
        * ctx.mpf(params.p) ** params.f_pi
        / (params.f_pi * ctx.log(params.p)) ** 2
        * prod_h
        * ctx.log(_num(ctx, params.B_star))
    )
    return _upper(value)


# --- Petho's lemma -----------------------------------------------------------


def petho_bound(u, v, h, dps: int = DEFAULT_DPS) -> Fraction:
    """Upper bound for the largest real x with x = u + v (log x)^h.

    The first branch of the max is dropped when it is undefined (v = 0, or a
    nonpositive base under the h-th power).
    """
    ctx = _context(dps)
    u, v, h = _num(ctx, u), _num(ctx, v), _num(ctx, h)
    if _lower(u) < 0 or _lower(v) < 0 or _lower(h) < 1:
        raise ValueError("need u >= 0, v >= 0, h >= 1")
    two_h = ctx.mpf(2) ** h
    root_u = u ** (1 / h) if _upper(u) > 0 else ctx.mpf(0)
    second = two_h * (root_u + 2 * ctx.e**2) ** h
    best = _upper(second)
    if _lower(v) > 0:
        base = root_u + v ** (1 / h) * ctx.log(h**h * v)
        if _upper(base) > 0:
            base = ctx.mpf([max(base.a, 0), base.b])  # clip the part below zero
            best = max(best, _upper(two_h * base**h))
    return best


# --- n < C (D + E log^3 n)^k -------------------------------------------------


def _largest_integer_solution(rhs: Callable, dps: int) -> int:
    """Largest integer n >= 1 with n < rhs(n), using the upper endpoint of rhs."""
    while True:
        ctx = _context(dps)
        x = ctx.mpf(3)
        for _ in range(MAX_ROUNDS):
            nxt = rhs(ctx, x).b
            if _upper(nxt) <= _upper(x) + 1:
                if _upper(nxt) > _upper(x):
                    x = nxt
                break
            x = nxt
        else:
            raise NoConvergence(f"fixed-point iteration did not settle; last iterate {x}")
        top = math.floor(_upper(x))
        if len(str(top)) + 15 <= dps:
            break
        dps = len(str(top)) + 25

    def ok(m):
        return m >= 1 and _upper(rhs(ctx, ctx.mpf(m))) > m

    n = top
    while ok(n + 1):
        n += 1
    while n >= 1 and not ok(n):
        n -= 1
    return n


def solve_log_inequality(C, D, E, k: int, dps: int = DEFAULT_DPS) -> int:
    """Largest integer n with n < C (D + E log^3 n)^k.

    Found by fixed-point iteration from n = 3 followed by an integer search
    around the limit. The right-hand side is evaluated at its upper endpoint,
    so the answer can only err upward.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")

    def rhs(ctx, x):
        c, d, e = _num(ctx, C), _num(ctx, D), _num(ctx, E)
        if _lower(c) <= 0 or _lower(e) < 0:
            raise ValueError("need C > 0 and E >= 0")
        return c * (d + e * ctx.log(x) ** 3) ** k

    return _largest_integer_solution(rhs, dps)


# --- constants of the general theorems ---------------------------------------


def _c2(ctx, Y):
    return ctx.mpf(C2_COEFFICIENT) * ctx.log(Y) ** 2


def c2_value(Y: int, dps: int = DEFAULT_DPS) -> Fraction:
    """2.02e12 log^2 Y, rounded up."""
    return _upper(_c2(_context(dps), Y))


@dataclass(frozen=True)
class BoundConstants:
    k: int
    A: int
    Y: int
    gamma: int
    c1: int
    c2: Fraction
    n0: int
    n1: int
    c4: int
    c3: Callable = field(repr=False, compare=False)
    P: int | None = None
    c5: object = None
    c6: Fraction | None = None
    c7: Fraction | None = None
    dps: int = DEFAULT_DPS
    rounding: dict = field(
        default_factory=lambda: {
            "c1": "exact", "c2": "up", "n0": "up", "n1": "up", "c4": "up",
            "c3": "down", "c5": "up", "c6": "up", "c7": "up",
        }
    )

    def table(self, digits: int = 20):
        """Rows of (name, formula, value, rounding) for reports."""
        rows = [
            ("c1", "Y^8", str(self.c1)),
            ("c2", "2.02e12 * log(Y)^2", decimal_up(self.c2, digits)),
            ("n0", "largest n < (log 4A + 10.49 c2 log^3 n)^k / log gamma", str(self.n0)),
            ("n1", "largest n < 1.45 (log 4(A+1) + 10.49 c2 log^3 n)^k", str(self.n1)),
            ("c4", "max(c1, n1)", str(self.c4)),
        ]
        if self.c7 is not None:
            rows += [
                ("c7", "1.45 max(P, A)^(2k+2) (2 c2 log 4A)^(k+1)", decimal_up(self.c7, digits)),
                ("c6", "2^(3k+3) c7 log^(3k+3)(c7 (3k+3)^(3k+3))", decimal_up(self.c6, digits)),
                ("c5", "max(c4, c6)", decimal_up(self.c5, digits)),
            ]
        return [(name, formula, value, self.rounding[name]) for name, formula, value in rows]


def general_constants(k: int, A: int, rec: TernaryRecurrence, dps: int = DEFAULT_DPS) -> BoundConstants:
    """c1, c2, n0, n1, c4 and the function c3(n)."""
    if k < 1 or A < 1:
        raise ValueError("k and A must be positive integers")
    Y, gamma = rec.Y, rec.gamma

    def n0_rhs(ctx, x):
        return (ctx.log(4 * A) + ctx.mpf(LOG_INEQ_COEFFICIENT) * _c2(ctx, Y) * ctx.log(x) ** 3) ** k / ctx.log(gamma)

    def n1_rhs(ctx, x):
        inner = ctx.log(4 * (A + 1)) + ctx.mpf(LOG_INEQ_COEFFICIENT) * _c2(ctx, Y) * ctx.log(x) ** 3
        return ctx.mpf(SCALE) * inner**k

    n0 = _largest_integer_solution(n0_rhs, dps)
    n1 = _largest_integer_solution(n1_rhs, dps)
    c1 = Y**8

    def c3(n) -> Fraction:
        ctx = _context(dps)
        n = _num(ctx, n)
        value = (n / ctx.mpf(SCALE)) ** (ctx.mpf(1) / (2 * k + 2)) * (
            ctx.log(4 * A) / 4 + ctx.mpf(C3_COEFFICIENT) * _c2(ctx, Y) * ctx.log(n) ** 3
        ) ** (ctx.mpf(-1) / 2)
        return _lower(value)

    return BoundConstants(
        k=k, A=A, Y=Y, gamma=gamma, c1=c1, c2=c2_value(Y, dps),
        n0=n0, n1=n1, c4=max(c1, n1), c3=c3, dps=dps,
    )


@dataclass(frozen=True)
class SUnitConstants:
    c5: object
    c6: Fraction
    c7: Fraction


def sunit_constants(k: int, A: int, P: int, rec: TernaryRecurrence, dps: int = DEFAULT_DPS,
                    general: BoundConstants | None = None) -> SUnitConstants:
    """c7, c6 and c5 = max(c4, c6) for the S-unit equation with largest prime P."""
    if not is_prime(P):
        raise ValueError(f"P={P} is not prime")
    general = general or general_constants(k, A, rec, dps)
    ctx = _context(dps)
    c7 = (
        ctx.mpf(SCALE)
        * ctx.mpf(max(P, A)) ** (2 * k + 2)
        * (2 * _c2(ctx, rec.Y) * ctx.log(4 * A)) ** (k + 1)
    )
    e = 3 * k + 3
    c6 = ctx.mpf(2) ** e * c7 * ctx.log(c7 * ctx.mpf(e) ** e) ** e
    c6_up = _upper(c6)
    c5 = general.c4 if general.c4 >= c6_up else c6_up
    return SUnitConstants(c5=c5, c6=c6_up, c7=_upper(c7))


def all_constants(k: int, A: int, P: int, rec: TernaryRecurrence, dps: int = DEFAULT_DPS) -> BoundConstants:
    general = general_constants(k, A, rec, dps)
    su = sunit_constants(k, A, P, rec, dps, general)
    return BoundConstants(
        **{f: getattr(general, f) for f in ("k", "A", "Y", "gamma", "c1", "c2", "n0", "n1", "c4", "c3", "dps")},
        P=P, c5=su.c5, c6=su.c6, c7=su.c7,
    )


# --- valuation of u_n - t ----------------------------------------------------


def _differs_from_term(rec: TernaryRecurrence, n: int, t: int) -> bool:
    # |u_n| > n|alpha|^n / (6 Y^3) or |beta|^n / (2 Y^3) for n > Y^8; compare bit sizes
    if abs(rec.beta) > abs(rec.alpha):
        low_bits = n * (abs(rec.beta).bit_length() - 1) - (2 * rec.Y**3).bit_length()
    else:
        low_bits = (n.bit_length() - 1) + n * (abs(rec.alpha).bit_length() - 1) - (6 * rec.Y**3).bit_length()
    if abs(t).bit_length() < low_bits:
        return True
    return evaluate(rec, n) != t


def vp_un_minus_t_bound(rec: TernaryRecurrence, n: int, t: int, p: int, dps: int = DEFAULT_DPS) -> Fraction:
    """Upper bound for nu_p(u_n - t) when n > Y^8.

    c2 p log^2 n for t = 0, times log+ t = max(1, log|t|) otherwise.
    """
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if n <= rec.Y**8:
        raise PreconditionViolated("n > c1", f"need n > c1 = {rec.Y ** 8}, got {n}")
    cf = closed_form(rec)
    if rec.beta == 1 and t == cf.b:
        raise PreconditionViolated("t != b", f"t = b = {cf.b} is excluded when beta = 1")
    if rec.alpha == 1 and t == cf.a * n + cf.c:
        raise PreconditionViolated("t != an + c", "t = an + c is excluded when alpha = 1")
    if not _differs_from_term(rec, n, t):
        raise PreconditionViolated("t != u_n", f"t equals u_{n}")
    ctx = _context(dps)
    value = _c2(ctx, rec.Y) * p * ctx.log(n) ** 2
    if t != 0:
        log_t = ctx.log(abs(t))
        value *= log_t if _lower(log_t) > 1 else ctx.mpf([1, max(log_t.b, 1)])
    return _upper(value)

