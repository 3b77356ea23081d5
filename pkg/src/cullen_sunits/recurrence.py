"""Ternary recurrences whose characteristic polynomial is (X - alpha)^2 (X - beta)
with 1 among the roots.

Such a sequence has the closed form ``u_n = (a n + c) alpha^n + b beta^n`` with
rational ``a, b, c``; everything here is exact integer/rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from mpmath import MPContext

from .errors import DegenerateRecurrence, IndexTooSmall, RatioUnit

_CROSSCHECK_TERMS = 64


@dataclass(frozen=True)
class ClosedForm:
    alpha: int
    beta: int
    a: Fraction
    b: Fraction
    c: Fraction

    def alpha_part(self, n: int) -> Fraction:
        """(a n + c) alpha^n"""
        return (self.a * n + self.c) * Fraction(self.alpha) ** n

    def beta_part(self, n: int) -> Fraction:
        """b beta^n"""
        return self.b * Fraction(self.beta) ** n


@dataclass(frozen=True)
class TernaryRecurrence:
    r1: int
    r2: int
    r3: int
    u0: int
    u1: int
    u2: int
    alpha: int
    beta: int
    Y: int
    gamma: int

    @property
    def unit_root(self) -> str:
        """Which characteristic root equals 1: ``"beta"`` or ``"alpha"``."""
        return "beta" if self.beta == 1 else "alpha"

    @property
    def coefficients(self):
        return (self.r1, self.r2, self.r3)

    @property
    def initial(self):
        return (self.u0, self.u1, self.u2)

    @cached_property
    def closed(self) -> ClosedForm:
        return closed_form(self)

    def terms(self, count: int):
        """First ``count`` terms by unrolling the recurrence."""
        out = list(self.initial[:count])
        while len(out) < count:
            out.append(self.r1 * out[-1] + self.r2 * out[-2] + self.r3 * out[-3])
        return out

    def __str__(self):
        return (
            f"u_n = {self.r1} u_(n-1) + {self.r2} u_(n-2) + {self.r3} u_(n-3), "
            f"u_0..u_2 = {self.u0}, {self.u1}, {self.u2}"
        )


def _character_roots(r1: int, r2: int, r3: int):
    """Return (alpha, beta) with f = (X - alpha)^2 (X - beta), or raise."""
    f = f"X^3 - ({r1})X^2 - ({r2})X - ({r3})"
    if 1 - r1 - r2 - r3 != 0:
        raise DegenerateRecurrence(f"{f}: 1 is not a root")
    # f = (X - 1)(X^2 + qX + s)
    q = 1 - r1
    s = 1 - r1 - r2
    disc = q * q - 4 * s
    if disc == 0:
        if q % 2:
            raise DegenerateRecurrence(f"{f}: double root {-q}/2 is not an integer")
        alpha, beta = -q // 2, 1
    elif 1 + q + s == 0:
        # quadratic factor vanishes at 1, so 1 is the double root
        alpha, beta = 1, s
    else:
        raise DegenerateRecurrence(
            f"{f} = (X - 1)(X^2 + ({q})X + ({s})) has no repeated root"
        )
    if alpha == beta or alpha == -beta:
        raise RatioUnit(f"{f}: alpha={alpha}, beta={beta} gives alpha/beta = +-1")
    return alpha, beta


def _solve_closed_form(alpha, beta, u0, u1, u2):
    # rows n = 0, 1, 2 of (a n + c) alpha^n + b beta^n, unknowns (a, c, b)
    rows = [
        [Fraction(n * alpha**n), Fraction(alpha**n), Fraction(beta**n), Fraction(u)]
        for n, u in enumerate((u0, u1, u2))
    ]
    for col in range(3):
        pivot = next(r for r in range(col, 3) if rows[r][col] != 0)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        for r in range(3):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col] / rows[col][col]
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
    a, c, b = (rows[i][3] / rows[i][i] for i in range(3))
    return a, b, c


def make_recurrence(r1: int, r2: int, r3: int, u0: int, u1: int, u2: int) -> TernaryRecurrence:
    """Validate the recurrence and populate Y, gamma and the roots.

    >>> rec = make_recurrence(5, -8, 4, 1, 3, 9)
    >>> rec.alpha, rec.beta, rec.Y
    (2, 1, 11)
    """
    if 0 in (r1, r2, r3):
        raise DegenerateRecurrence(f"coefficients must be nonzero: {(r1, r2, r3)}")
    alpha, beta = _character_roots(r1, r2, r3)
    a, b, c = _solve_closed_form(alpha, beta, u0, u1, u2)
    if a == 0:
        raise DegenerateRecurrence(
            "initial values kill the n alpha^n term (a = 0); the sequence is binary"
        )
    gamma = max(abs(alpha), abs(beta))
    if gamma < 2:
        raise RatioUnit(f"gamma = {gamma} < 2")
    Y = max(abs(r1), abs(r2), abs(r3), abs(u0), abs(u1), abs(u2), 11)
    rec = TernaryRecurrence(r1, r2, r3, u0, u1, u2, alpha, beta, Y, gamma)
    cf = ClosedForm(alpha, beta, a, b, c)
    object.__setattr__(rec, "closed", cf)  # seed the cached_property
    for n, u in enumerate(rec.terms(_CROSSCHECK_TERMS)):
        if _evaluate_closed(cf, n) != u:
            raise AssertionError(f"closed form disagrees with recurrence at n={n}")
    return rec


def cullen() -> TernaryRecurrence:
    """C_n = n 2^n + 1."""
    return make_recurrence(5, -8, 4, 1, 3, 9)


def woodall() -> TernaryRecurrence:
    """W_n = n 2^n - 1."""
    return make_recurrence(5, -8, 4, -1, 1, 7)


def closed_form(rec: TernaryRecurrence) -> ClosedForm:
    if "closed" in rec.__dict__:
        return rec.__dict__["closed"]
    a, b, c = _solve_closed_form(rec.alpha, rec.beta, rec.u0, rec.u1, rec.u2)
    return ClosedForm(rec.alpha, rec.beta, a, b, c)


def _evaluate_closed(cf: ClosedForm, n: int) -> int:
    d = math.lcm(cf.a.denominator, cf.b.denominator, cf.c.denominator)
    A = cf.a.numerator * (d // cf.a.denominator)
    B = cf.b.numerator * (d // cf.b.denominator)
    C = cf.c.numerator * (d // cf.c.denominator)
    total = (A * n + C) * cf.alpha**n + B * cf.beta**n
    q, r = divmod(total, d)
    if r:
        raise AssertionError(f"closed form is not integral at n={n}")
    return q


def evaluate(rec: TernaryRecurrence, n: int) -> int:
    """u_n via the closed form, exactly."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return _evaluate_closed(closed_form(rec), n)


def zero_index_bound(rec: TernaryRecurrence) -> int:
    """ceil(39 Y log Y); every index with u_n = 0 lies strictly below it."""
    # 39 Y log Y is irrational for Y >= 2, so the ceiling is never ambiguous
    ctx = MPContext()
    ctx.dps = 50
    return int(ctx.ceil(39 * rec.Y * ctx.log(rec.Y)))


def growth_lower_bound(rec: TernaryRecurrence, n: int) -> Fraction:
    """Exact rational strictly below |u_n|, valid for n > Y^8."""
    if n <= rec.Y**8:
        raise IndexTooSmall(f"need n > Y^8 = {rec.Y ** 8}, got n = {n}")
    y3 = rec.Y**3
    if abs(rec.beta) > abs(rec.alpha):
        return Fraction(abs(rec.beta) ** n, 2 * y3)
    return Fraction(n * abs(rec.alpha) ** n, 6 * y3)
