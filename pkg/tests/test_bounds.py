import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from cullen_sunits.bounds import (
    YuParams,
    all_constants,
    c2_value,
    decimal_down,
    decimal_up,
    general_constants,
    petho_bound,
    solve_log_inequality,
    sunit_constants,
    vp_un_minus_t_bound,
    yu_leading_constant,
    yu_prime_factor,
    yu_valuation_bound,
)
from cullen_sunits.errors import PreconditionViolated
from cullen_sunits.padic_core import vp
from cullen_sunits.recurrence import cullen

REC = cullen()
C1 = 11**8


def test_yu_coefficient():
    lead = yu_leading_constant(2, 1)
    assert lead <= Fraction("1.87e11")
    assert 3 * lead <= Fraction("5.61e11")
    exact = 19 * (20 * math.sqrt(3)) ** 6 * math.log(2 * math.e**5)
    assert abs(float(lead) / exact - 1) < 1e-12


def test_yu_prime_factor():
    value = yu_prime_factor(2)
    assert value >= Fraction(2) / Fraction(math.log(2)) ** 2 * Fraction(1 - 1e-15)
    assert decimal_up(value, 10) == "4.162737963"


def test_yu_params_validation():
    with pytest.raises(ValueError):
        YuParams(2, 1, 1, 1, 2, (0.1, 1.0))  # H below log 2
    with pytest.raises(ValueError):
        YuParams(2, 1, 1, 1, 4, (2, 2))
    with pytest.raises(ValueError):
        YuParams(2, 1, 1, 1, 2, (1, 1), B_star=2)
    with pytest.raises(ValueError):
        YuParams(2, 1, 1, 1, 2, (1,))


def test_yu_linear_in_heights():
    base = yu_valuation_bound(YuParams(2, 1, 1, 1, 3, (2, 5)))
    doubled = yu_valuation_bound(YuParams(2, 1, 1, 1, 3, (4, 5)))
    assert abs(doubled / base - 2) < Fraction(1, 10**40)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([7, 11, 13, 101]), st.integers(1, 3), st.integers(3, 50),
       st.floats(5, 50), st.floats(5, 50))
def test_yu_monotone(p, D, B, h1, h2):
    base = yu_valuation_bound(YuParams(2, D, 1, 1, p, (h1, h2), B))
    assert yu_valuation_bound(YuParams(2, D + 1, 1, 1, p, (h1, h2), B)) >= base
    assert yu_valuation_bound(YuParams(2, D, 1, 1, p, (h1, h2), B + 1)) >= base
    assert yu_valuation_bound(YuParams(2, D, 1, 1, p, (h1 + 1, h2), B)) >= base
    q = {7: 11, 11: 13, 13: 17, 101: 103}[p]
    assert yu_valuation_bound(YuParams(2, D, 1, 1, q, (h1, h2), B)) >= base


def test_yu_prime_factor_dips_for_small_p():
    # p / log^2 p decreases until p = e^2, so monotonicity in p starts at 7
    values = [yu_prime_factor(p) for p in (2, 3, 5, 7, 11, 13)]
    assert values[0] > values[1] > values[2] > values[3]
    assert values[3] < values[4] < values[5]


def largest_fixed_point(u, v, h, hi):
    """Bisection for the largest root of x - u - v log^h x below hi."""
    f = lambda x: x - u - v * math.log(x) ** h
    x = hi
    while x > 1 and f(x) > 0:
        x /= 1.01
    if x <= 1:
        return 1.0
    lo, up = x, min(x * 1.01, hi)
    for _ in range(200):
        mid = (lo + up) / 2
        lo, up = (mid, up) if f(mid) <= 0 else (lo, mid)
    return up


def test_petho_examples():
    b = petho_bound(2, 1, 1)
    assert abs(float(b) - 2 * (2 + 2 * math.e**2)) < 1e-9
    assert largest_fixed_point(2, 1, 1, float(b)) == pytest.approx(3.146, abs=1e-3)
    assert float(petho_bound(0, 5, 1)) == pytest.approx(4 * math.e**2, rel=1e-15)
    b = petho_bound(0, 4, 2)
    # first branch 4 (2 log 16)^2 ~ 123.0, second branch 4 (2 e^2)^2 ~ 873.57 is the max
    assert 4 * (2 * math.log(16)) ** 2 == pytest.approx(123.0, abs=0.05)
    assert float(b) == pytest.approx(4 * (2 * math.e**2) ** 2, rel=1e-12)
    assert largest_fixed_point(0, 4, 2, float(b)) < float(b)
    with pytest.raises(ValueError):
        petho_bound(-1, 1, 1)
    with pytest.raises(ValueError):
        petho_bound(1, 1, 0.5)


@settings(max_examples=300, deadline=None)
@given(st.floats(0, 100), st.floats(0.1, 100), st.floats(1, 5))
def test_petho_dominance(u, v, h):
    bound = float(petho_bound(u, v, h))
    assert largest_fixed_point(u, v, h, bound) < bound
    assert all(x - u - v * math.log(x) ** h > 0 for x in (bound, bound * 10, bound * 1e4))


def test_log_inequality_constant_rhs():
    for k in range(1, 5):
        assert solve_log_inequality(1, 10, 0, k) == 10**k - 1


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 20), st.integers(1, 50), st.integers(1, 3))
def test_log_inequality_maximal(C, D, k):
    n = solve_log_inequality(C, D, 1, k)
    ctx = mpmath.MPContext()
    ctx.dps = 60
    rhs = lambda x: C * (D + ctx.log(x) ** 3) ** k
    if n == 0:
        assert not 1 < rhs(1)
    else:
        assert n < rhs(n)
    assert not n + 1 < rhs(n + 1)
    assert solve_log_inequality(2 * C, D, 1, k) >= 2 * n


def test_c2_and_general_constants():
    c2 = c2_value(11)
    assert Fraction("1.1614e13") < c2 < Fraction("1.1615e13")
    g = general_constants(2, 1, REC)
    assert g.c1 == 214358881
    assert g.c4 == g.n1
    assert 10**40 <= g.n1 < 2 * 10**40
    rhs = lambda x: 1.45 * (math.log(8) + 10.49 * float(c2) * math.log(x) ** 3) ** 2
    assert rhs(g.n1) > g.n1
    assert rhs(10 * g.n1) < 10 * g.n1
    assert g.n0 < g.n1
    assert g.c3(Fraction(10**70)) > 38


def test_sunit_constants():
    full = all_constants(2, 1, 7, REC)
    assert 10**65 <= full.c6 <= 10**68
    assert full.c6 > 10**66  # above the working bound, reported rather than hidden
    assert full.c5 == full.c6
    assert sunit_constants(1, 1, 7, REC).c6 < full.c6
    assert sunit_constants(2, 1, 11, REC).c6 > full.c6
    names = [row[0] for row in full.table()]
    assert names == ["c1", "c2", "n0", "n1", "c4", "c7", "c6", "c5"]
    assert all(row[3] in ("exact", "up") for row in full.table())


def test_precision_never_raises_bounds():
    assert c2_value(11, dps=100) <= c2_value(11, dps=50)
    lo = all_constants(2, 1, 7, REC, dps=50)
    hi = all_constants(2, 1, 7, REC, dps=100)
    assert hi.c6 <= lo.c6 and hi.c7 <= lo.c7 and hi.n1 <= lo.n1
    assert hi.c3(10**70) >= lo.c3(10**70)


def test_decimal_rounding():
    x = Fraction(2, 3)
    assert decimal_up(x, 3) == "0.667"
    assert decimal_down(x, 3) == "0.666"
    assert decimal_up(Fraction(10**40, 3), 3) == "3.34E+39"


def test_vp_bound_example_and_errors():
    n = C1 + 1
    b = vp_un_minus_t_bound(REC, n, 0, 2)
    expected = 2 * float(c2_value(11)) * math.log(n) ** 2
    assert float(b) == pytest.approx(expected, rel=1e-12)
    assert float(b) == pytest.approx(8.548e15, rel=1e-3)
    with pytest.raises(PreconditionViolated) as err:
        vp_un_minus_t_bound(REC, C1, 0, 2)
    assert err.value.clause == "n > c1"
    with pytest.raises(PreconditionViolated) as err:
        vp_un_minus_t_bound(REC, n, 1, 3)
    assert err.value.clause == "t != b"


def vp_cullen_minus_t(n, t, p, k=64):
    while True:
        r = (n * pow(2, n, p**k) + 1 - t) % p**k
        if r:
            return vp(r, p)
        k *= 2


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 1000), st.sampled_from([2, 3]), st.integers(-5, 5).filter(lambda t: t != 1))
def test_vp_bound_desk_check(offset, p, t):
    n = C1 + offset
    assert vp_cullen_minus_t(n, t, p) < vp_un_minus_t_bound(REC, n, t, p)
