import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cullen_sunits.errors import CapEscalationFailed
from cullen_sunits.padic_core import DEFAULT_BASIS, INFINITY, factor_over_basis, vp
from cullen_sunits.recurrence import cullen
from cullen_sunits.search import (
    Solution,
    check_inequality_n_gt_m1,
    classify_degenerate,
    cullen_number,
    scan_nu11_case,
    scan_valuation,
    solve_cullen,
    woodall_check,
)

CF = cullen().closed

# every tuple with n <= 476 among the published solutions
PUBLISHED = {
    (1, 1, 1, 1), (2, 1, 1, 7), (2, 2, 1, 6), (2, 2, 2, 5), (2, 3, 1, 2), (2, 3, 2, 1),
    (3, 2, 2, 21), (3, 3, 1, 18), (4, 1, 1, 63), (4, 4, 1, 40), (4, 4, 3, 35), (5, 4, 2, 135),
    (5, 5, 1, 40), (5, 5, 3, 35), (6, 3, 1, 378), (6, 4, 1, 360), (7, 6, 2, 175), (8, 6, 3, 1323),
    (9, 6, 1, 3888),
}


def make(n, m1, m2, s):
    return Solution(n, (m1, m2), s, factor_over_basis(s))


def test_smallest_case():
    sols = solve_cullen(1, 1)
    assert [s.key for s in sols] == [(1, 1, 1, 1)]
    assert sols[0].degenerate


def test_solutions_are_sorted_and_consistent():
    sols = solve_cullen(60, 20)
    assert [(s.n, s.ms) for s in sols] == sorted((s.n, s.ms) for s in sols)
    for s in sols:
        assert cullen_number(s.n) == sum(math.factorial(m) for m in s.ms) + s.s
        assert s.s_factorization.is_unit
        assert s.ms[0] >= s.ms[1] >= 1


@pytest.mark.slow
def test_completeness_up_to_476():
    assert {s.key for s in solve_cullen(476, 56, DEFAULT_BASIS)} == PUBLISHED


def test_classify_examples():
    deg, wit = classify_degenerate(make(2, 3, 2, 1), CF)
    assert deg and (wit.j1, wit.j2, wit.matched) == (1, 2, "alpha-part")
    deg, wit = classify_degenerate(make(9, 6, 1, 3888), CF)
    assert deg and (wit.j1, wit.j2, wit.matched) == (2, 2, "beta-part")
    assert classify_degenerate(make(4, 4, 3, 35), CF) == (False, None)


def test_classify_is_exact():
    # parts are Fractions and compared without floats
    assert isinstance(CF.alpha_part(50), Fraction)
    big = make(200, 100, 1, 1)  # not a real solution, only exercises big values
    assert classify_degenerate(big, CF)[0]  # 1! = b beta^n


def test_inequality_gate():
    assert check_inequality_n_gt_m1(7, 6)
    assert not check_inequality_n_gt_m1(10, 12)
    assert math.factorial(12) > 10 * 2**10
    with pytest.raises(ValueError):
        check_inequality_n_gt_m1(5, 5)


def test_scan_small_range():
    res = scan_valuation(3, n_lo=1, n_hi=10)
    assert res.max_valuation == 2 and res.argmax == (2,)
    assert max(vp(n * 2**n + 1, 3) for n in range(1, 11)) == 2


@pytest.mark.parametrize("t", [0, 1, 2, 25])
@pytest.mark.parametrize("p", [3, 5, 7])
def test_scan_matches_brute_force(p, t):
    builder = lambda n: t
    res = scan_valuation(p, builder, 1, 2000, threshold=3)
    direct = {n: vp(cullen_number(n) - t, p) for n in range(1, 2001)}
    assert list(res.zeros) == [n for n, v in direct.items() if v == INFINITY]  # C_3 = 25
    direct = {n: v for n, v in direct.items() if v != INFINITY}
    best = max(direct.values())
    assert res.max_valuation == best
    assert list(res.argmax) == [n for n, v in direct.items() if v == best]
    assert list(res.hits) == [n for n, v in direct.items() if v >= 3]


def test_scan_escalation_and_zeros():
    # a small cap forces escalation (3 -> 6 -> 12) but the answer is unchanged
    assert scan_valuation(3, n_lo=1, n_hi=3000, v_cap=3).max_valuation == \
        max(vp(cullen_number(n), 3) for n in range(1, 3001))
    # cap 1 escalates only to 4, and nu_3(C_373) = 5
    with pytest.raises(CapEscalationFailed):
        scan_valuation(3, n_lo=1, n_hi=500, v_cap=1)
    # t(n) = C_n makes every value an exact zero
    res = scan_valuation(5, cullen_number, 1, 20)
    assert res.zeros == tuple(range(1, 21))
    assert res.max_valuation == INFINITY
    # t(n) = C_n - 3^40 at n = 7 needs more than two doublings of a cap of 2
    with pytest.raises(CapEscalationFailed) as err:
        scan_valuation(3, lambda n: cullen_number(n) - 3**40, 7, 7, v_cap=2)
    assert err.value.n == 7


def test_scan_blocks_and_jobs_agree():
    a = scan_valuation(5, n_lo=1, n_hi=40000)
    b = scan_valuation(5, n_lo=1, n_hi=40000, jobs=2)
    assert a == b


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3000), st.integers(0, 500), st.sampled_from([3, 5, 7, 11]))
def test_scan_any_window(lo, width, p):
    res = scan_valuation(p, n_lo=lo, n_hi=lo + width)
    assert res.max_valuation == max(vp(cullen_number(n), p) for n in range(lo, lo + width + 1))


def test_nu11_small_range():
    assert scan_nu11_case(201, 300) == ([], [])
    with pytest.raises(ValueError):
        scan_nu11_case(100, 300)


def test_nu11_matches_direct_computation():
    # the hits near 36483 agree with an exact big-integer computation
    l11, _ = scan_nu11_case(36400, 36600)
    direct = []
    for n in range(36400, 36601):
        c = cullen_number(n)
        f = factor_over_basis(c)
        s = c // f.cofactor
        if vp(c - s, 11) >= 4:
            direct.append(n)
    assert l11 == direct == [36483]


def test_woodall():
    assert woodall_check(100) == [(2, 6)]
    with pytest.raises(ValueError):
        woodall_check(10**6)


def test_solution_json():
    payload = make(8, 6, 3, 1323).to_json()
    assert payload == {"n": "8", "m": ["6", "3"], "s": "1323",
                       "sFactorization": {"2": "0", "3": "3", "5": "0", "7": "2"},
                       "degenerate": False, "witness": None}
