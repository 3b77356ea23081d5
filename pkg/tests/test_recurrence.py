from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cullen_sunits.errors import DegenerateRecurrence, IndexTooSmall, RatioUnit
from cullen_sunits.recurrence import (
    closed_form,
    cullen,
    evaluate,
    growth_lower_bound,
    make_recurrence,
    woodall,
    zero_index_bound,
)

ROOT = st.integers(-9, 9).filter(lambda d: d not in (-1, 0, 1))


def test_cullen_closed_form():
    rec = cullen()
    assert (rec.alpha, rec.beta, rec.Y, rec.gamma) == (2, 1, 11, 2)
    cf = closed_form(rec)
    assert (cf.a, cf.b, cf.c) == (1, 1, 0)
    assert [evaluate(rec, n) for n in range(6)] == [n * 2**n + 1 for n in range(6)]
    assert rec.unit_root == "beta"


def test_woodall_closed_form():
    rec = woodall()
    assert evaluate(rec, 2) == 7
    assert closed_form(rec).b == -1


def test_rejections():
    with pytest.raises(DegenerateRecurrence):
        make_recurrence(1, 2, 3, 4, 5, 6)  # 1 is not a root
    with pytest.raises(DegenerateRecurrence):
        make_recurrence(2, 1, -2, 0, 1, 2)  # (X-1)(X+1)(X-2): no repeated root
    with pytest.raises(DegenerateRecurrence):
        make_recurrence(5, -8, 4, 1, 2, 4)  # a = 0, so the sequence is 2^n
    with pytest.raises(RatioUnit):
        make_recurrence(1, 1, -1, 0, 1, 2)  # (X-1)^2 (X+1)
    with pytest.raises(DegenerateRecurrence):
        make_recurrence(5, 0, 4, 1, 1, 1)


def test_alpha_one_shape():
    # (X - 1)^2 (X - 3): alpha = 1 double, beta = 3
    rec = make_recurrence(5, -7, 3, 1, 4, 12)
    assert (rec.alpha, rec.beta, rec.unit_root) == (1, 3, "alpha")
    assert rec.terms(8) == [evaluate(rec, n) for n in range(8)]


def test_zero_index_bound():
    assert zero_index_bound(cullen()) == 1029


def test_growth_bound():
    rec = cullen()
    with pytest.raises(IndexTooSmall):
        growth_lower_bound(rec, 11**8)
    n = 11**8 + 1
    bound = growth_lower_bound(rec, n)
    assert isinstance(bound, Fraction)
    # compare logs: the bound is n 2^n / (6 Y^3) < n 2^n + 1
    assert bound * 6 * 11**3 == n * 2**n


@st.composite
def recurrences(draw):
    d = draw(ROOT)
    alpha, beta = draw(st.sampled_from([(d, 1), (1, d)]))
    r1, r2, r3 = 2 * alpha + beta, -(alpha * alpha + 2 * alpha * beta), alpha * alpha * beta
    if 0 in (r1, r2, r3):
        return None
    u = draw(st.tuples(*[st.integers(-100, 100)] * 3))
    try:
        return make_recurrence(r1, r2, r3, *u)
    except DegenerateRecurrence:
        return None


@settings(max_examples=100, deadline=None)
@given(recurrences(), st.integers(0, 1000))
def test_closed_form_matches_recurrence(rec, n):
    if rec is None:
        return
    assert evaluate(rec, n) == rec.terms(n + 1)[n]
    cf = rec.closed
    assert cf.alpha_part(n) + cf.beta_part(n) == evaluate(rec, n)
