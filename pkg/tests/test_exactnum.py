import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mechdock.exactnum import (
    EPS1,
    EPS2,
    EQ,
    GT,
    INF,
    LT,
    ONE,
    UNBOUNDED,
    ZERO,
    ExactNumError,
    ParseError,
    TieredValue,
    format_value,
    leading_ratio,
    parse_value,
    tv,
    tv_add,
    tv_compare,
    tv_scale,
)


def test_add_rationals():
    assert tv_add(tv(1), tv(Fraction(1, 2))) == tv(Fraction(3, 2))


def test_add_cancels_tiers():
    u = tv(1) - 2 * EPS1
    assert tv_add(u, EPS1) == tv(1) - EPS1


def test_add_infinity_absorbs():
    assert tv_add(INF, EPS2) == INF
    assert tv_add(tv(5), INF) == INF


def test_scale_distributes_over_tiers():
    assert tv_scale(2, tv(1) + EPS2) == tv(2) + 2 * EPS2


def test_scale_by_zero_annihilates():
    assert tv_scale(0, tv(5) - EPS1) == ZERO


def test_scale_infinity():
    assert tv_scale(Fraction(3, 2), INF) == INF
    with pytest.raises(ExactNumError):
        tv_scale(0, INF)
    with pytest.raises(ExactNumError):
        tv_scale(-1, INF)


def test_compare_tier_dominance():
    assert tv_compare(EPS1, 100 * EPS2) == GT
    assert tv_compare(tv(1) - 2 * EPS1, tv(1)) == LT
    assert tv_compare(INF, tv(10**9)) == GT


def test_compare_negative_leading():
    assert tv_compare(-EPS1, ZERO) == LT
    assert tv_compare(tv(1) - EPS1, tv(1) - 2 * EPS1) == GT


def test_leading_ratio_standard():
    assert leading_ratio(tv(2) - 2 * EPS1, ONE) == Fraction(2)
    assert leading_ratio(tv(3), tv(2)) == Fraction(3, 2)


def test_leading_ratio_tier_gap_unbounded():
    assert leading_ratio(EPS1, EPS2) is UNBOUNDED
    assert leading_ratio(INF, ONE) is UNBOUNDED


def test_leading_ratio_zero_coeff_at_leading_tier():
    # numerator has no weight at the denominator's leading tier
    assert leading_ratio(EPS2, ONE + EPS1) == 0


def test_leading_ratio_rejects_bad_denominator():
    with pytest.raises(ExactNumError):
        leading_ratio(tv(1), ZERO)
    with pytest.raises(ExactNumError):
        leading_ratio(tv(1), INF)
    with pytest.raises(ExactNumError):
        leading_ratio(tv(1), -EPS1)


def test_subtract_infinity_rejected():
    with pytest.raises(ExactNumError):
        INF - INF
    with pytest.raises(ExactNumError):
        tv(1) - INF
    assert INF - tv(1) == INF


def test_no_tiered_multiplication():
    with pytest.raises(ExactNumError):
        EPS1 * EPS2


def test_parse_examples():
    assert parse_value("1-2e1") == tv(1) - 2 * EPS1
    assert parse_value("inf") == INF
    assert parse_value("1873/1000") == tv(Fraction(1873, 1000))
    assert parse_value("0") == ZERO
    assert parse_value("-1/2e2+1e3") == TieredValue({2: Fraction(-1, 2), 3: 1})


def test_parse_unicode_minus():
    assert parse_value("1−2e1") == parse_value("1-2e1")


def test_parse_errors():
    for bad in ["", "abc", "1//2", "1/0", "1+", "e3", "1 2", "1.5"]:
        with pytest.raises(ParseError):
            parse_value(bad)


def test_format_canonical():
    assert format_value(tv(1) - 2 * EPS1) == "1-2e1"
    assert format_value(INF) == "inf"
    assert format_value(ZERO) == "0"
    assert format_value(tv(Fraction(-3, 2))) == "-3/2"
    assert format_value(EPS2 + tv(2)) == "2+1e2"


def _random_value(rng):
    coeffs = {}
    for tier in rng.sample(range(0, 6), rng.randint(1, 4)):
        num = rng.randint(-50, 50)
        den = rng.randint(1, 30)
        coeffs[tier] = Fraction(num, den)
    return TieredValue(coeffs)


def test_parse_format_roundtrip_bulk():
    rng = random.Random(20240917)
    for _ in range(1000):
        v = _random_value(rng)
        assert parse_value(format_value(v)) == v
    assert parse_value(format_value(INF)) == INF


_fractions = st.fractions(
    min_value=-(10**6), max_value=10**6, max_denominator=10**4
)
_finite_values = st.dictionaries(st.integers(0, 5), _fractions, max_size=4).map(
    TieredValue
)
_values = st.one_of(_finite_values, st.just(INF))


@given(_values, _values)
def test_order_antisymmetric(u, v):
    c, d = tv_compare(u, v), tv_compare(v, u)
    assert c == -d
    assert (c == EQ) == (u == v)


@given(_values, _values, _values)
def test_order_transitive(u, v, w):
    if tv_compare(u, v) != GT and tv_compare(v, w) != GT:
        assert tv_compare(u, w) != GT


@given(_finite_values, _finite_values)
def test_add_commutes(u, v):
    assert u + v == v + u


@given(_finite_values, _finite_values, _finite_values)
def test_add_associates(u, v, w):
    assert (u + v) + w == u + (v + w)


@given(_fractions, _finite_values, _finite_values)
def test_scale_distributes(q, u, v):
    assert tv_scale(q, u + v) == tv_scale(q, u) + tv_scale(q, v)


@given(_finite_values, _finite_values)
def test_standard_part_additive(u, v):
    assert (u + v).standard_part() == u.standard_part() + v.standard_part()
