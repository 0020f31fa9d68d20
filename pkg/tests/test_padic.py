import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padicrd.padic import (
    PAdicCode,
    PhaseFraction,
    PrecisionError,
    ball_contains,
    character_eval,
    codes_of_level,
    digit_weight,
    fractional_part_scaled,
    padic_order,
    refine_ball,
)


def test_code_value_and_validation():
    code = PAdicCode(2, (0, 1, 1))
    assert code.value == 6
    assert code.precision == 3
    assert PAdicCode.from_int(6, 2, 3) == code
    with pytest.raises(ValueError):
        PAdicCode(4, (0, 1))  # not prime
    with pytest.raises(ValueError):
        PAdicCode(2, (0, 2))  # digit out of range
    with pytest.raises(ValueError):
        PAdicCode(2, ())


def test_padic_order_examples():
    assert padic_order(PAdicCode(2, (0, 1, 1))) == 1  # |6|_2 = 1/2
    assert padic_order(PAdicCode(3, (2, 0))) == 0  # unit digit
    assert padic_order(PAdicCode(2, (0, 0))) == math.inf


def test_ball_contains_examples():
    center = PAdicCode(2, (1, 0))
    assert ball_contains(center, 2, PAdicCode(2, (1, 0, 1)))
    assert not ball_contains(center, 1, PAdicCode(2, (0, 0)))
    assert ball_contains(center, 0, PAdicCode(2, (0, 1)))  # unit ball holds everything
    with pytest.raises(PrecisionError):
        ball_contains(PAdicCode(2, (1,)), 2, PAdicCode(2, (1, 0)))


def test_refine_ball_examples():
    out = refine_ball(PAdicCode(2, (1,)), 2)
    assert [c.digits for c in out] == [(1, 0), (1, 1)]
    assert refine_ball(PAdicCode(2, (1, 0)), 2) == [PAdicCode(2, (1, 0))]
    out3 = refine_ball(PAdicCode(3, (2,)), 2)
    assert [c.digits for c in out3] == [(2, 0), (2, 1), (2, 2)]
    with pytest.raises(ValueError):
        refine_ball(PAdicCode(2, (1, 0)), 1)


@pytest.mark.parametrize("p,N", [(2, 2), (2, 3), (3, 1), (3, 2)])
def test_refine_partitions_prefix_classes(p, N):
    # every precision-M code extending the prefix appears exactly once
    M = N + 2
    for center in codes_of_level(p, N):
        refined = refine_ball(center, M)
        assert len(refined) == p ** (M - N)
        assert len(set(c.value for c in refined)) == len(refined)
        for c in refined:
            assert c.digits[:N] == center.digits
        expected = {x.value for x in codes_of_level(p, M) if x.digits[:N] == center.digits}
        assert {c.value for c in refined} == expected


def test_ball_membership_is_a_partition():
    # for fixed r, membership classes are disjoint and exhaustive
    p, r, M = 2, 2, 3
    centers = list(codes_of_level(p, r))
    for x in codes_of_level(p, M):
        owners = [c for c in centers if ball_contains(c, r, x)]
        assert len(owners) == 1


def test_fractional_part_examples():
    assert fractional_part_scaled(PAdicCode(2, (1,)), 1, 0).as_float() == 0.5
    assert fractional_part_scaled(PAdicCode(2, (1, 0)), 1, 1).as_float() == 0.25
    # oracle: exact rational arithmetic for {j*x / p^(N+1)}
    f = fractional_part_scaled(PAdicCode(3, (2,)), 2, 0)
    oracle = Fraction(2 * 2, 3) % 1
    assert Fraction(f.numerator, f.denominator) == oracle == Fraction(1, 3)
    with pytest.raises(ValueError):
        fractional_part_scaled(PAdicCode(2, (1,)), 2, 0)  # j out of range
    with pytest.raises(PrecisionError):
        fractional_part_scaled(PAdicCode(2, (1,)), 1, 1)


@given(st.integers(0, 3**4 - 1), st.integers(0, 3**4 - 1), st.integers(1, 2), st.integers(0, 3))
def test_fractional_part_additive_in_x(a, b, j, N):
    p, prec = 3, 6
    x = PAdicCode.from_int(a, p, prec)
    y = PAdicCode.from_int(b, p, prec)
    xy = PAdicCode.from_int(a + b, p, prec)
    lhs = fractional_part_scaled(xy, j, N)
    rhs = fractional_part_scaled(x, j, N) + fractional_part_scaled(y, j, N)
    assert lhs == rhs


def test_character_quarter_turns_are_exact():
    assert character_eval(PhaseFraction(2, 0, 0)) == (1.0, 0.0)
    assert character_eval(PhaseFraction(2, 1, 1)) == (-1.0, 0.0)
    assert character_eval(PhaseFraction(2, 1, 2)) == (0.0, 1.0)
    assert character_eval(PhaseFraction(2, 3, 2)) == (0.0, -1.0)


@given(st.integers(0, 2**6 - 1), st.integers(0, 6), st.integers(0, 2**6 - 1), st.integers(0, 6))
def test_character_is_multiplicative(n1, k1, n2, k2):
    f1 = PhaseFraction(2, n1, k1)
    f2 = PhaseFraction(2, n2, k2)
    c1, s1 = character_eval(f1)
    c2, s2 = character_eval(f2)
    prod = (c1 * c2 - s1 * s2, c1 * s2 + s1 * c2)
    c3, s3 = character_eval(f1 + f2)
    assert prod[0] == pytest.approx(c3, abs=1e-12)
    assert prod[1] == pytest.approx(s3, abs=1e-12)


def test_phase_fraction_reduces():
    f = PhaseFraction(2, 4, 3)  # 4/8 -> 1/2
    assert (f.numerator, f.exponent) == (1, 1)
    assert PhaseFraction(2, 8, 3).numerator == 0  # 8/8 -> 0 mod 1
    assert PhaseFraction(2, 0, 5).exponent == 0


def test_digit_weight_separates_codes():
    values = [digit_weight(c) for c in codes_of_level(2, 3)]
    assert len(set(values)) == 8
    assert digit_weight(PAdicCode(2, (1, 0, 1))) == 0.5 + 0.125
