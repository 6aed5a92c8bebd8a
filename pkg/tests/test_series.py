"""The truncated counting series and its defining polynomial.

The exact residual check is the load-bearing one: every coefficient of
(z - A - B) y^sigma + B y^alpha + A through the truncation order must vanish
identically in rational arithmetic.
"""

import math
from fractions import Fraction

import mpmath as mp
import pytest

from urnlab import (
    AlgebraicEquation,
    OrderExceedsTable,
    TruncatedSeries,
    UnsupportedInitialConfig,
    UrnSpec,
    algebraic_residual,
    build_history_table,
    closed_form_x1_coefficient,
    series_from_table,
    x1_asymptotic_ratio,
)


def test_series_coefficients_x1(dense11):
    s = series_from_table(dense11, 1, 4)
    assert s.coeffs == (1, 1, 2, Fraction(14, 3), Fraction(35, 3))


def test_series_coefficients_x2(dense11):
    # row 2 is (3, 1): 3*2^2 + 1*2^3 = 20, then /2!
    s = series_from_table(dense11, 2, 2)
    assert s.coeffs == (Fraction(1), Fraction(2), Fraction(10))


def test_series_input_validation(dense11):
    with pytest.raises(OrderExceedsTable):
        series_from_table(dense11, 1, dense11.n_max + 1)
    with pytest.raises(ValueError):
        series_from_table(dense11, 0, 3)
    with pytest.raises(ValueError):
        series_from_table(dense11, 1, -1)


def test_truncated_series_shape_checked():
    with pytest.raises(ValueError):
        TruncatedSeries(1, 2, (1, 1))  # order 2 needs 3 coefficients


def test_equation_constants():
    eq = AlgebraicEquation(UrnSpec(1, 1, 0, 1))
    assert eq.A == Fraction(1, 3)
    assert eq.B(1) == 0
    assert eq.B(2) == Fraction(-1, 4)
    assert eq.B(Fraction(1, 2)) == Fraction(1, 2)


@pytest.mark.parametrize("x", [Fraction(1, 2), 1, 2, 3])
def test_residual_vanishes_exactly(dense11, dense32, x):
    for table in (dense11, dense32):
        eq = AlgebraicEquation(table.spec)
        series = series_from_table(table, x, 20)
        res = algebraic_residual(series, eq)
        assert len(res) == 21
        assert all(r == 0 for r in res)


def test_residual_detects_a_wrong_coefficient(dense11):
    # sanity that the check has teeth: perturb one coefficient
    eq = AlgebraicEquation(dense11.spec)
    s = series_from_table(dense11, 2, 8)
    coeffs = list(s.coeffs)
    coeffs[5] += Fraction(1, 10**9)
    bad = TruncatedSeries(s.x_value, s.order, tuple(coeffs))
    assert any(r != 0 for r in algebraic_residual(bad, eq))


def test_residual_requires_single_white_start():
    spec = UrnSpec(1, 1, 1, 1)
    table = build_history_table(spec, 5)
    series = series_from_table(table, 1, 5)
    with pytest.raises(UnsupportedInitialConfig):
        algebraic_residual(series, AlgebraicEquation(spec))


def test_residual_at_50_digit_irrational_x(dense11):
    # sqrt(2) at 60 digits; the residual floor is far below 1e-30
    with mp.workdps(60):
        x = mp.sqrt(2)
        series = series_from_table(dense11, x, 20)
        res = algebraic_residual(series, AlgebraicEquation(dense11.spec))
        worst = max(abs(r) for r in res)
        assert worst < mp.mpf("1e-30")


def test_closed_form_x1(dense11, dense32):
    # x = 1 collapses the series to (1 - sigma z)^(-1/sigma)
    for table in (dense11, dense32):
        series = series_from_table(table, 1, 20)
        for n in range(21):
            assert series.coeffs[n] == closed_form_x1_coefficient(table.spec, n)


def test_closed_form_small_values():
    spec = UrnSpec(1, 1, 0, 1)
    assert [closed_form_x1_coefficient(spec, n) for n in range(5)] == [
        1,
        1,
        2,
        Fraction(14, 3),
        Fraction(35, 3),
    ]


def test_closed_form_validation():
    with pytest.raises(UnsupportedInitialConfig):
        closed_form_x1_coefficient(UrnSpec(1, 1, 1, 0), 3)
    with pytest.raises(ValueError):
        closed_form_x1_coefficient(UrnSpec(1, 1, 0, 1), -1)


@pytest.mark.parametrize("spec", [UrnSpec(1, 1, 0, 1), UrnSpec(3, 2, 0, 1)])
@pytest.mark.parametrize("n", [100, 1000, 10000])
def test_x1_ratio_approaches_one(spec, n):
    # c_n ~ sigma^n n^(1/sigma - 1) / Gamma(1/sigma), deviation O(1/n)
    ratio = x1_asymptotic_ratio(spec, n)
    assert abs(ratio - 1.0) <= 5.0 / n


def test_x1_ratio_measures_actual_coefficient():
    # independent log of the exact Fraction via mpmath big-int logs
    spec = UrnSpec(1, 1, 0, 1)
    n = 100
    c = closed_form_x1_coefficient(spec, n)
    log_c = float(mp.log(mp.mpf(c.numerator)) - mp.log(mp.mpf(c.denominator)))
    expected = math.exp(
        log_c + math.lgamma(1 / 3) - n * math.log(3) + (2 / 3) * math.log(n)
    )
    assert x1_asymptotic_ratio(spec, n) == pytest.approx(expected, rel=1e-12)


def test_x1_ratio_validation():
    with pytest.raises(UnsupportedInitialConfig):
        x1_asymptotic_ratio(UrnSpec(1, 1, 2, 1), 10)
    with pytest.raises(ValueError):
        x1_asymptotic_ratio(UrnSpec(1, 1, 0, 1), 0)
