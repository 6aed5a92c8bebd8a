"""Truncated power series of the history generating function, and the
algebraic identity its slices satisfy.

For a fixed evaluation point x, the exponential generating function of
histories has z-coefficients

    c_n = (1/n!) * sum_k counts[n][k] * x**black(n, k)

and, when the urn starts as a single white ball, y(z) = sum c_n z^n is a root
of the degree-sigma polynomial

    (z - A - B) * y**sigma + B * y**alpha + A,     A = 1/sigma,
                                                   B = (x**-alpha - 1)/(alpha+beta).

The residual of that polynomial against a truncated y must vanish through the
truncation order: checked exactly for rational x, to 1e-30 in >= 50-digit
arithmetic otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import OrderExceedsTable, UnsupportedInitialConfig
from .histories import HistoryTable
from .urn import UrnSpec


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients c_0..c_order of the history EGF at a fixed x."""

    x_value: object
    order: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError("coeffs length must be order + 1")


def series_from_table(table: HistoryTable, x_value, order: int) -> TruncatedSeries:
    """Build the truncated series from exact counts.

    Exact when x_value is a Fraction or int; otherwise carried out in the
    arithmetic of x_value (mpmath or complex).
    """
    if x_value == 0:
        raise ValueError("x must be nonzero")
    if order > table.n_max:
        raise OrderExceedsTable(f"order {order} > table n_max {table.n_max}")
    if order < 0:
        raise ValueError("order must be >= 0")
    if isinstance(x_value, int):
        x_value = Fraction(x_value)
    spec = table.spec
    xa = x_value**spec.alpha
    coeffs = []
    for n in range(order + 1):
        row = table.row(n)
        # x**black(n,k) = x**(a0 + alpha*n) * (x**alpha)**k, built incrementally
        p = x_value ** (spec.a0 + spec.alpha * n)
        acc = 0 * p  # zero of the right arithmetic type
        for c in row:
            if c:
                acc += c * p
            p = p * xa
        coeffs.append(acc / math.factorial(n))
    return TruncatedSeries(x_value, order, tuple(coeffs))


@dataclass(frozen=True)
class AlgebraicEquation:
    """The polynomial (z - A - B_x) y^sigma + B_x y^alpha + A."""

    spec: UrnSpec

    @property
    def A(self) -> Fraction:
        return Fraction(1, self.spec.sigma)

    def B(self, x):
        """(x**-alpha - 1) / (alpha + beta), in the arithmetic of x."""
        if isinstance(x, int):
            x = Fraction(x)
        return (x ** (-self.spec.alpha) - 1) / (self.spec.alpha + self.spec.beta)


def _mul_trunc(a: Sequence, b: Sequence, order: int, zero):
    out = [zero] * (order + 1)
    for i in range(min(len(a), order + 1)):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(min(len(b), order + 1 - i)):
            out[i + j] += ai * b[j]
    return out


def _pow_trunc(a: Sequence, exponent: int, order: int, zero, one):
    out = [one] + [zero] * order
    for _ in range(exponent):
        out = _mul_trunc(out, a, order, zero)
    return out


def algebraic_residual(series: TruncatedSeries, eq: AlgebraicEquation) -> tuple:
    """Coefficients (through the series order) of the defining polynomial
    applied to the truncated series; every entry must vanish.

    Only valid for the single-white start; raises UnsupportedInitialConfig
    otherwise.
    """
    spec = eq.spec
    if not spec.starts_at_single_white():
        raise UnsupportedInitialConfig(
            f"the algebraic identity holds for (a0, b0) = (0, 1); got ({spec.a0}, {spec.b0})"
        )
    N = series.order
    y = list(series.coeffs)
    zero = 0 * y[0]
    one = zero + 1
    A = one / spec.sigma  # 1/sigma in the coefficient arithmetic (exact for Fraction)
    B = eq.B(series.x_value)
    y_alpha = _pow_trunc(y, spec.alpha, N, zero, one)
    y_sigma = _mul_trunc(
        y_alpha, _pow_trunc(y, spec.alpha + spec.beta, N, zero, one), N, zero
    )
    res = []
    for n in range(N + 1):
        r = zero
        if n >= 1:  # z * y^sigma shifts coefficients up by one
            r += y_sigma[n - 1]
        r -= (A + B) * y_sigma[n]
        r += B * y_alpha[n]
        if n == 0:
            r += A
        res.append(r)
    return tuple(res)


def closed_form_x1_coefficient(spec: UrnSpec, n: int) -> Fraction:
    """[z^n] of (1 - sigma*z)**(-1/sigma), exactly.

    The binomial expansion gives sigma^n * (1/sigma)(1/sigma + 1)...(1/sigma
    + n - 1)/n!, whose numerator telescopes to the integer product
    prod_{j<n} (1 + sigma*j).
    """
    if not spec.starts_at_single_white():
        raise UnsupportedInitialConfig(
            f"closed form assumes (a0, b0) = (0, 1); got ({spec.a0}, {spec.b0})"
        )
    if n < 0:
        raise ValueError("n must be >= 0")
    num = math.prod(1 + spec.sigma * j for j in range(n))
    return Fraction(num, math.factorial(n))


def x1_asymptotic_ratio(spec: UrnSpec, n: int) -> float:
    """c_n * Gamma(1/sigma) * n^(1 - 1/sigma) / sigma^n, evaluated in log space.

    Tends to 1 with an O(1/n) deviation.  log c_n is accumulated from the
    coefficient's own factors (fsum of the product logs minus log n!), so the
    ratio measures the actual coefficients, not a Stirling approximation of
    them; usable far beyond exact-arithmetic reach.
    """
    if not spec.starts_at_single_white():
        raise UnsupportedInitialConfig("asymptotic ratio assumes (a0, b0) = (0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    inv = 1.0 / spec.sigma
    log_cn = math.fsum(math.log1p(spec.sigma * j) for j in range(n)) - math.lgamma(n + 1)
    log_ratio = (
        log_cn + math.lgamma(inv) - n * math.log(spec.sigma) + (1.0 - inv) * math.log(n)
    )
    return math.exp(log_ratio)
