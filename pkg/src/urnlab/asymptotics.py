"""Limit-law parameters and the error metrics that test them.

Everything here is the second half of a comparison: closed-form predictions
(Gaussian parameters mu and nu^2, the quasi-power form of the probability
generating function, the large-deviation rate W) on one side, and exact
distributions out of the history DP on the other.  The functions return
scalar error metrics so the n-scaling of each law can be measured directly.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

from .errors import EmptyTail, OutOfInterval
from .histories import HistoryTable, LogHistoryTable
from .urn import UrnSpec

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _phi_cdf(t: float) -> float:
    """Standard normal CDF via erfc; absolute accuracy ~1e-16."""
    return 0.5 * math.erfc(-t / SQRT2)


def _phi_density(t: float) -> float:
    return INV_SQRT_2PI * math.exp(-0.5 * t * t)


@dataclass(frozen=True)
class LimitParams:
    """Gaussian limit parameters: (X_n - mu*n)/(nu*sqrt(n)) -> N(0,1)."""

    mu: Fraction
    nu2: Fraction
    sigma: int

    def __post_init__(self):
        if self.mu <= 0 or self.nu2 <= 0:
            raise ValueError("limit parameters must be positive")

    @property
    def nu(self) -> float:
        return math.sqrt(self.nu2)


def limit_params(spec: UrnSpec) -> LimitParams:
    """Exact rational mu = a(2a+b)/(a+b) and nu^2 = a^3(2a+b)/(a+b)^2.

    >>> limit_params(UrnSpec(1, 1, 0, 1))
    LimitParams(mu=Fraction(3, 2), nu2=Fraction(3, 4), sigma=3)
    """
    a, b = spec.alpha, spec.beta
    return LimitParams(
        mu=Fraction(a * (2 * a + b), a + b),
        nu2=Fraction(a**3 * (2 * a + b), (a + b) ** 2),
        sigma=spec.sigma,
    )


def mean_variance_expansion(spec: UrnSpec, n: int, sign: int = -1) -> tuple[float, float]:
    """Second-order mean and first-order variance predictions.

    mean ~ mu*n + sign * (a/(a+b)) * Gamma(1/sigma)/Gamma((a+1)/sigma) * n^(a/sigma)
           + a/(a+b)
    var  ~ nu2*n

    The sign of the n^(a/sigma) correction is configurable because the two
    natural conventions disagree; -1 is the default, which matches the exact
    DP moments for a single-white-ball start.
    """
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    if n < 0:
        raise ValueError("n must be >= 0")
    a, b = spec.alpha, spec.beta
    sigma = spec.sigma
    params = limit_params(spec)
    coeff = (a / (a + b)) * math.gamma(1.0 / sigma) / math.gamma((a + 1.0) / sigma)
    mean = float(params.mu) * n + sign * coeff * n ** (a / sigma) + a / (a + b)
    variance = float(params.nu2) * n
    return mean, variance


def mean_correction_coefficient(spec: UrnSpec) -> float:
    """Magnitude of the n^(a/sigma) mean-correction coefficient (~0.98917 for A(1,1))."""
    a, b = spec.alpha, spec.beta
    return (a / (a + b)) * math.gamma(1.0 / spec.sigma) / math.gamma((a + 1.0) / spec.sigma)


def quasi_power_pn(
    params: LimitParams,
    x: Union[float, complex, None] = None,
    n: int = 1,
    *,
    u: float | None = None,
) -> complex:
    """Predicted probability generating function value p_n(x).

    p_n(x) ~ (x^mu * exp((nu2/2) * ln(x)^2))^n.  Passing u instead of x
    evaluates the scaled form at x = e^(i*u/sqrt(n)), which collapses to
    exp(i*mu*u*sqrt(n) - nu2*u^2/2): the modulus exp(-nu2*u^2/2) carries no
    n-dependence at all.
    """
    if (x is None) == (u is None):
        raise ValueError("pass exactly one of x or u")
    mu, nu2 = float(params.mu), float(params.nu2)
    if u is not None:
        return cmath.exp(1j * mu * u * math.sqrt(n) - 0.5 * nu2 * u * u)
    if x == 0:
        raise ValueError("x must be nonzero")
    lx = cmath.log(x)
    return cmath.exp(n * (mu * lx + 0.5 * nu2 * lx * lx))


def quasi_power_modulus(params: LimitParams, u: float) -> float:
    """|p_n(e^(i*u/sqrt(n)))| prediction: exp(-nu2*u^2/2), independent of n."""
    return math.exp(-0.5 * float(params.nu2) * u * u)


def _support_blacks(table: HistoryTable, n: int) -> tuple[list[int], list[int], int]:
    """Black-ball counts, per-count history counts, and the row total."""
    spec = table.spec
    row = table.row(n)
    total = table.row_total(n)
    blacks = [spec.black_count(n, k) for k in range(len(row))]
    return blacks, list(row), total


def gaussian_cdf_error(table: HistoryTable, params: LimitParams, n: int) -> float:
    """Kolmogorov distance between the normalized exact law and N(0,1).

    The sup of |F_n(t) - Phi(t)| over all t is attained at the jump points
    of the step function F_n, comparing Phi against both the left limit and
    the value at each jump.
    """
    blacks, counts, total = _support_blacks(table, n)
    mu_n = float(params.mu) * n
    scale = params.nu * math.sqrt(n)
    worst = 0.0
    cum = 0
    for black, count in zip(blacks, counts):
        if count == 0:
            continue
        t = (black - mu_n) / scale
        phi = _phi_cdf(t)
        below = cum / total  # left limit: P(X_n < black)
        cum += count
        at = cum / total  # P(X_n <= black)
        worst = max(worst, abs(below - phi), abs(at - phi))
    return worst


def local_limit_error(table: HistoryTable, params: LimitParams, n: int) -> float:
    """Sup-norm distance between the lattice-normalized masses and the
    standard normal density.

    X_n lives on a lattice of span alpha, so each mass is compared as a
    density estimate mass * nu*sqrt(n)/alpha at its own normalized abscissa.
    One lattice step beyond each end of the support the mass is zero while
    the density is not; those two points are included in the sup.
    """
    spec = table.spec
    blacks, counts, total = _support_blacks(table, n)
    mu_n = float(params.mu) * n
    scale = params.nu * math.sqrt(n)
    cell = spec.alpha / scale
    worst = 0.0
    for black, count in zip(blacks, counts):
        t = (black - mu_n) / scale
        density = (count / total) / cell
        worst = max(worst, abs(density - _phi_density(t)))
    for t_outside in (
        (blacks[0] - spec.alpha - mu_n) / scale,
        (blacks[-1] + spec.alpha - mu_n) / scale,
    ):
        worst = max(worst, _phi_density(t_outside))
    return worst


@dataclass(frozen=True)
class RateFunction:
    """Large-deviation data on [x0, x1] = [xi, 2-xi] for xi in (0, 1).

    chi(x) = x^mu * exp((nu2/2) ln(x)^2) is the per-step growth factor of
    the probability generating function; the admissible deviation interval
    [t0, t1] is the image of [x0, x1] under x -> x * chi'(x)/chi(x).
    """

    params: LimitParams
    xi: float

    def __post_init__(self):
        if not 0.0 < self.xi < 1.0:
            raise ValueError("xi must lie in (0, 1)")

    @property
    def x0(self) -> float:
        return self.xi

    @property
    def x1(self) -> float:
        return 2.0 - self.xi

    @property
    def t0(self) -> float:
        return float(self.params.mu) + float(self.params.nu2) * math.log(self.x0)

    @property
    def t1(self) -> float:
        return float(self.params.mu) + float(self.params.nu2) * math.log(self.x1)

    def chi(self, x: float) -> float:
        lx = math.log(x)
        return math.exp(float(self.params.mu) * lx + 0.5 * float(self.params.nu2) * lx * lx)


GOLDEN_XTOL = 1e-12


def _golden_min(f: Callable[[float], float], lo: float, hi: float, xtol: float) -> float:
    """Golden-section minimum of a unimodal f on [lo, hi]; returns f at the midpoint."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - inv_phi * (hi - lo)
    d = lo + inv_phi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > xtol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - inv_phi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv_phi * (hi - lo)
            fd = f(d)
    mid = 0.5 * (lo + hi)
    return f(mid)


def rate_function_eval(rf: RateFunction, t: float) -> float:
    """W(t) = -min over [x0, x1] of log(chi(x)/x^t), for t in [t0, t1].

    The objective (mu - t) ln x + (nu2/2) ln(x)^2 is convex in ln x, so the
    bracketed golden-section search is exact up to its x-tolerance; when the
    stationary point ln x = (t - mu)/nu2 is interior this equals the closed
    form (t - mu)^2 / (2 nu2).
    """
    if not rf.t0 <= t <= rf.t1:
        raise OutOfInterval(f"t={t} outside [{rf.t0}, {rf.t1}]")
    mu, nu2 = float(rf.params.mu), float(rf.params.nu2)

    def f(x: float) -> float:
        lx = math.log(x)
        return (mu - t) * lx + 0.5 * nu2 * lx * lx

    # f(1) = 0 always and 1 is inside the bracket, so the true minimum is
    # <= 0; folding that known candidate in pins W(mu) to exactly 0.
    fmin = min(_golden_min(f, rf.x0, rf.x1, GOLDEN_XTOL), 0.0)
    return 0.0 if fmin == 0.0 else -fmin


def rate_function_closed_form(rf: RateFunction, t: float) -> float | None:
    """(t-mu)^2/(2 nu2) when the stationary point is interior, else None."""
    mu, nu2 = float(rf.params.mu), float(rf.params.nu2)
    lx_star = (t - mu) / nu2
    if math.log(rf.x0) <= lx_star <= math.log(rf.x1):
        return (t - mu) ** 2 / (2.0 * nu2)
    return None


def empirical_tail_exponent(
    table: Union[HistoryTable, LogHistoryTable],
    params: LimitParams,
    n: int,
    t: float,
) -> float:
    """-(1/n) * log of the exact tail mass P(X_n >= t*n) (or <= for t < mu).

    Works from either the exact big-integer table or the log-space one; in
    both cases the log is taken before any underflow can occur.  At t = mu
    the (right) tail mass is Theta(1), so the exponent tends to 0.
    """
    threshold = t * n
    side = "right" if t >= float(params.mu) else "left"
    if isinstance(table, LogHistoryTable):
        return -table.log_tail(n, threshold, side) / n
    spec = table.spec
    row = table.row(n)
    total = table.row_total(n)
    if side == "right":
        tail = sum(c for k, c in enumerate(row) if spec.black_count(n, k) >= threshold)
    else:
        tail = sum(c for k, c in enumerate(row) if spec.black_count(n, k) <= threshold)
    if tail == 0:
        raise EmptyTail(f"no support at or beyond t*n={threshold} on the {side} side")
    return -(math.log(tail) - math.log(total)) / n


def error_ladder(
    metric: Callable[[int], float], ns: Sequence[int]
) -> list[tuple[int, float, float]]:
    """Rows (n, metric(n), metric(n)*sqrt(n)) — the shape used to check O(1/sqrt(n)) rates."""
    rows = []
    for n in ns:
        e = metric(n)
        rows.append((n, e, e * math.sqrt(n)))
    return rows
