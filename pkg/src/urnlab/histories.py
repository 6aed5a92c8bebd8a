"""Exact enumeration of urn histories by dynamic programming.

A history of length ``n`` is a sequence of ``n`` weighted draws; its weight
is the product, over the steps, of the number of balls of the drawn color.
Because the urn is balanced, the configuration after ``n`` steps is a
function of ``(n, k)`` alone, where ``k`` counts the black draws:

    black(n, k) = a0 + alpha*n + alpha*k
    white(n, k) = b0 + (alpha+beta)*n - alpha*k

so the count of histories ending at ``(n, k)`` satisfies

    counts[n+1][k+1] += counts[n][k] * black(n, k)   (black draw)
    counts[n+1][k]   += counts[n][k] * white(n, k)   (white draw)

with ``counts[0][0] = 1``.  All arithmetic is exact big-integer; the row sum
at ``n`` equals the product of successive urn sizes.

>>> from urnlab.urn import validate_urn
>>> t = build_history_table(validate_urn(1, 1, 0, 1), 3)
>>> t.row(3)
(15, 10, 3, 0)
>>> total_histories(t.spec, 3)
28
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    CapacityExceeded,
    EmptyTail,
    OracleTooLarge,
    RowMissing,
)
from .urn import UrnSpec, validate_urn

# Default cap on estimated retained big-integer bytes; dense tables past
# n ~ 1000 for sigma = 3 blow through this, which is the point.
MEMORY_BUDGET_DEFAULT = 512 * 1024 * 1024

BRUTE_FORCE_LIMIT = 8

TABLE_SCHEMA = "urnlab.table/1"


@dataclass(frozen=True)
class HistoryPoint:
    """A (step count, black-draw count) pair with its forced configuration."""

    n: int
    k: int

    def black(self, spec: UrnSpec) -> int:
        return spec.black_count(self.n, self.k)

    def white(self, spec: UrnSpec) -> int:
        return spec.white_count(self.n, self.k)


def total_histories(spec: UrnSpec, n: int) -> int:
    """Number of histories of length n: prod_{m<n} (a0 + b0 + sigma*m)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return math.prod(spec.size_after(m) for m in range(n))


class HistoryTable:
    """Exact history counts, indexed by step n and black-draw count k.

    Rows may be retained sparsely (``kept``) when built with a ``keep``
    whitelist; ``row(n)`` raises RowMissing for rows that were not retained.
    Instances are immutable once built and safe to share between threads.
    """

    def __init__(self, spec: UrnSpec, n_max: int, rows: Mapping[int, Sequence[int]]):
        self.spec = spec
        self.n_max = n_max
        self._rows = {n: tuple(r) for n, r in rows.items()}

    @property
    def kept(self) -> tuple[int, ...]:
        return tuple(sorted(self._rows))

    @property
    def is_dense(self) -> bool:
        return self.kept == tuple(range(self.n_max + 1))

    def has_row(self, n: int) -> bool:
        return n in self._rows

    def row(self, n: int) -> tuple[int, ...]:
        try:
            return self._rows[n]
        except KeyError:
            raise RowMissing(f"row n={n} not retained (kept: {self.kept[:8]}...)") from None

    def row_total(self, n: int) -> int:
        return sum(self.row(n))

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        doc = {
            "schema": TABLE_SCHEMA,
            "spec": {
                "alpha": self.spec.alpha,
                "beta": self.spec.beta,
                "a0": self.spec.a0,
                "b0": self.spec.b0,
            },
            "n_max": self.n_max,
        }
        if self.is_dense:
            doc["rows"] = [[str(c) for c in self._rows[n]] for n in range(self.n_max + 1)]
        else:
            doc["kept"] = list(self.kept)
            doc["rows"] = [[str(c) for c in self._rows[n]] for n in self.kept]
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "HistoryTable":
        if doc.get("schema") != TABLE_SCHEMA:
            raise ValueError(f"unsupported table schema: {doc.get('schema')!r}")
        s = doc["spec"]
        spec = validate_urn(s["alpha"], s["beta"], s["a0"], s["b0"])
        kept = doc.get("kept")
        if kept is None:
            kept = list(range(doc["n_max"] + 1))
        rows = {n: tuple(int(c) for c in row) for n, row in zip(kept, doc["rows"])}
        return cls(spec, doc["n_max"], rows)

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "HistoryTable":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def _estimate_retained_bytes(spec: UrnSpec, n_max: int, kept: Iterable[int]) -> int:
    # An entry in row n is bounded by total_histories(n); estimate its size
    # from log2 of that product, plus per-object overhead.
    log2_total = 0.0
    log2_at = {}
    kept_set = set(kept)
    for m in range(n_max + 1):
        if m in kept_set:
            log2_at[m] = log2_total
        log2_total += math.log2(spec.size_after(m))
    est = 0
    for n, lg in log2_at.items():
        est += (n + 1) * (int(lg / 8) + 28)
    return est


def build_history_table(
    spec: UrnSpec,
    n_max: int,
    *,
    keep: Optional[Iterable[int]] = None,
    memory_budget: int = MEMORY_BUDGET_DEFAULT,
) -> HistoryTable:
    """Run the counting recurrence up to n_max with exact integers.

    ``keep`` whitelists the rows to retain (row n_max is always retained);
    by default every row is kept.  Raises CapacityExceeded when the retained
    rows are estimated to exceed ``memory_budget`` bytes.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if keep is None:
        kept = set(range(n_max + 1))
    else:
        kept = {int(n) for n in keep}
        bad = [n for n in kept if n < 0 or n > n_max]
        if bad:
            raise ValueError(f"keep rows out of range: {sorted(bad)}")
        kept.add(n_max)

    est = _estimate_retained_bytes(spec, n_max, kept)
    if est > memory_budget:
        raise CapacityExceeded(
            f"retained rows estimated at {est} bytes > budget {memory_budget}; "
            f"pass keep= to retain fewer rows or raise memory_budget"
        )

    rows: dict[int, tuple[int, ...]] = {}
    row = [1]
    if 0 in kept:
        rows[0] = (1,)
    for n in range(n_max):
        new = [0] * (n + 2)
        for k, c in enumerate(row):
            if c:
                new[k] += c * spec.white_count(n, k)
                new[k + 1] += c * spec.black_count(n, k)
        row = new
        if n + 1 in kept:
            rows[n + 1] = tuple(row)
    return HistoryTable(spec, n_max, rows)


def brute_force_histories(spec: UrnSpec, n: int) -> tuple[int, ...]:
    """Independent oracle: enumerate every weighted draw sequence of length n.

    Walks the binary tree of color choices, multiplying the running weight by
    the count of balls of the chosen color, and aggregates by the number of
    black draws.  Exponential in n, hence the hard cutoff.
    """
    if n > BRUTE_FORCE_LIMIT:
        raise OracleTooLarge(f"brute force capped at n <= {BRUTE_FORCE_LIMIT}, got {n}")
    if n < 0:
        raise ValueError("n must be >= 0")
    acc = [0] * (n + 1)

    def walk(step: int, k: int, weight: int) -> None:
        if step == n:
            acc[k] += weight
            return
        b = spec.black_count(step, k)
        w = spec.white_count(step, k)
        if b:
            walk(step + 1, k + 1, weight * b)
        if w:
            walk(step + 1, k, weight * w)

    walk(0, 0, 1)
    return tuple(acc)


@dataclass(frozen=True)
class ExactDistribution:
    """Probability mass of the black-ball count after n steps."""

    n: int
    masses: dict  # black count -> Fraction (or float in numeric mode)

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.masses))

    def mass_sum(self):
        return sum(self.masses.values())

    def mean(self):
        return sum(b * m for b, m in self.masses.items())

    def variance(self):
        mu = self.mean()
        return sum((b - mu) ** 2 * m for b, m in self.masses.items())

    def pgf(self, x):
        """Probability generating function sum_b P(X=b) * x**b at a point."""
        return sum(m * x**b for b, m in self.masses.items())

    def as_float(self) -> "ExactDistribution":
        return ExactDistribution(self.n, {b: float(m) for b, m in self.masses.items()})


def exact_distribution(table: HistoryTable, n: int, *, numeric: bool = False) -> ExactDistribution:
    """Distribution of the black count at step n from a table row.

    Masses are exact rationals summing to one; ``numeric=True`` converts each
    mass to float.  Only support points with nonzero counts appear.
    """
    counts = table.row(n)  # RowMissing if absent
    total = total_histories(table.spec, n)
    masses = {}
    for k, c in enumerate(counts):
        if c:
            b = table.spec.black_count(n, k)
            masses[b] = float(Fraction(c, total)) if numeric else Fraction(c, total)
    return ExactDistribution(n, masses)


def exact_moments(table: HistoryTable, n: int) -> tuple[Fraction, Fraction]:
    """Exact rational mean and variance of the black count at step n.

    Computed with integer sums over the row (single big denominator), so it
    stays cheap even when entries run to thousands of digits.
    """
    counts = table.row(n)
    total = total_histories(table.spec, n)
    s1 = 0
    s2 = 0
    for k, c in enumerate(counts):
        if c:
            b = table.spec.black_count(n, k)
            s1 += c * b
            s2 += c * b * b
    mean = Fraction(s1, total)
    var = Fraction(s2, total) - mean * mean
    return mean, var


# -- log-space backend -------------------------------------------------------
#
# Exact counts at n = 2000 run to ~6000 digits and extreme tail masses
# underflow any float; the large-deviation diagnostics therefore work with
# log-counts kept as float64 (values grow like n log n, far inside range).


class LogHistoryTable:
    """Log-space float image of the counting recurrence.

    Rows hold log(counts[n][k]) with -inf marking unreachable k; totals are
    accumulated separately so masses never need the exponentiated counts.
    """

    def __init__(self, spec: UrnSpec, n_max: int, rows: dict, log_totals: dict):
        self.spec = spec
        self.n_max = n_max
        self._rows = rows
        self._log_totals = log_totals

    @property
    def kept(self) -> tuple[int, ...]:
        return tuple(sorted(self._rows))

    def has_row(self, n: int) -> bool:
        return n in self._rows

    def log_counts(self, n: int) -> np.ndarray:
        try:
            return self._rows[n]
        except KeyError:
            raise RowMissing(f"log row n={n} not retained") from None

    def log_total(self, n: int) -> float:
        return self._log_totals[n]

    def log_masses(self, n: int) -> np.ndarray:
        return self.log_counts(n) - self.log_total(n)

    def black_values(self, n: int) -> np.ndarray:
        spec = self.spec
        k = np.arange(n + 1, dtype=np.int64)
        return spec.a0 + spec.alpha * n + spec.alpha * k

    def pgf(self, n: int, x: complex) -> complex:
        """p_n(x) = sum_k mass_k * x**black(n,k); stable for |x| = 1."""
        lm = self.log_masses(n)
        b = self.black_values(n)
        finite = np.isfinite(lm)
        return complex(np.sum(np.exp(lm[finite]) * np.power(complex(x), b[finite])))

    def log_tail(self, n: int, threshold: float, side: str) -> float:
        """log P(X_n >= threshold) for side='right', log P(X_n <= threshold) for 'left'."""
        lm = self.log_masses(n)
        b = self.black_values(n)
        if side == "right":
            sel = b >= threshold
        elif side == "left":
            sel = b <= threshold
        else:
            raise ValueError("side must be 'right' or 'left'")
        sel &= np.isfinite(lm)
        if not sel.any():
            raise EmptyTail(f"no support point with black {'>=' if side == 'right' else '<='} {threshold} at n={n}")
        chunk = lm[sel]
        m = chunk.max()
        return float(m + np.log(np.exp(chunk - m).sum()))


def build_log_table(
    spec: UrnSpec,
    n_max: int,
    *,
    keep: Optional[Iterable[int]] = None,
) -> LogHistoryTable:
    """Run the counting recurrence in log space (float64)."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if keep is None:
        kept = set(range(n_max + 1))
    else:
        kept = {int(n) for n in keep}
        bad = [n for n in kept if n < 0 or n > n_max]
        if bad:
            raise ValueError(f"keep rows out of range: {sorted(bad)}")
        kept.add(n_max)

    rows: dict[int, np.ndarray] = {}
    log_totals: dict[int, float] = {}
    row = np.zeros(1)  # log(1)
    log_total = 0.0
    if 0 in kept:
        rows[0] = row.copy()
        log_totals[0] = log_total
    alpha, beta = spec.alpha, spec.beta
    for n in range(n_max):
        k = np.arange(n + 1, dtype=np.float64)
        with np.errstate(divide="ignore"):  # log(0) = -inf marks dead transitions
            logb = np.log(spec.a0 + alpha * n + alpha * k)
            logw = np.log(spec.b0 + (alpha + beta) * n - alpha * k)
        new = np.full(n + 2, -np.inf)
        new[:-1] = row + logw
        new[1:] = np.logaddexp(new[1:], row + logb)
        row = new
        log_total += math.log(spec.size_after(n))
        if n + 1 in kept:
            rows[n + 1] = row.copy()
            log_totals[n + 1] = log_total
    return LogHistoryTable(spec, n_max, rows, log_totals)
