"""Statistical kernel: 2x2 chi-squared tests, FDR control, binomial tails.

All tests operate on article-incidence counts. A contingency table pairs two
document groups (rows) against with-term / without-term (columns):

        with term   without term
    group 1    a          b
    group 2    c          d

The chi-squared statistic uses the closed product form
N*(ad - bc)^2 / ((a+b)(c+d)(a+c)(b+d)); with continuity correction the
numerator difference becomes max(|ad - bc| - N/2, 0). Under the "auto"
policy the correction is applied exactly when any expected cell count
falls below 5.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ConfigError, DataError, DegenerateTableError

POLICIES = ("auto", "always", "never")


class Direction(Enum):
    """Which row is overrepresented in the with-term column."""

    GROUP1 = "group1"
    GROUP2 = "group2"
    NONE = "none"

    def flipped(self) -> "Direction":
        if self is Direction.GROUP1:
            return Direction.GROUP2
        if self is Direction.GROUP2:
            return Direction.GROUP1
        return self


@dataclass(frozen=True)
class ContingencyTable:
    a: int  # group 1, with term
    b: int  # group 1, without term
    c: int  # group 2, with term
    d: int  # group 2, without term

    def __post_init__(self):
        for cell in (self.a, self.b, self.c, self.d):
            if not isinstance(cell, int) or cell < 0:
                raise DataError(f"table cells must be non-negative integers, got {cell!r}")

    @property
    def n(self) -> int:
        return self.a + self.b + self.c + self.d

    @property
    def margins(self) -> tuple[int, int, int, int]:
        """(row 1, row 2, with-term column, without-term column) totals."""
        return (self.a + self.b, self.c + self.d, self.a + self.c, self.b + self.d)

    @property
    def degenerate(self) -> bool:
        return any(m == 0 for m in self.margins)

    def expected(self) -> tuple[float, float, float, float]:
        """Expected cell counts (a, b, c, d) under independence."""
        r1, r2, cw, co = self.margins
        n = self.n
        return (r1 * cw / n, r1 * co / n, r2 * cw / n, r2 * co / n)

    def swapped(self) -> "ContingencyTable":
        """The same table with the two groups exchanged."""
        return ContingencyTable(self.c, self.d, self.a, self.b)


@dataclass(frozen=True)
class AssociationScore:
    term: str
    table: ContingencyTable
    chi2: float
    direction: Direction
    p_value: float
    correction_applied: bool


def chi_square_2x2(table: ContingencyTable, policy: str = "auto",
                   term: str = "") -> AssociationScore:
    """Score a 2x2 table; `policy` picks the continuity-correction rule.

    "never" computes the plain statistic, "always" applies the correction
    unconditionally, and "auto" applies it only when some expected count
    is below 5. Degenerate tables (an empty margin) are refused.
    """
    if policy not in POLICIES:
        raise ConfigError(f"unknown correction policy {policy!r}; expected one of {POLICIES}")
    if table.degenerate:
        raise DegenerateTableError(f"degenerate table {table}: empty margin")

    r1, r2, cw, co = table.margins
    n = table.n
    diff = table.a * table.d - table.b * table.c
    corrected = policy == "always" or (policy == "auto" and min(table.expected()) < 5)
    if corrected:
        num = max(abs(diff) - n / 2, 0.0)
        chi2 = n * num * num / (r1 * r2 * cw * co)
    else:
        chi2 = n * diff * diff / (r1 * r2 * cw * co)

    # Compare a against its expectation exactly: a*n vs row1*col_with.
    lhs, rhs = table.a * n, r1 * cw
    if lhs > rhs:
        direction = Direction.GROUP1
    elif lhs < rhs:
        direction = Direction.GROUP2
    else:
        direction = Direction.NONE

    return AssociationScore(term, table, chi2, direction, chi_square_pvalue(chi2), corrected)


def chi_square_pvalue(chi2: float) -> float:
    """Upper-tail probability of the chi-squared distribution with one df.

    For one degree of freedom the survival function reduces to
    erfc(sqrt(x/2)), which equals the two-sided normal tail at sqrt(x).
    """
    if not math.isfinite(chi2) or chi2 < 0:
        raise DataError(f"chi-squared statistic must be finite and non-negative, got {chi2!r}")
    return math.erfc(math.sqrt(chi2 / 2.0))


def benjamini_hochberg(p_values: list[float], alpha: float) -> list[int]:
    """Step-up false-discovery-rate control.

    Sorts the p-values ascending, finds the largest k with
    p_(k) <= k * alpha / m, and rejects the k smallest. Returns the
    original indices of the rejected hypotheses, sorted ascending.
    """
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha!r}")
    m = len(p_values)
    if m == 0:
        raise DataError("p-value list is empty")
    for p in p_values:
        if not (isinstance(p, (int, float)) and 0.0 <= p <= 1.0):
            raise DataError(f"p-values must lie in [0, 1], got {p!r}")

    order = sorted(range(m), key=lambda i: (p_values[i], i))
    k = 0
    for rank, idx in enumerate(order, start=1):
        if p_values[idx] <= rank * alpha / m:
            k = rank
    return sorted(order[:k])


def binomial_tail(n: int, p: float, t: int) -> float:
    """P(X >= t) for X ~ Binomial(n, p), summed in log space.

    Each term's log-probability comes from lgamma, and the sum is
    exponentiated around its maximum so that very small tails keep
    close to full relative precision.
    """
    if not isinstance(n, int) or n < 0:
        raise DataError(f"n must be a non-negative integer, got {n!r}")
    if not isinstance(t, int) or not 0 <= t <= n:
        raise DataError(f"t must be an integer in [0, n], got {t!r}")
    if not 0.0 <= p <= 1.0:
        raise DataError(f"p must lie in [0, 1], got {p!r}")

    if t == 0:
        return 1.0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0

    lp, lq = math.log(p), math.log1p(-p)
    lognck = math.lgamma(n + 1)
    logs = [
        lognck - math.lgamma(k + 1) - math.lgamma(n - k + 1) + k * lp + (n - k) * lq
        for k in range(t, n + 1)
    ]
    peak = max(logs)
    return math.exp(peak) * math.fsum(math.exp(x - peak) for x in logs)


@dataclass(frozen=True)
class BinomialModel:
    """Null model for cross-field tally significance.

    n trials (fields analyzed), per-field hit probability p (list size over
    eligible vocabulary), threshold t (minimum fields), the eligible
    vocabulary size for the union bound, and the mean number of field
    categories per article for the overlap adjustment.
    """

    n: int
    p: float
    t: int
    vocab_size: int
    overlap: float = 2.2

    def __post_init__(self):
        if self.n < 1:
            raise DataError(f"model needs at least one trial, got n={self.n}")
        if not 0.0 < self.p < 1.0:
            raise DataError(f"hit probability must lie strictly in (0, 1), got {self.p!r}")
        if not 0 <= self.t <= self.n:
            raise DataError(f"threshold t={self.t} outside [0, {self.n}]")
        if self.vocab_size < 1:
            raise DataError(f"vocabulary size must be positive, got {self.vocab_size}")
        if self.overlap < 1.0:
            raise DataError(f"overlap must be at least 1, got {self.overlap!r}")


def tally_union_bound(model: BinomialModel, adjusted: bool = False) -> float:
    """Probability bound that any eligible term reaches the tally threshold.

    Bounds the family-wise chance by vocab_size times the per-term tail,
    capped at 1. The adjusted variant deflates trials and threshold by the
    overlap factor (articles appear in several field categories at once,
    so per-field hits are not independent).
    """
    if adjusted:
        n = round(model.n / model.overlap)
        t = round(model.t / model.overlap)
    else:
        n, t = model.n, model.t
    tail = binomial_tail(n, model.p, t)
    return min(1.0, model.vocab_size * tail)
