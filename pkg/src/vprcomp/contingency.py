"""Paired 2x2 outcome tables and the McNemar chi-squared statistic."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import _kernels
from .errors import SamePair
from .outcomes import OutcomeMatrix

# chi-squared, 1 degree of freedom, alpha = 0.05
CHI2_CRITICAL_05 = 3.841


@dataclass(frozen=True)
class ContingencyTable:
    """Joint outcomes of a primary and a secondary technique on one dataset.

    ``both_correct`` (X), ``only_primary`` (W), ``only_secondary`` (T) and
    ``both_incorrect`` (Z) partition the ``total`` (Y) queries.
    """

    dataset: str
    primary: str
    secondary: str
    both_correct: int
    only_primary: int
    only_secondary: int
    both_incorrect: int

    def __post_init__(self):
        if self.primary == self.secondary:
            raise SamePair(f"primary and secondary are both {self.primary!r}")
        counts = (self.both_correct, self.only_primary, self.only_secondary, self.both_incorrect)
        if any(c < 0 for c in counts):
            raise ValueError(f"negative quadrant count in {counts}")

    @property
    def total(self) -> int:
        return self.both_correct + self.only_primary + self.only_secondary + self.both_incorrect

    # short aliases matching the quadrant letters
    X = property(lambda self: self.both_correct)
    W = property(lambda self: self.only_primary)
    T = property(lambda self: self.only_secondary)
    Z = property(lambda self: self.both_incorrect)
    Y = property(lambda self: self.total)

    @property
    def primary_failures(self) -> int:
        return self.only_secondary + self.both_incorrect


@dataclass(frozen=True)
class McNemarResult:
    statistic: float
    discordant_total: int
    significant_at_05: bool
    degenerate: bool


def _from_counts(dataset, primary, secondary, n, c_a, c_b, both) -> ContingencyTable:
    return ContingencyTable(
        dataset,
        primary,
        secondary,
        both_correct=int(both),
        only_primary=int(c_a - both),
        only_secondary=int(c_b - both),
        both_incorrect=int(n - c_a - c_b + both),
    )


def build_contingency(m: OutcomeMatrix, primary: str, secondary: str) -> ContingencyTable:
    if primary == secondary:
        raise SamePair(f"primary and secondary are both {primary!r}")
    a = m.row(primary)
    b = m.row(secondary)
    both = int(np.count_nonzero(a & b))
    return _from_counts(
        m.dataset, primary, secondary, m.total_queries, np.count_nonzero(a), np.count_nonzero(b), both
    )


def all_contingencies(m: OutcomeMatrix) -> dict[tuple[str, str], ContingencyTable]:
    """Tables for every ordered technique pair of ``m`` from one overlap pass."""
    names = m.techniques
    overlap = _kernels.overlap_counts(m.table)
    n = m.total_queries
    out = {}
    for i, j in permutations(range(len(names)), 2):
        out[names[i], names[j]] = _from_counts(
            m.dataset, names[i], names[j], n, overlap[i, i], overlap[j, j], overlap[i, j]
        )
    return out


def transpose(t: ContingencyTable) -> ContingencyTable:
    """Swap primary and secondary roles."""
    return ContingencyTable(
        t.dataset,
        t.secondary,
        t.primary,
        both_correct=t.both_correct,
        only_primary=t.only_secondary,
        only_secondary=t.only_primary,
        both_incorrect=t.both_incorrect,
    )


def mcnemar(t: ContingencyTable) -> McNemarResult:
    """Continuity-corrected McNemar statistic ``(|T - W| - 1)**2 / (T + W)``.

    With no discordant queries the statistic is 0 and ``degenerate`` is set.
    """
    d = t.only_secondary + t.only_primary
    if d == 0:
        return McNemarResult(0.0, 0, False, True)
    stat = (abs(t.only_secondary - t.only_primary) - 1) ** 2 / d
    return McNemarResult(stat, d, stat > CHI2_CRITICAL_05, False)
