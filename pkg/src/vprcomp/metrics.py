"""Complementarity scores, cross-dataset bounds and achievable-performance estimates.

All ratios are taken from integer counts with a single division.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Sequence

from . import _kernels
from .contingency import ContingencyTable, build_contingency
from .errors import (
    DuplicateTechnique,
    EmptyScoreSet,
    NoDefinedScores,
    UndefinedComplementarity,
    UnknownTechnique,
)
from .outcomes import DatasetCollection, OutcomeMatrix

IDENTITY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ComplementarityScore:
    """How much of the primary's failure set the secondary recovers.

    ``value`` is None when the primary never fails on the dataset.
    """

    dataset: str
    primary: str
    secondary: str
    value: float | None
    failures_of_primary: int
    rescued: int

    @property
    def defined(self) -> bool:
        return self.failures_of_primary > 0


@dataclass(frozen=True)
class ScoreSet:
    primary: str
    secondary: str
    scores: tuple[ComplementarityScore, ...]

    @property
    def values(self) -> list[float]:
        return [s.value for s in self.scores]

    def __len__(self):
        return len(self.scores)


@dataclass(frozen=True)
class BoundsSummary:
    primary: str
    secondary: str
    upper: float
    lower: float
    median: float
    n_datasets: int
    # first dataset, in collection order, attaining the bound
    upper_dataset: str | None = None
    lower_dataset: str | None = None

    def criterion(self, name: str) -> float:
        return {"median": self.median, "upper": self.upper, "lower": self.lower}[name]


@dataclass(frozen=True)
class MapeEstimate:
    dataset: str
    techniques: tuple[str, ...]
    covered: int
    total: int

    @property
    def value(self) -> float:
        return self.covered / self.total


def complementarity(t: ContingencyTable) -> ComplementarityScore:
    m = t.only_secondary + t.both_incorrect
    value = t.only_secondary / m if m > 0 else None
    return ComplementarityScore(t.dataset, t.primary, t.secondary, value, m, t.only_secondary)


def score_set(c: DatasetCollection, primary: str, secondary: str) -> ScoreSet:
    """Defined complementarity scores of ``secondary`` with ``primary``, one per shared dataset."""
    known = c.techniques
    for name in (primary, secondary):
        if name not in known:
            raise UnknownTechnique(f"technique {name!r} not present in the collection")
    scores = []
    for m in c.having(primary, secondary):
        s = complementarity(build_contingency(m, primary, secondary))
        if s.defined:
            scores.append(s)
    if not scores:
        raise NoDefinedScores(f"no dataset gives a defined score for {secondary!r} with {primary!r}")
    return ScoreSet(primary, secondary, tuple(scores))


def bounds(s: ScoreSet) -> BoundsSummary:
    if not s.scores:
        raise EmptyScoreSet(f"empty score set for {s.secondary!r} with {s.primary!r}")
    values = s.values
    upper, lower = max(values), min(values)
    return BoundsSummary(
        s.primary,
        s.secondary,
        upper=upper,
        lower=lower,
        median=statistics.median(values),
        n_datasets=len(values),
        upper_dataset=s.scores[values.index(upper)].dataset,
        lower_dataset=s.scores[values.index(lower)].dataset,
    )


def mape_pair(t: ContingencyTable) -> MapeEstimate:
    covered = t.only_secondary + t.only_primary + t.both_correct
    return MapeEstimate(t.dataset, (t.primary, t.secondary), covered, t.total)


def mape_k(m: OutcomeMatrix, techniques: Sequence[str]) -> MapeEstimate:
    """Share of queries matched by at least one of ``techniques``.

    Generalises the pairwise estimate to any number of techniques (k >= 2)
    through the union of per-technique success sets.
    """
    techniques = tuple(techniques)
    if len(techniques) < 2:
        raise ValueError("mape_k needs at least two techniques")
    if len(set(techniques)) != len(techniques):
        raise DuplicateTechnique(f"repeated technique in {techniques}")
    rows = [m.index(t) for t in techniques]
    return MapeEstimate(m.dataset, techniques, _kernels.union_count(m.table, rows), m.total_queries)


def mape_identity_check(t: ContingencyTable) -> float:
    """Residual between the pairwise estimate and perf_A + CBA * (1 - perf_A)."""
    score = complementarity(t)
    if not score.defined:
        raise UndefinedComplementarity(f"{t.primary!r} never fails on {t.dataset!r}")
    perf_a = (t.only_primary + t.both_correct) / t.total
    return abs(mape_pair(t).value - (perf_a + score.value * (1 - perf_a)))
