"""Outcome data model, file ingestion and structural validation.

An outcome is a ground-truth-adjudicated boolean: did the technique retrieve
the right reference image for this query?  Whether "right" allows a frame
tolerance is decided upstream; this module only sees the boolean.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateDataset,
    DuplicateQuery,
    EmptyInput,
    ParseError,
    RaggedMatrix,
    UnknownTechnique,
    VprCompError,
)

CSV_HEADER = ("dataset", "technique", "query_id", "correct")


@dataclass(frozen=True)
class QueryOutcome:
    query_id: str
    correct: bool

    def __post_init__(self):
        if not self.query_id:
            raise ParseError("query_id must be non-empty")


def _readonly_bool(values) -> np.ndarray:
    arr = np.array(values, dtype=np.bool_)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TechniqueRun:
    """One technique's outcome column over one dataset.

    Stored column-wise (ids plus a read-only bool array); ``outcomes``
    materialises :class:`QueryOutcome` objects on demand.
    """

    technique: str
    query_ids: tuple[str, ...]
    correct: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "query_ids", tuple(self.query_ids))
        object.__setattr__(self, "correct", _readonly_bool(self.correct))
        if self.correct.ndim != 1 or len(self.correct) != len(self.query_ids):
            raise ValueError("query_ids and correct must have equal length")

    @classmethod
    def from_outcomes(cls, technique: str, outcomes: Iterable[QueryOutcome]) -> "TechniqueRun":
        outcomes = list(outcomes)
        return cls(technique, tuple(o.query_id for o in outcomes), [o.correct for o in outcomes])

    @property
    def outcomes(self) -> tuple[QueryOutcome, ...]:
        return tuple(QueryOutcome(q, bool(c)) for q, c in zip(self.query_ids, self.correct))

    @property
    def n_correct(self) -> int:
        return int(np.count_nonzero(self.correct))

    def __len__(self):
        return len(self.query_ids)

    def __eq__(self, other):
        if not isinstance(other, TechniqueRun):
            return NotImplemented
        return (
            self.technique == other.technique
            and self.query_ids == other.query_ids
            and np.array_equal(self.correct, other.correct)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class OutcomeMatrix:
    """All technique runs over one dataset.

    ``table`` is the aligned ``(technique, query)`` boolean grid, keyed by
    query_id rather than file position.  It raises when the runs are not
    aligned; use :func:`validate_collection` to list problems instead.
    """

    dataset: str
    total_queries: int
    runs: Mapping[str, TechniqueRun] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "runs", MappingProxyType(dict(self.runs)))

    @classmethod
    def from_table(
        cls,
        dataset: str,
        techniques: Sequence[str],
        query_ids: Sequence[str],
        table,
    ) -> "OutcomeMatrix":
        """Build directly from an aligned grid, skipping the alignment pass."""
        query_ids = tuple(query_ids)
        table = _readonly_bool(table)
        if table.shape != (len(techniques), len(query_ids)):
            raise ValueError(f"table shape {table.shape} does not match names")
        runs = {t: TechniqueRun(t, query_ids, table[i]) for i, t in enumerate(techniques)}
        m = cls(dataset, len(query_ids), runs)
        m.__dict__["_aligned"] = (query_ids, table)
        return m

    @property
    def techniques(self) -> tuple[str, ...]:
        return tuple(self.runs)

    @cached_property
    def _aligned(self):
        if not self.runs:
            raise RaggedMatrix(f"dataset {self.dataset!r} has no technique runs")
        runs = list(self.runs.values())
        ids = tuple(sorted(runs[0].query_ids))
        if len(set(ids)) != len(ids):
            raise DuplicateQuery(f"dataset {self.dataset!r}: duplicate query_id in {runs[0].technique!r}")
        if len(ids) != self.total_queries:
            raise RaggedMatrix(
                f"dataset {self.dataset!r}: technique {runs[0].technique!r} has "
                f"{len(ids)} outcomes, expected {self.total_queries}"
            )
        pos = {q: i for i, q in enumerate(ids)}
        table = np.zeros((len(runs), len(ids)), dtype=np.bool_)
        for r, run in enumerate(runs):
            if run.query_ids == ids:
                table[r] = run.correct
                continue
            if len(run.query_ids) != len(ids) or len(set(run.query_ids)) != len(ids):
                raise RaggedMatrix(f"dataset {self.dataset!r}: technique {run.technique!r} is not aligned")
            try:
                idx = np.fromiter((pos[q] for q in run.query_ids), dtype=np.int64, count=len(ids))
            except KeyError as exc:
                raise RaggedMatrix(
                    f"dataset {self.dataset!r}: technique {run.technique!r} has unexpected query {exc.args[0]!r}"
                ) from None
            table[r, idx] = run.correct
        table.setflags(write=False)
        return ids, table

    @property
    def query_ids(self) -> tuple[str, ...]:
        return self._aligned[0]

    @property
    def table(self) -> np.ndarray:
        return self._aligned[1]

    def index(self, technique: str) -> int:
        try:
            return self.techniques.index(technique)
        except ValueError:
            raise UnknownTechnique(f"technique {technique!r} not present in dataset {self.dataset!r}") from None

    def row(self, technique: str) -> np.ndarray:
        return self.table[self.index(technique)]

    def __contains__(self, technique):
        return technique in self.runs


@dataclass(frozen=True, eq=False)
class DatasetCollection:
    matrices: tuple[OutcomeMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "matrices", tuple(self.matrices))

    def __iter__(self) -> Iterator[OutcomeMatrix]:
        return iter(self.matrices)

    def __len__(self):
        return len(self.matrices)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(m.dataset for m in self.matrices)

    def __getitem__(self, dataset: str) -> OutcomeMatrix:
        for m in self.matrices:
            if m.dataset == dataset:
                return m
        raise KeyError(dataset)

    @property
    def techniques(self) -> tuple[str, ...]:
        """Every technique name in the collection, sorted."""
        return tuple(sorted({t for m in self.matrices for t in m.runs}))

    def having(self, *techniques: str) -> list[OutcomeMatrix]:
        """Matrices (in collection order) where all ``techniques`` ran."""
        return [m for m in self.matrices if all(t in m.runs for t in techniques)]


def technique_performance(m: OutcomeMatrix, technique: str) -> float:
    """Fraction of the dataset's queries the technique matched correctly."""
    if technique not in m.runs:
        raise UnknownTechnique(f"technique {technique!r} not present in dataset {m.dataset!r}")
    return m.runs[technique].n_correct / m.total_queries


# ------------------------------------------------------------------ validation


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    dataset: str | None = None
    technique: str | None = None
    query_id: str | None = None

    def __str__(self):
        ctx = ",".join(
            f"{k}={v}"
            for k, v in (("dataset", self.dataset), ("technique", self.technique), ("query_id", self.query_id))
            if v is not None
        )
        return f"{self.code}[{ctx}]: {self.message}" if ctx else f"{self.code}: {self.message}"


_CODE_TO_ERROR = {
    "EMPTY_INPUT": EmptyInput,
    "DUPLICATE_DATASET": DuplicateDataset,
    "DUPLICATE_QUERY": DuplicateQuery,
    "RAGGED_MATRIX": RaggedMatrix,
    "EMPTY_QUERY_ID": ParseError,
    "EMPTY_RUN": RaggedMatrix,
    "QUERY_COUNT_MISMATCH": RaggedMatrix,
}


def validate_collection(c: DatasetCollection, check_table1: bool = False) -> list[Violation]:
    """List every structural invariant violation in ``c``.  Never raises."""
    out: list[Violation] = []
    if not c.matrices:
        return [Violation("EMPTY_INPUT", "collection contains no datasets")]
    seen = set()
    for m in c.matrices:
        if m.dataset in seen:
            out.append(Violation("DUPLICATE_DATASET", "dataset name appears more than once", m.dataset))
        seen.add(m.dataset)
        out.extend(_validate_matrix(m))
    if check_table1:
        out.extend(_check_table1(c))
    return out


def _validate_matrix(m: OutcomeMatrix) -> list[Violation]:
    out = []
    if m.total_queries < 1:
        out.append(Violation("EMPTY_INPUT", f"total_queries is {m.total_queries}", m.dataset))
    reference = set()
    for run in m.runs.values():
        reference.update(run.query_ids)
    for name, run in m.runs.items():
        if len(run) == 0:
            out.append(Violation("EMPTY_RUN", "technique has no outcomes", m.dataset, name))
            continue
        if "" in run.query_ids:
            out.append(Violation("EMPTY_QUERY_ID", "empty query_id", m.dataset, name, ""))
        first: dict[str, bool] = {}
        for q, v in zip(run.query_ids, run.correct):
            if q in first:
                kind = "conflicting outcomes" if first[q] != bool(v) else "repeated outcome"
                out.append(Violation("DUPLICATE_QUERY", kind, m.dataset, name, q))
            else:
                first[q] = bool(v)
        ids = set(first)
        if len(run) != m.total_queries or ids != reference:
            missing = len(reference - ids)
            out.append(
                Violation(
                    "RAGGED_MATRIX",
                    f"{len(run)} outcomes for {m.total_queries} queries; {missing} query_id(s) missing",
                    m.dataset,
                    name,
                )
            )
    return out


# ------------------------------------------------------------------ Table 1


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    environment: str
    query_images: int
    ref_images: int
    viewpoint_variation: str
    conditional_variation: str
    aliases: tuple[str, ...] = ()


def _norm(name: str) -> str:
    return re.sub(r"[^0-9a-z]", "", name.lower())


def load_table1() -> tuple[DatasetInfo, ...]:
    """The bundled benchmark-dataset metadata (ten VPR datasets)."""
    text = resources.files("vprcomp").joinpath("data/table1.csv").read_text(encoding="utf-8")
    rows = []
    for r in csv.DictReader(io.StringIO(text)):
        rows.append(
            DatasetInfo(
                name=r["name"],
                environment=r["environment"],
                query_images=int(r["query_images"]),
                ref_images=int(r["ref_images"]),
                viewpoint_variation=r["viewpoint_variation"],
                conditional_variation=r["conditional_variation"],
                aliases=tuple(a for a in r["aliases"].split(";") if a),
            )
        )
    return tuple(rows)


def lookup_table1(dataset: str) -> DatasetInfo | None:
    key = _norm(dataset)
    for info in load_table1():
        if key in {_norm(n) for n in (info.name, *info.aliases)}:
            return info
    return None


def _check_table1(c: DatasetCollection) -> list[Violation]:
    out = []
    for m in c.matrices:
        info = lookup_table1(m.dataset)
        if info is not None and info.query_images != m.total_queries:
            out.append(
                Violation(
                    "QUERY_COUNT_MISMATCH",
                    f"{m.total_queries} queries, reference metadata for {info.name} lists {info.query_images}",
                    m.dataset,
                )
            )
    return out


# ------------------------------------------------------------------ ingestion


def _parse_bit(raw: str, where: str) -> bool:
    if raw == "1":
        return True
    if raw == "0":
        return False
    raise ParseError(f"{where}: correct must be 0 or 1, got {raw!r}")


def _records_from_csv(text: str) -> Iterator[tuple[str, str, str, bool]]:
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyInput("CSV input is empty") from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise ParseError(f"line 1: header must be {','.join(CSV_HEADER)!r}, got {','.join(header)!r}")
    for row in reader:
        where = f"line {reader.line_num}"
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(f"{where}: expected 4 fields, got {len(row)}")
        dataset, technique, query_id, correct = row
        for label, value in (("dataset", dataset), ("technique", technique), ("query_id", query_id)):
            if not value:
                raise ParseError(f"{where}: empty {label}")
        yield dataset, technique, query_id, _parse_bit(correct, where)


def _records_from_json(text: str) -> Iterator[tuple[str, str, str, bool]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise ParseError("JSON top level must be a list")
    for i, obj in enumerate(doc):
        where = f"item {i}"
        if not isinstance(obj, dict):
            raise ParseError(f"{where}: expected an object")
        dataset, technique, outcomes = obj.get("dataset"), obj.get("technique"), obj.get("outcomes")
        if not isinstance(dataset, str) or not dataset:
            raise ParseError(f"{where}: 'dataset' must be a non-empty string")
        if not isinstance(technique, str) or not technique:
            raise ParseError(f"{where}: 'technique' must be a non-empty string")
        if not isinstance(outcomes, list):
            raise ParseError(f"{where}: 'outcomes' must be a list")
        for j, o in enumerate(outcomes):
            if not isinstance(o, dict):
                raise ParseError(f"{where}.outcomes[{j}]: expected an object")
            q, v = o.get("query_id"), o.get("correct")
            if not isinstance(q, str) or not q:
                raise ParseError(f"{where}.outcomes[{j}]: 'query_id' must be a non-empty string")
            if not isinstance(v, bool):
                raise ParseError(f"{where}.outcomes[{j}]: 'correct' must be a boolean")
            yield dataset, technique, q, v


def collection_from_records(records: Iterable[tuple[str, str, str, bool]]) -> DatasetCollection:
    """Group flat records into a collection without enforcing alignment.

    Datasets, techniques and query_ids are sorted, so record order never
    matters.  Duplicates are kept for :func:`validate_collection` to report.
    """
    grouped: dict[str, dict[str, list[tuple[str, bool]]]] = {}
    for dataset, technique, query_id, correct in records:
        grouped.setdefault(dataset, {}).setdefault(technique, []).append((query_id, correct))
    if not grouped:
        raise EmptyInput("input contains no outcome records")
    matrices = []
    for dataset in sorted(grouped):
        runs = {}
        ids = set()
        for technique in sorted(grouped[dataset]):
            pairs = sorted(grouped[dataset][technique])
            ids.update(q for q, _ in pairs)
            runs[technique] = TechniqueRun(technique, [q for q, _ in pairs], [v for _, v in pairs])
        matrices.append(OutcomeMatrix(dataset, len(ids), runs))
    return DatasetCollection(matrices)


def _detect_format(path: Path) -> str:
    return "json" if path.suffix.lower() == ".json" else "csv"


def load_collection(path, format: str | None = None) -> DatasetCollection:
    """Parse an outcome file leniently: syntax is checked, structure is not."""
    path = Path(path)
    fmt = format or _detect_format(path)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except FileNotFoundError:
        raise ParseError(f"no such file: {path}") from None
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 ({exc})") from None
    if not text.strip():
        raise EmptyInput(f"{path} is empty")
    if fmt == "csv":
        return collection_from_records(_records_from_csv(text))
    if fmt == "json":
        return collection_from_records(_records_from_json(text))
    raise ParseError(f"unknown format {fmt!r}")


def raise_first(violations: Sequence[Violation]) -> None:
    if violations:
        v = violations[0]
        raise _CODE_TO_ERROR.get(v.code, VprCompError)(str(v))


def ingest_outcomes(path, format: str | None = None) -> DatasetCollection:
    """Load an outcome file and reject it unless every invariant holds."""
    c = load_collection(path, format)
    raise_first(validate_collection(c))
    return c


# ------------------------------------------------------------------ writers


def dumps_csv(c: DatasetCollection) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for m in c:
        for name, run in m.runs.items():
            for q, v in zip(run.query_ids, run.correct):
                w.writerow((m.dataset, name, q, int(v)))
    return buf.getvalue()


def dumps_json(c: DatasetCollection) -> str:
    doc = [
        {
            "dataset": m.dataset,
            "technique": name,
            "outcomes": [{"query_id": q, "correct": bool(v)} for q, v in zip(run.query_ids, run.correct)],
        }
        for m in c
        for name, run in m.runs.items()
    ]
    return json.dumps(doc, indent=1) + "\n"


def write_collection(c: DatasetCollection, path, format: str | None = None) -> Path:
    path = Path(path)
    fmt = format or _detect_format(path)
    text = dumps_json(c) if fmt == "json" else dumps_csv(c)
    path.write_text(text, encoding="utf-8", newline="")
    return path
