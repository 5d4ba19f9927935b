"""Partner ranking and report emission (CSV, JSON, Markdown)."""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable

from .contingency import all_contingencies
from .errors import NoDefinedScores, NoPartners, ReportIoError, UnknownTechnique
from .metrics import BoundsSummary, MapeEstimate, bounds, complementarity, mape_pair, score_set
from .outcomes import DatasetCollection

SCHEMA_VERSION = 1
CRITERIA = ("median", "upper", "lower")
FORMATS = ("csv", "json", "markdown")
NA = "NA"

_EXT = {"csv": "csv", "json": "json", "markdown": "md"}


@dataclass(frozen=True)
class PartnerRanking:
    primary: str
    ranked: tuple[tuple[str, BoundsSummary], ...]
    criterion: str

    @property
    def secondaries(self) -> list[str]:
        return [name for name, _ in self.ranked]


def rank_partners(c: DatasetCollection, primary: str, criterion: str = "median") -> PartnerRanking:
    """Order candidate secondaries for ``primary`` by a bound, best first.

    Ties go to the alphabetically first name.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    if primary not in c.techniques:
        raise UnknownTechnique(f"technique {primary!r} not present in the collection")
    partners = sorted({t for m in c.having(primary) for t in m.runs if t != primary})
    entries = []
    for secondary in partners:
        try:
            entries.append((secondary, bounds(score_set(c, primary, secondary))))
        except NoDefinedScores:
            continue
    if not entries:
        raise NoPartners(f"no technique has a defined score with {primary!r}")
    entries.sort(key=lambda e: (-e[1].criterion(criterion), e[0]))
    return PartnerRanking(primary, tuple(entries), criterion)


# ------------------------------------------------------------------ MAPE table


def percent_tenths(covered: int, total: int) -> int:
    """100 * covered / total in tenths of a percent, rounded half up, exactly."""
    return (2000 * covered + total) // (2 * total)


def format_tenths(tenths: int) -> str:
    return f"{tenths // 10}.{tenths % 10}"


def parse_percent(cell: str) -> float | None:
    """Read a rendered percentage cell; ``"100"`` and ``"100.0"`` both work."""
    cell = cell.strip().strip("*")
    if cell in (NA, ""):
        return None
    return float(cell)


@dataclass(frozen=True)
class MapeTable:
    rows: tuple[tuple[str, str], ...]
    columns: tuple[str, ...]
    cells: tuple[tuple[MapeEstimate | None, ...], ...]

    def tenths(self, r: int, col: int) -> int | None:
        e = self.cells[r][col]
        return None if e is None else percent_tenths(e.covered, e.total)

    def text(self, r: int, col: int) -> str:
        t = self.tenths(r, col)
        return NA if t is None else format_tenths(t)

    def column_max(self, col: int) -> int | None:
        present = [t for t in (self.tenths(r, col) for r in range(len(self.rows))) if t is not None]
        return max(present) if present else None

    def is_max(self, r: int, col: int) -> bool:
        t = self.tenths(r, col)
        return t is not None and t == self.column_max(col)


def mape_table(c: DatasetCollection) -> MapeTable:
    """Pairwise achievable-performance grid: unordered pairs x datasets."""
    pairs = tuple(combinations(c.techniques, 2))
    per_dataset = [all_contingencies(m) for m in c]
    cells = tuple(
        tuple(mape_pair(tables[pair]) if pair in tables else None for tables in per_dataset) for pair in pairs
    )
    return MapeTable(pairs, c.names, cells)


# ------------------------------------------------------------------ report data


def _num(v: float | None) -> str:
    return NA if v is None else repr(float(v))


def _scores_by_dataset(c: DatasetCollection):
    """{(primary, secondary): {dataset: ComplementarityScore}} over shared datasets."""
    out: dict = {}
    for m in c:
        for pair, t in all_contingencies(m).items():
            out.setdefault(pair, {})[m.dataset] = complementarity(t)
    return out


def _all_rankings(c: DatasetCollection, criterion: str) -> list[PartnerRanking]:
    out = []
    for primary in c.techniques:
        try:
            out.append(rank_partners(c, primary, criterion))
        except NoPartners:
            continue
    return out


class _Doc:
    """One logical report rendered three ways."""

    def __init__(self, name: str, header: list[str], rows: list[list[str]], payload: dict, markdown: str):
        self.name = name
        self.header = header
        self.rows = rows
        self.payload = payload
        self.markdown = markdown

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.header)
            w.writerows(self.rows)
            return buf.getvalue()
        if fmt == "json":
            doc = {"schema_version": SCHEMA_VERSION, "report": self.name, **self.payload}
            return json.dumps(doc, indent=2) + "\n"
        return self.markdown


def _md_table(header: list[str], rows: Iterable[list[str]]) -> str:
    def esc(s):
        return str(s).replace("|", "\\|")

    lines = ["| " + " | ".join(esc(h) for h in header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(esc(x) for x in r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _complementarity_matrix(c, scores) -> _Doc:
    techs = list(c.techniques)
    rows, datasets_json, md = [], [], ["# Complementarity matrix\n"]
    for m in c:
        grid = []
        for p in techs:
            row = []
            for s in techs:
                score = scores.get((p, s), {}).get(m.dataset) if p in m.runs else None
                row.append(None if score is None else score.value)
            grid.append(row)
            rows.append([m.dataset, p] + [_num(v) for v in row])
        datasets_json.append({"dataset": m.dataset, "primaries": techs, "secondaries": techs, "values": grid})
        md.append(f"\n## {m.dataset}\n\n")
        md.append(_md_table(["primary \\ secondary"] + techs, ([p] + [_num(v) for v in r] for p, r in zip(techs, grid))))
    return _Doc(
        "complementarity_matrix",
        ["dataset", "primary"] + techs,
        rows,
        {"datasets": datasets_json},
        "".join(md),
    )


def _complementarity_chart(c, scores) -> _Doc:
    names = list(c.names)
    rows, series, md = [], [], ["# Complementarity by dataset\n"]
    for p in c.techniques:
        block = []
        for s in c.techniques:
            if s == p or (p, s) not in scores:
                continue
            values = [scores[p, s][d].value if d in scores[p, s] else None for d in names]
            block.append([s] + [_num(v) for v in values])
            rows.append([p, s] + [_num(v) for v in values])
            series.append({"primary": p, "secondary": s, "values": values})
        if block:
            md.append(f"\n## Primary: {p}\n\n")
            md.append(_md_table(["secondary"] + names, block))
    return _Doc(
        "complementarity_chart",
        ["primary", "secondary"] + names,
        rows,
        {"datasets": names, "series": series},
        "".join(md),
    )


def _bounds_chart(rankings: list[PartnerRanking], criterion: str) -> _Doc:
    header = ["primary", "rank", "secondary", "min", "median", "max", "n_datasets"]
    rows, out, md = [], [], [f"# Complementarity bounds (ranked by {criterion})\n"]
    for rk in rankings:
        block = []
        for i, (s, b) in enumerate(rk.ranked, 1):
            vals = [_num(b.lower), _num(b.median), _num(b.upper), str(b.n_datasets)]
            rows.append([rk.primary, str(i), s] + vals)
            block.append([str(i), s] + vals)
            out.append(
                {
                    "primary": rk.primary,
                    "rank": i,
                    "secondary": s,
                    "min": b.lower,
                    "median": b.median,
                    "max": b.upper,
                    "n_datasets": b.n_datasets,
                    "min_dataset": b.lower_dataset,
                    "max_dataset": b.upper_dataset,
                }
            )
        md.append(f"\n## Primary: {rk.primary}\n\n")
        md.append(_md_table(header[1:], block))
    return _Doc("bounds_chart", header, rows, {"criterion": criterion, "bounds": out}, "".join(md))


def _mape_doc(t: MapeTable) -> _Doc:
    cols = list(t.columns)
    rows, md_rows, out = [], [], []
    for r, (a, b) in enumerate(t.rows):
        rows.append([f"{a} + {b}"] + [t.text(r, j) for j in range(len(cols))])
        md_rows.append(
            [f"{a} + {b}"]
            + [f"**{t.text(r, j)}**" if t.is_max(r, j) else t.text(r, j) for j in range(len(cols))]
        )
        out.append(
            {
                "techniques": [a, b],
                "percent": [None if t.tenths(r, j) is None else t.tenths(r, j) / 10 for j in range(len(cols))],
                "covered": [None if e is None else e.covered for e in t.cells[r]],
                "total": [None if e is None else e.total for e in t.cells[r]],
                "column_max": [t.is_max(r, j) for j in range(len(cols))],
            }
        )
    md = "# Maximum achievable performance estimate (%)\n\n" + _md_table(["VPR Combinations"] + cols, md_rows)
    return _Doc("mape_table", ["VPR Combinations"] + cols, rows, {"datasets": cols, "rows": out}, md)


def build_reports(c: DatasetCollection, criterion: str = "median") -> list[_Doc]:
    scores = _scores_by_dataset(c)
    return [
        _complementarity_matrix(c, scores),
        _complementarity_chart(c, scores),
        _bounds_chart(_all_rankings(c, criterion), criterion),
        _mape_doc(mape_table(c)),
    ]


def emit_report(
    c: DatasetCollection,
    out_dir,
    formats: Iterable[str] = FORMATS,
    criterion: str = "median",
) -> list[dict]:
    """Write the four reports in each requested format; return the manifest.

    Output bytes depend only on the collection and arguments.
    """
    formats = set(formats)
    unknown = formats - set(FORMATS)
    if unknown:
        raise ValueError(f"unknown formats {sorted(unknown)}; choose from {FORMATS}")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportIoError(f"cannot create {out_dir}: {exc}") from None
    manifest = []
    for doc in build_reports(c, criterion):
        for fmt in FORMATS:
            if fmt not in formats:
                continue
            path = out_dir / f"{doc.name}.{_EXT[fmt]}"
            try:
                path.write_text(doc.render(fmt), encoding="utf-8", newline="")
            except OSError as exc:
                raise ReportIoError(f"cannot write {path}: {exc}") from None
            manifest.append({"report": doc.name, "format": fmt, "path": str(path)})
    return manifest


def read_mape_csv(path) -> tuple[list[str], dict[tuple[str, str], list[float | None]]]:
    """Load an emitted (or hand-typed) MAPE table CSV back into numbers."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = {}
        for row in reader:
            a, b = re.split(r"\s*\+\s*", row[0], maxsplit=1)
            rows[a, b] = [parse_percent(x) for x in row[1:]]
    return header[1:], rows
