import csv
import json
from fractions import Fraction
from itertools import combinations

import pytest

from conftest import collection, matrix
from vprcomp.errors import NoPartners, UnknownTechnique
from vprcomp.metrics import bounds, score_set
from vprcomp.report import (
    emit_report,
    format_tenths,
    mape_table,
    parse_percent,
    percent_tenths,
    rank_partners,
    read_mape_csv,
)
from vprcomp.synth import SynthSpec, generate_collection, table1_specs

EIGHT = [(f"T{i}", 0.3 + 0.08 * i) for i in range(8)]


def partners_fixture():
    # A fails on q2..q5; B rescues 3 of 4, C rescues 1 of 4, D rescues 3 of 4
    return collection(
        matrix(
            "d",
            A=[1, 1, 0, 0, 0, 0],
            B=[0, 0, 1, 1, 1, 0],
            C=[1, 1, 1, 0, 0, 0],
            D=[0, 1, 0, 1, 1, 1],
        )
    )


def test_rank_order_and_ties():
    rk = rank_partners(partners_fixture(), "A")
    assert rk.secondaries == ["B", "D", "C"]
    assert rk.ranked[0][1].median == 0.75


def test_rank_unknown_and_no_partners():
    with pytest.raises(UnknownTechnique):
        rank_partners(partners_fixture(), "Q")
    perfect = collection(matrix("d", A=[1, 1], B=[0, 1]))
    with pytest.raises(NoPartners):
        rank_partners(perfect, "A")


@pytest.mark.parametrize("criterion", ["median", "upper", "lower"])
def test_rank_matches_sort_oracle(criterion):
    c = generate_collection(table1_specs(77, EIGHT, 0.2))
    for primary in c.techniques:
        rk = rank_partners(c, primary, criterion)
        expected = []
        for s in c.techniques:
            if s == primary:
                continue
            b = bounds(score_set(c, primary, s))
            expected.append((-getattr(b, criterion), s))
        assert rk.secondaries == [s for _, s in sorted(expected)]
        assert sorted(rk.secondaries) == sorted(set(c.techniques) - {primary})


def test_percent_rounding():
    assert format_tenths(percent_tenths(32, 32)) == "100.0"
    assert format_tenths(percent_tenths(31, 32)) == "96.9"  # 96.875 rounds up
    assert format_tenths(percent_tenths(1, 8)) == "12.5"
    assert format_tenths(percent_tenths(1, 16)) == "6.3"  # 6.25 half-up
    assert format_tenths(percent_tenths(0, 7)) == "0.0"
    assert parse_percent("100") == 100.0 and parse_percent("**88.5**") == 88.5 and parse_percent("NA") is None


def test_percent_roundtrip_within_half_step():
    # exact rationals: half-up ties sit exactly 0.05 away
    for total in range(1, 300):
        for covered in range(total + 1):
            cell = format_tenths(percent_tenths(covered, total))
            assert abs(Fraction(cell) - Fraction(100 * covered, total)) <= Fraction(1, 20)


def test_mape_table_shape_and_absent_cells():
    c = collection(matrix("d1", A=[1, 0], B=[0, 1], C=[0, 0]), matrix("d2", A=[1, 0, 0], B=[1, 1, 0]))
    t = mape_table(c)
    assert t.rows == (("A", "B"), ("A", "C"), ("B", "C"))
    assert t.columns == ("d1", "d2")
    assert [t.text(0, 0), t.text(0, 1)] == ["100.0", "66.7"]
    assert t.text(1, 1) == "NA"
    assert t.is_max(0, 0) and not t.is_max(1, 0)


def test_emit_manifest_and_files(tmp_path):
    c = collection(matrix("d", A=[1, 0, 1, 0], B=[0, 1, 1, 0]))
    manifest = emit_report(c, tmp_path, {"csv", "json", "markdown"})
    assert len(manifest) == 12
    assert {m["report"] for m in manifest} == {
        "complementarity_matrix",
        "complementarity_chart",
        "bounds_chart",
        "mape_table",
    }
    for m in manifest:
        if m["format"] == "json":
            assert json.loads(open(m["path"]).read())["schema_version"] == 1
    md = (tmp_path / "mape_table.md").read_text()
    assert "| VPR Combinations | d |" in md and "| A + B | **75.0** |" in md


def test_emit_table2_layout(tmp_path):
    c = generate_collection(table1_specs(5, EIGHT))
    emit_report(c, tmp_path, {"csv"})
    with open(tmp_path / "mape_table.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 1 + 28 and all(len(r) == 11 for r in rows)
    cols, table = read_mape_csv(tmp_path / "mape_table.csv")
    assert len(cols) == 10 and len(table) == 28
    # every emitted cell agrees with the exact ratio to within half a displayed step
    for (a, b), cells in table.items():
        for m, cell in zip(c, cells):
            rows_ = m.table[[m.index(a), m.index(b)]]
            exact = Fraction(100 * int(rows_.any(axis=0).sum()), m.total_queries)
            assert abs(Fraction(str(cell)) - exact) <= Fraction(1, 20)


def test_emit_deterministic(tmp_path):
    c = generate_collection(table1_specs(8, EIGHT[:4], -0.5))
    emit_report(c, tmp_path / "a")
    emit_report(c, tmp_path / "b")
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_absent_cells_rendered(tmp_path):
    c = collection(matrix("d1", A=[1, 0], B=[0, 1]), matrix("d2", A=[1, 0], C=[0, 1]))
    emit_report(c, tmp_path)
    chart = (tmp_path / "complementarity_chart.csv").read_text().splitlines()
    assert "A,B,1.0,NA" in chart
    doc = json.loads((tmp_path / "mape_table.json").read_text())
    ab = next(r for r in doc["rows"] if r["techniques"] == ["A", "B"])
    assert ab["percent"] == [100.0, None]


def test_rows_are_unordered_pairs():
    c = generate_collection([SynthSpec(1, 30, tuple(EIGHT[:5]), dataset="x")])
    t = mape_table(c)
    assert list(t.rows) == list(combinations(sorted(n for n, _ in EIGHT[:5]), 2))
