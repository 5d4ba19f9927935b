import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import matrix
from vprcomp.contingency import (
    ContingencyTable,
    all_contingencies,
    build_contingency,
    mcnemar,
    transpose,
)
from vprcomp.errors import SamePair, UnknownTechnique
from vprcomp.synth import SynthSpec, generate


def quad(t):
    return (t.X, t.W, t.T, t.Z)


def test_one_query_per_quadrant():
    t = build_contingency(matrix("toy", A=[1, 1, 0, 0], B=[1, 0, 1, 0]), "A", "B")
    assert quad(t) == (1, 1, 1, 1)
    assert t.Y == 4


def test_identical_sequences():
    bits = [1, 0, 1, 1, 0, 1]
    t = build_contingency(matrix("toy", A=bits, B=bits), "A", "B")
    assert quad(t) == (4, 0, 0, 2)


def test_living_room_conserves(data_dir):
    from vprcomp.outcomes import ingest_outcomes

    m = ingest_outcomes(data_dir / "living_room.csv")["Living-room"]
    for t in all_contingencies(m).values():
        assert t.X + t.W + t.T + t.Z == 32


def test_same_pair_and_unknown():
    m = matrix("toy", A=[1], B=[0])
    with pytest.raises(SamePair):
        build_contingency(m, "A", "A")
    with pytest.raises(UnknownTechnique):
        build_contingency(m, "A", "C")


def test_transpose_examples():
    t = ContingencyTable("d", "A", "B", 1, 1, 1, 1)
    tt = transpose(t)
    assert quad(tt) == (1, 1, 1, 1) and (tt.primary, tt.secondary) == ("B", "A")
    assert quad(transpose(ContingencyTable("d", "A", "B", 5, 3, 7, 2))) == (5, 7, 3, 2)


counts = st.integers(0, 500)
tables = st.builds(ContingencyTable, st.just("d"), st.just("A"), st.just("B"), counts, counts, counts, counts)


@given(tables)
def test_transpose_involution(t):
    assert transpose(transpose(t)) == t


@given(tables)
def test_mcnemar_transpose_invariant(t):
    assert mcnemar(t) == mcnemar(transpose(t))


@given(tables)
def test_mcnemar_flag_consistency(t):
    r = mcnemar(t)
    assert r.statistic >= 0
    if r.degenerate:
        assert r.statistic == 0 and not r.significant_at_05
    assert r.significant_at_05 == (not r.degenerate and r.statistic > 3.841)


@pytest.mark.parametrize(
    "T,W,stat,sig,degenerate",
    [(10, 2, 49 / 12, True, False), (5, 5, 0.1, False, False), (0, 0, 0.0, False, True)],
)
def test_mcnemar_hand_values(T, W, stat, sig, degenerate):
    r = mcnemar(ContingencyTable("d", "A", "B", 3, W, T, 4))
    assert r.statistic == pytest.approx(stat, abs=1e-12)
    assert (r.significant_at_05, r.degenerate, r.discordant_total) == (sig, degenerate, T + W)


@given(
    st.integers(0, 2**64 - 1),
    st.integers(1, 64),
    st.lists(st.floats(0, 1), min_size=2, max_size=5),
    st.one_of(st.none(), st.floats(-1, 1)),
)
@settings(max_examples=100, deadline=None)
def test_quadrants_match_oracle(seed, n, accs, agreement):
    spec = SynthSpec(seed, n, tuple((f"t{i}", a) for i, a in enumerate(accs)), agreement)
    m = generate(spec)
    rows = {name: m.row(name).tolist() for name in m.techniques}
    for (a, b), t in all_contingencies(m).items():
        o = oracles.classify(rows[a], rows[b])
        assert quad(t) == (o["X"], o["W"], o["T"], o["Z"])
        assert t == build_contingency(m, a, b)
        assert t == transpose(build_contingency(m, b, a))
