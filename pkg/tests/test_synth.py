import hashlib
import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vprcomp.contingency import build_contingency
from vprcomp.errors import DuplicateDataset, EmptyInput, InvalidSpec
from vprcomp.outcomes import dumps_csv, load_table1
from vprcomp.synth import SynthSpec, generate, generate_collection, load_specs, table1_specs

GOLDEN_SPECS = [
    SynthSpec(42, 25, (("A", 0.6), ("B", 0.3), ("C", 0.9)), 0.25, "g1"),
    SynthSpec(7, 10, (("A", 0.5), ("B", 0.5)), None, "g2"),
]
# sha256 of the CSV for GOLDEN_SPECS; pins the generator across releases
GOLDEN_SHA = "4b2c4e337dc5941affe1c85e674de69daf74e6be1c090343391fe46c4b278057"


def golden_csv():
    return dumps_csv(generate_collection(GOLDEN_SPECS))


def test_exact_count():
    m = generate(SynthSpec(1, 100, (("A", 0.70),)))
    assert m.runs["A"].n_correct == 70


def test_perfect_agreement():
    m = generate(SynthSpec(1, 100, (("A", 0.7), ("B", 0.7)), 1.0))
    t = build_contingency(m, "A", "B")
    assert (t.T, t.W, t.X) == (0, 0, 70)


def test_perfect_disagreement():
    # forced overlap 70 + 70 - 100 = 40
    t = build_contingency(generate(SynthSpec(1, 100, (("A", 0.7), ("B", 0.7)), -1.0)), "A", "B")
    assert (t.X, t.W, t.T, t.Z) == (40, 30, 30, 0)


def test_golden_hash():
    assert hashlib.sha256(golden_csv().encode()).hexdigest() == GOLDEN_SHA


def test_small_golden_table():
    m = generate(SynthSpec(7, 10, (("A", 0.5), ("B", 0.5)), None, "g2"))
    assert m.table.astype(int).tolist() == [[1, 1, 0, 0, 0, 1, 0, 1, 1, 0], [0, 1, 1, 0, 1, 0, 0, 1, 0, 1]]


def test_numpy_fallback_is_bit_identical():
    code = (
        "import sys\n"
        "from vprcomp import _kernels\n"
        "from test_synth import golden_csv\n"
        "assert _kernels.BACKEND == 'numpy'\n"
        "sys.stdout.write(golden_csv())\n"
    )
    env = dict(os.environ, VPRCOMP_PURE_NUMPY="1", PYTHONPATH=os.path.dirname(__file__))
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout == golden_csv()


@given(
    st.integers(0, 2**64 - 1),
    st.integers(1, 300),
    st.lists(st.floats(0, 1), min_size=1, max_size=6),
    st.one_of(st.none(), st.floats(-1, 1)),
)
@settings(max_examples=80, deadline=None)
def test_exact_marginals_and_determinism(seed, n, accs, agreement):
    spec = SynthSpec(seed, n, tuple((f"t{i}", a) for i, a in enumerate(accs)), agreement)
    m1, m2 = generate(spec), generate(spec)
    assert np.array_equal(m1.table, m2.table)
    for (name, acc), row in zip(spec.techniques, m1.table):
        assert int(row.sum()) == int(np.floor(acc * n + 0.5))


@given(st.integers(0, 2**32), st.integers(1, 200), st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=80, deadline=None)
def test_agreement_extremes(seed, n, a, b):
    for agreement in (-1.0, 1.0):
        spec = SynthSpec(seed, n, (("A", a), ("B", b)), agreement)
        ca, cb = spec.target_counts
        t = build_contingency(generate(spec), "A", "B")
        expected = max(0, ca + cb - n) if agreement < 0 else min(ca, cb)
        assert t.X == expected


def test_table1_collection():
    c = generate_collection(table1_specs(3, [("A", 0.5), ("B", 0.8)]))
    assert [m.total_queries for m in c] == [200, 375, 210, 607, 191, 947, 1622, 111, 406, 32]
    assert c.names == tuple(d.name for d in load_table1())


def test_collection_errors():
    with pytest.raises(EmptyInput):
        generate_collection([])
    s = SynthSpec(1, 5, (("A", 0.5),), dataset="x")
    with pytest.raises(DuplicateDataset):
        generate_collection([s, s])


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(seed=-1, n_queries=5, techniques=(("A", 0.5),)),
        dict(seed=2**64, n_queries=5, techniques=(("A", 0.5),)),
        dict(seed=1, n_queries=0, techniques=(("A", 0.5),)),
        dict(seed=1, n_queries=5, techniques=()),
        dict(seed=1, n_queries=5, techniques=(("A", 0.5), ("A", 0.2))),
        dict(seed=1, n_queries=5, techniques=(("A", 1.5),)),
        dict(seed=1, n_queries=5, techniques=(("A", 0.5),), pairwise_agreement=2.0),
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(InvalidSpec):
        SynthSpec(**kwargs)


def test_same_seed_same_bytes():
    specs = table1_specs(11, [("A", 0.4), ("B", 0.6), ("C", 0.7)], 0.3)
    assert dumps_csv(generate_collection(specs)) == dumps_csv(generate_collection(specs))


def test_load_specs_shapes(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"n_queries": 10, "techniques": [{"name": "A", "accuracy": 0.5}], "dataset": "d"}))
    (s,) = load_specs(p, seed=5)
    assert (s.seed, s.dataset, s.techniques) == (5, "d", (("A", 0.5),))

    p.write_text(
        json.dumps(
            {
                "seed": 9,
                "datasets": [
                    {"dataset": "d1", "n_queries": 10, "techniques": {"A": 0.5, "B": 0.1}},
                    {"dataset": "d2", "n_queries": 20, "techniques": [["A", 0.2], ["B", 0.3]], "seed": 4},
                ],
            }
        )
    )
    s1, s2 = load_specs(p)
    assert s1.techniques == (("A", 0.5), ("B", 0.1)) and s2.seed == 4
    assert load_specs(p)[0].seed == s1.seed
    assert load_specs(p, seed=10)[0].seed != s1.seed


def test_load_specs_invalid(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"datasets": [{"dataset": "d"}]}))
    with pytest.raises(InvalidSpec):
        load_specs(p)
