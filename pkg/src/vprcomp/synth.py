"""Deterministic synthetic outcome matrices.

Each technique gets exactly ``floor(accuracy * n_queries + 0.5)`` correct
queries; which queries is decided by seeded permutations (see
``vprcomp._kernels`` for the generator).  Technique ``j`` draws from
streams ``2j`` and ``2j + 1`` of the spec's seed.

When ``pairwise_agreement`` is set, technique ``j``'s correct set is placed
relative to technique ``j - 1``'s.  The overlap size is put at fraction
``(agreement + 1) / 2`` of the feasible range
``[max(0, c_prev + c_j - n), min(c_prev, c_j)]`` (rounded half up): -1 gives
the smallest possible overlap, +1 nests the smaller set inside the larger.
Without it, every technique is shuffled independently.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DuplicateDataset, EmptyInput, InvalidSpec
from .outcomes import DatasetCollection, OutcomeMatrix, load_table1


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    n_queries: int
    techniques: tuple[tuple[str, float], ...]
    pairwise_agreement: float | None = None
    dataset: str = "synthetic"

    def __post_init__(self):
        object.__setattr__(self, "techniques", tuple((str(n), float(a)) for n, a in self.techniques))
        _check(self)

    @property
    def target_counts(self) -> list[int]:
        return [math.floor(a * self.n_queries + 0.5) for _, a in self.techniques]


def _check(spec: SynthSpec) -> None:
    if not isinstance(spec.seed, int) or not 0 <= spec.seed <= _kernels.MASK64:
        raise InvalidSpec(f"seed must be an unsigned 64-bit integer, got {spec.seed!r}")
    if not isinstance(spec.n_queries, int) or spec.n_queries < 1:
        raise InvalidSpec(f"n_queries must be a positive integer, got {spec.n_queries!r}")
    if not spec.techniques:
        raise InvalidSpec("at least one technique is required")
    names = [n for n, _ in spec.techniques]
    if len(set(names)) != len(names) or not all(names):
        raise InvalidSpec(f"technique names must be unique and non-empty: {names}")
    for name, acc in spec.techniques:
        if not 0.0 <= acc <= 1.0:
            raise InvalidSpec(f"target accuracy of {name!r} is {acc}, outside [0, 1]")
    a = spec.pairwise_agreement
    if a is not None and not -1.0 <= a <= 1.0:
        raise InvalidSpec(f"pairwise_agreement must lie in [-1, 1], got {a}")


@lru_cache(maxsize=8)
def _ids_of_width(width: int) -> tuple[str, ...]:
    return tuple(f"q{i:0{width}d}" for i in range(10**width))


def query_ids(n: int) -> tuple[str, ...]:
    """``q0 .. q{n-1}`` zero-padded so lexical order equals numeric order."""
    width = len(str(n - 1))
    if width <= 5:
        return _ids_of_width(width)[:n]
    return tuple(f"q{i:0{width}d}" for i in range(n))


def _perm(seed, stream, n):
    return _kernels.permutation(_kernels.stream_base(seed, stream), n)


def generate_table(spec: SynthSpec) -> np.ndarray:
    n = spec.n_queries
    counts = spec.target_counts
    table = np.zeros((len(counts), n), dtype=np.bool_)
    for j, c in enumerate(counts):
        if j == 0 or spec.pairwise_agreement is None:
            table[j, _perm(spec.seed, 2 * j, n)[:c]] = True
            continue
        prev = table[j - 1]
        hits = np.flatnonzero(prev)
        misses = np.flatnonzero(~prev)
        lo = max(0, len(hits) + c - n)
        hi = min(len(hits), c)
        overlap = lo + math.floor((spec.pairwise_agreement + 1) / 2 * (hi - lo) + 0.5)
        table[j, hits[_perm(spec.seed, 2 * j, len(hits))[:overlap]]] = True
        table[j, misses[_perm(spec.seed, 2 * j + 1, len(misses))[: c - overlap]]] = True
    return table


def generate(spec: SynthSpec) -> OutcomeMatrix:
    _check(spec)
    names = [name for name, _ in spec.techniques]
    return OutcomeMatrix.from_table(spec.dataset, names, query_ids(spec.n_queries), generate_table(spec))


def generate_collection(specs: Sequence[SynthSpec]) -> DatasetCollection:
    if not specs:
        raise EmptyInput("no synthetic dataset specs given")
    names = [s.dataset for s in specs]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise DuplicateDataset(f"dataset names repeated: {dupes}")
    return DatasetCollection([generate(s) for s in specs])


def derive_seed(seed: int, index: int) -> int:
    """Independent per-dataset seed from a collection seed."""
    return _kernels.mix64(seed + (index + 1) * _kernels.GAMMA)


def table1_specs(
    seed: int,
    techniques: Sequence[tuple[str, float]],
    pairwise_agreement: float | None = None,
) -> list[SynthSpec]:
    """One spec per bundled benchmark dataset, sized by its query-image count."""
    return [
        SynthSpec(derive_seed(seed, i), info.query_images, tuple(techniques), pairwise_agreement, info.name)
        for i, info in enumerate(load_table1())
    ]


# ------------------------------------------------------------------ spec files


def _spec_from_obj(obj, seed: int, index: int) -> SynthSpec:
    if not isinstance(obj, dict):
        raise InvalidSpec(f"dataset spec {index} must be an object")
    try:
        techniques = obj["techniques"]
        if isinstance(techniques, dict):
            techniques = list(techniques.items())
        else:
            techniques = [
                (t["name"], t.get("accuracy", t.get("target_accuracy"))) if isinstance(t, dict) else tuple(t)
                for t in techniques
            ]
        return SynthSpec(
            seed=int(obj["seed"]) if "seed" in obj else derive_seed(seed, index),
            n_queries=obj["n_queries"],
            techniques=tuple(techniques),
            pairwise_agreement=obj.get("pairwise_agreement"),
            dataset=obj.get("dataset", f"synthetic{index}"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpec(f"dataset spec {index}: {exc!r}") from None


def load_specs(path, seed: int | None = None) -> list[SynthSpec]:
    """Read a JSON spec file.

    Accepted shapes: a single dataset object, a list of them, or
    ``{"seed": N, "datasets": [...]}``.  ``seed`` overrides the file's
    top-level seed; per-dataset seeds are derived from it unless given.
    A file holding a single dataset takes ``seed`` verbatim.
    """
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidSpec(f"cannot read spec file {path}: {exc}") from None
    top_seed = 0
    if isinstance(doc, dict) and "datasets" in doc:
        top_seed = doc.get("seed", 0)
        items = doc["datasets"]
    elif isinstance(doc, dict):
        items = [doc]
    else:
        items = doc
    if seed is not None:
        top_seed = seed
    if not isinstance(items, list):
        raise InvalidSpec("'datasets' must be a list")
    if len(items) == 1 and isinstance(items[0], dict) and seed is not None:
        items = [dict(items[0], seed=seed)]
    return [_spec_from_obj(o, int(top_seed), i) for i, o in enumerate(items)]
