"""Hot counting and permutation kernels.

Every kernel exists twice: a numba ``@njit`` version and a plain numpy
version.  Both produce identical integers.  The numba path is used when numba
imports cleanly and ``VPRCOMP_PURE_NUMPY`` is unset (or ``0``); set it to
``1`` to force the numpy path.

Seeded randomness is SplitMix64 (Steele, Lea & Flood 2014).  The key for
position ``i`` of stream ``s`` under seed ``seed`` is the SplitMix64 output
for state ``seed + (s * 2**32 + i + 1) * 0x9E3779B97F4A7C15 (mod 2**64)``.
A seeded permutation of ``n`` items is the stable argsort of those keys.
"""

import os

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1

_FORCE_NUMPY = os.environ.get("VPRCOMP_PURE_NUMPY", "0") not in ("", "0")

try:
    if _FORCE_NUMPY:
        raise ImportError("numba disabled by VPRCOMP_PURE_NUMPY")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA else "numpy"


def stream_base(seed, stream):
    """Starting SplitMix64 state for ``stream`` under ``seed``, as a Python int."""
    return (int(seed) + ((int(stream) << 32) * GAMMA)) & MASK64


def mix64(state):
    """SplitMix64 finaliser on a single Python int."""
    z = state & MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


# ---------------------------------------------------------------- numpy path


def overlap_counts_numpy(table):
    a = table.astype(np.int64)
    return a @ a.T


def union_count_numpy(table, rows):
    return int(table[np.asarray(rows, dtype=np.int64)].any(axis=0).sum())


def random_keys_numpy(base, n):
    i = np.arange(1, n + 1, dtype=np.uint64)
    z = np.uint64(base) + i * np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def permutation_numpy(base, n):
    return np.argsort(random_keys_numpy(base, n), kind="stable")


# ---------------------------------------------------------------- numba path

if HAS_NUMBA:

    @njit(cache=True, nogil=True)
    def overlap_counts_numba(table):
        k, n = table.shape
        out = np.zeros((k, k), dtype=np.int64)
        for i in range(k):
            for j in range(i, k):
                c = 0
                for q in range(n):
                    if table[i, q] and table[j, q]:
                        c += 1
                out[i, j] = c
                out[j, i] = c
        return out

    @njit(cache=True, nogil=True)
    def _union_count_numba(table, rows):
        n = table.shape[1]
        covered = np.zeros(n, dtype=np.bool_)
        for r in rows:
            for q in range(n):
                covered[q] |= table[r, q]
        c = 0
        for q in range(n):
            c += covered[q]
        return c

    def union_count_numba(table, rows):
        return int(_union_count_numba(table, np.asarray(rows, dtype=np.int64)))

    @njit(cache=True, nogil=True)
    def _random_keys_numba(base, n):
        out = np.empty(n, dtype=np.uint64)
        state = base
        for i in range(n):
            state += np.uint64(GAMMA)
            z = state
            z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
            out[i] = z ^ (z >> np.uint64(31))
        return out

    def random_keys_numba(base, n):
        return _random_keys_numba(np.uint64(base), n)

    def permutation_numba(base, n):
        # numpy's stable sort beats numba's mergesort; only the keys are jitted
        return np.argsort(_random_keys_numba(np.uint64(base), n), kind="stable")

    overlap_counts = overlap_counts_numba
    union_count = union_count_numba
    random_keys = random_keys_numba
    permutation = permutation_numba
else:
    overlap_counts = overlap_counts_numpy
    union_count = union_count_numpy
    random_keys = random_keys_numpy
    permutation = permutation_numpy


def warmup():
    """Trigger JIT compilation (or cache load) so timings exclude it."""
    t = np.zeros((2, 3), dtype=np.bool_)
    overlap_counts(t)
    union_count(t, [0, 1])
    permutation(stream_base(0, 0), 3)
