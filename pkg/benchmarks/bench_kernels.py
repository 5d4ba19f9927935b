"""Numba vs numpy timings for the hot kernels, plus an end-to-end workload.

    python benchmarks/bench_kernels.py [--repeat 20] [--json out.json]

The end-to-end row runs the quadrant-conservation workload (1000 seeded
matrices, 2-8 techniques, 10-2000 queries) in a subprocess per backend so
the ``VPRCOMP_PURE_NUMPY`` switch is honoured.
"""

import argparse
import json
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from vprcomp import _kernels

E2E = """
import time, numpy as np
from vprcomp import _kernels
from vprcomp.synth import SynthSpec, generate
from vprcomp.contingency import all_contingencies
_kernels.warmup()
rng = np.random.default_rng(1)
t0 = time.perf_counter()
for _ in range(1000):
    k = int(rng.integers(2, 9))
    spec = SynthSpec(int(rng.integers(0, 2**63)), int(rng.integers(10, 2001)),
                     tuple((f"t{i}", float(rng.random())) for i in range(k)), float(rng.uniform(-1, 1)))
    all_contingencies(generate(spec))
print(time.perf_counter() - t0)
"""


def timeit(fn, repeat):
    fn()
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def kernel_cases():
    rng = np.random.default_rng(0)
    for k, n in ((8, 2000), (8, 20000), (32, 20000)):
        table = rng.random((k, n)) < 0.5
        rows = list(range(k))
        yield f"overlap_counts k={k} n={n}", (
            lambda t=table: _kernels.overlap_counts_numpy(t),
            lambda t=table: _kernels.overlap_counts_numba(t),
        )
        yield f"union_count k={k} n={n}", (
            lambda t=table, r=rows: _kernels.union_count_numpy(t, r),
            lambda t=table, r=rows: _kernels.union_count_numba(t, r),
        )
    for n in (64, 2000, 100000):
        base = _kernels.stream_base(12345, 0)
        yield f"permutation n={n}", (
            lambda n=n: _kernels.permutation_numpy(base, n),
            lambda n=n: _kernels.permutation_numba(base, n),
        )


def end_to_end(backend):
    env = dict(os.environ, VPRCOMP_PURE_NUMPY="1" if backend == "numpy" else "0")
    out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--json", help="also write results to this file")
    args = ap.parse_args()

    if not _kernels.HAS_NUMBA:
        sys.exit("numba backend unavailable (not installed or VPRCOMP_PURE_NUMPY set)")
    _kernels.warmup()

    results = []
    for name, (np_fn, nb_fn) in kernel_cases():
        t_np = timeit(np_fn, args.repeat)
        t_nb = timeit(nb_fn, args.repeat)
        results.append({"case": name, "numpy_s": t_np, "numba_s": t_nb})
    results.append({"case": "end-to-end 1000 matrices", "numpy_s": end_to_end("numpy"),
                    "numba_s": end_to_end("numba")})

    print(f"{'case':<34} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for r in results:
        print(f"{r['case']:<34} {1e3 * r['numpy_s']:>10.3f} {1e3 * r['numba_s']:>10.3f} "
              f"{r['numpy_s'] / r['numba_s']:>7.2f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2)


if __name__ == "__main__":
    main()
