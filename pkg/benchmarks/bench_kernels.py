"""Compare the numba and numpy kernels on the same candidate block.

    python benchmarks/bench_kernels.py [--n 2000] [--repeat 3]
"""
import argparse
import random
import time

import numpy as np

from doubleoctics import kernels
from doubleoctics.counting import TableStack, build_all_tables, default_cache_dir, load_tables
from doubleoctics.matcher import target_residues
from doubleoctics.newforms import default_twists, eta_table


def _stack():
    try:
        return TableStack(load_tables(default_cache_dir()))
    except FileNotFoundError:
        return TableStack(build_all_tables())


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000, help="candidates per block")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    cands = np.array([[rng.randint(-20, 20) if rng.random() < 0.2 else 0 for _ in range(15)]
                      for _ in range(args.n)], dtype=np.int64)
    cands[~cands.any(axis=1), 0] = 1
    stack = _stack()
    arrays = stack.arrays()
    targets = target_residues(eta_table(), default_twists())
    print(f"{args.n} candidates, {stack.entries} aggregates, {len(targets)} (form, twist) rows")

    rows = [("counts", "numpy", lambda: kernels.counts_numpy(cands, *arrays)),
            ("scan", "numpy", lambda: kernels.scan_numpy(cands, *arrays, targets, 4, True))]
    if kernels.HAVE_NUMBA:
        kernels.counts_numba(cands[:2], *arrays)
        kernels.scan_numba(cands[:2], *arrays, targets, 4, True)
        rows += [("counts", "numba", lambda: kernels.counts_numba(cands, *arrays)),
                 ("scan", "numba", lambda: kernels.scan_numba(cands, *arrays, targets, 4, True))]

    results = {}
    for kind, backend, fn in rows:
        secs, out = _best(fn, args.repeat)
        results[kind, backend] = out
        print(f"{kind:6s} {backend:6s} {secs:8.3f}s {args.n / secs:12.0f} cand/s")
    for kind in ("counts", "scan"):
        if (kind, "numba") in results:
            assert np.array_equal(results[kind, "numba"], results[kind, "numpy"]), kind
    print("backends agree")


if __name__ == "__main__":
    main()
