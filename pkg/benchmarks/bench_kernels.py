"""Compare the numba and numpy simulation kernels.

    python benchmarks/bench_kernels.py [--steps N] [--replicas R]

Reports ns per replica-step for each backend and checks that both produce
identical rows.
"""

import argparse
import time

import numpy as np

from erwtree import _accel
from erwtree.group import make_presentation
from erwtree.kernels import simulate_block
from erwtree.rng import replica_seeds


def bench(backend, pres, p, steps, replicas, repeats):
    ck = np.array([steps // 2, steps])
    seeds = replica_seeds(1, 0, replicas)
    out = simulate_block(pres.inverse_table, 0, p, p, steps, ck, seeds[:2], backend=backend)
    best = float("inf")
    for _ in range(repeats):
        t = time.perf_counter()
        out = simulate_block(pres.inverse_table, 0, p, p, steps, ck, seeds, backend=backend)
        best = min(best, time.perf_counter() - t)
    return best * 1e9 / (steps * replicas), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--replicas", type=int, default=256)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    backends = ["numba", "numpy"] if _accel.HAVE_NUMBA else ["numpy"]
    print(f"{'group':<10} {'p':>5} " + " ".join(f"{b + ' ns/step':>16}" for b in backends)
          + "  identical")
    for groups in ((0, 4), (1, 2), (2, 0)):
        pres = make_presentation(*groups)
        for p in (0.25, 0.5, 0.9):
            res = [bench(b, pres, p, args.steps, args.replicas, args.repeats) for b in backends]
            same = all(np.array_equal(res[0][1], r[1]) for r in res[1:])
            cells = " ".join(f"{r[0]:>16.1f}" for r in res)
            print(f"{str(groups):<10} {p:>5} {cells}  {same}")


if __name__ == "__main__":
    main()
