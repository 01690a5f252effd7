"""Compare the numba and numpy greedy kernels on generated instances.

    python benchmarks/bench_backends.py [--repeat 20]

Prints mean wall time per local search and per egb_run for both backends,
and checks that both return the same placements.
"""

import argparse
import time

import numpy as np

from egbtt import Criterion, GenShape, egb_run, generate_instance
from egbtt import _kernels
from egbtt.grouping import sort_events

SHAPES = [
    GenShape(45, 88, 15, 9, seed=42),
    GenShape(90, 175, 29, 18, seed=42),
    GenShape(130, 274, 37, 22, seed=42),
    GenShape(273, 549, 62, 39, seed=42),
]


def timeit(fn, repeat):
    fn()  # warm-up (includes numba compilation on first call)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    print(f"{'instance':<22}{'backend':<8}{'local search':>14}{'egb_run m=n/7':>16}")
    for shape in SHAPES:
        inst = generate_instance(shape)
        order = sort_events(inst, Criterion.DURATION)
        m = max(2, inst.n // 7)
        results = {}
        for backend in _kernels.BACKENDS:
            results[backend] = _kernels.greedy_construct(order, inst.arrays, 1.0, 1.0, 1.0, backend)
            ls = timeit(lambda: _kernels.greedy_construct(order, inst.arrays, 1.0, 1.0, 1.0, backend),
                        args.repeat)
            run = timeit(lambda: egb_run(inst, m, Criterion.DURATION, backend=backend), 1)
            print(f"{inst.name:<22}{backend:<8}{ls * 1e3:>11.2f} ms{run:>14.2f} s")
        same = all(np.array_equal(a, b) for a, b in zip(results["numba"], results["numpy"]))
        print(f"{'':<22}placements identical: {same}")


if __name__ == "__main__":
    main()
