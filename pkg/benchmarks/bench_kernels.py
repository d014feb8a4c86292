"""Compiled vs pure-Python kernels on the two enumeration hot loops.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

from ghzforge import kernels
from ghzforge.bell import build_bell
from ghzforge.lhv import classical_bound_exhaustive, lhv_search
from ghzforge.paradox import theorem1_instance, theorem2_vector


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = sorted(kernels.available())
    cases = [
        (f"lhv_count n={n}", lambda n=n, b=None: lhv_search(theorem1_instance(theorem2_vector(n), 2), backend=b).count)
        for n in (4, 5, 6)
    ]
    cases += [
        (
            f"bell_max n={n}",
            lambda n=n, b=None: classical_bound_exhaustive(build_bell(theorem2_vector(n)), backend=b).value,
        )
        for n in (5, 6)
    ]
    print(f"{'case':<16}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for label, fn in cases:
        row, results = [], set()
        for name in backends:
            t, result = best_of(lambda: fn(b=name), args.repeat)
            row.append(t)
            results.add(result)
        assert len(results) == 1, f"backends disagree on {label}: {results}"
        speedup = f"{row[backends.index('python')] / row[0]:.1f}x" if len(row) == 2 else "-"
        print(f"{label:<16}" + "".join(f"{t * 1e3:>12.1f}ms" for t in row) + f"{speedup:>10}")


if __name__ == "__main__":
    main()
