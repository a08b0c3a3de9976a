"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from approxlab import kernels


def workloads(rng):
    terms = 1.0 / np.arange(1, 10 ** 6 + 1) ** 1.5
    small = rng.standard_normal((12, 12))
    medium = rng.standard_normal((60, 40))
    xs = np.linspace(0.0, 1.0, 1025)
    fs = np.clip(-1 + 2 * (xs - 0.4) / 0.2, -1, 1)
    short_xs = xs[::4]
    short_fs = fs[::4]
    return {
        "cumulative_sum n=1e6": lambda b: b.cumulative_sum(terms),
        "jacobi_sweeps 12x12": lambda b: b.jacobi_sweeps(small, 1e-15, 60),
        "jacobi_sweeps 60x40": lambda b: b.jacobi_sweeps(medium, 1e-15, 60),
        "lipschitz_envelopes n=1025": lambda b: b.lipschitz_envelopes(xs, fs, 10.0),
        "pair_barrier n=257": lambda b: b.pair_barrier(short_xs, short_fs, 0.5),
    }


def best_time(func, backend, repeat):
    number = 1
    while timeit.timeit(lambda: func(backend), number=number) < 0.05 and number < 10 ** 4:
        number *= 4
    return min(timeit.repeat(lambda: func(backend), number=number, repeat=repeat)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if kernels.compiled_backend is None:
        raise SystemExit("compiled extension not built; run `python3 setup.py build_ext --inplace`")
    print(f"{'kernel':<28}{'numpy (ms)':>12}{'cython (ms)':>13}{'speedup':>10}")
    for name, func in workloads(np.random.default_rng(0)).items():
        py = best_time(func, kernels.python_backend, args.repeat) * 1e3
        cy = best_time(func, kernels.compiled_backend, args.repeat) * 1e3
        print(f"{name:<28}{py:>12.3f}{cy:>13.3f}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
