"""Benchmark: compiled kernels vs. the pure-NumPy fallback.

Times the two hot log-density kernels on representative workload shapes
(estimator builds and batch scoring) and prints a comparison table.

    python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from sigdist import _kernels_py

try:
    from sigdist import _kernels as compiled
except ImportError:
    compiled = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def kde_case(rng, n_queries, n_train, dim):
    queries = np.ascontiguousarray(rng.normal(size=(n_queries, dim)))
    train = np.ascontiguousarray(rng.normal(size=(n_train, dim)))
    inv_bw = np.ascontiguousarray(np.full(dim, 1.0 / 0.4))
    label = f"kde      n={n_queries:<7} m={n_train:<6} d={dim}"
    return label, (queries, train, inv_bw, -2.5), "kde_log_density"


def mixture_case(rng, n_queries, components, dim):
    queries = np.ascontiguousarray(rng.normal(size=(n_queries, dim)))
    means = np.ascontiguousarray(rng.normal(size=(components, dim)))
    chol = np.tril(rng.normal(size=(components, dim, dim))) + 3.0 * np.eye(dim)
    chol_inv = np.ascontiguousarray([np.linalg.inv(c) for c in chol])
    log_w = np.full(components, -np.log(components))
    label = f"mixture  n={n_queries:<7} k={components:<6} d={dim}"
    return label, (queries, means, chol_inv, np.ascontiguousarray(log_w)), "mixture_log_density"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5, help="best-of repetitions")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    cases = [
        kde_case(rng, 10_000, 1_000, 2),
        kde_case(rng, 10_000, 10_000, 2),
        kde_case(rng, 100_000, 1_000, 8),
        mixture_case(rng, 100_000, 2, 2),
        mixture_case(rng, 100_000, 16, 8),
        mixture_case(rng, 1_000_000, 4, 3),
    ]

    print(f"{'case':<34} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for label, inputs, kernel in cases:
        python_fn = getattr(_kernels_py, kernel)
        t_python = best_of(lambda: python_fn(*inputs), args.repeats)
        if compiled is None:
            print(f"{label:<34} {t_python * 1e3:>8.1f}ms {'n/a':>10} {'n/a':>8}")
            continue
        compiled_fn = getattr(compiled, kernel)
        out_c = compiled_fn(*inputs)
        out_py = python_fn(*inputs)
        np.testing.assert_allclose(out_c, out_py, rtol=1e-10)
        t_compiled = best_of(lambda: compiled_fn(*inputs), args.repeats)
        print(
            f"{label:<34} {t_python * 1e3:>8.1f}ms {t_compiled * 1e3:>8.1f}ms"
            f" {t_python / t_compiled:>7.2f}x"
        )

    if compiled is None:
        print("\ncompiled kernels unavailable; install with a working C toolchain to compare")


if __name__ == "__main__":
    main()
