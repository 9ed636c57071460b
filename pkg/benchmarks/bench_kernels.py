"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run from the repository root:

    python benchmarks/bench_kernels.py [--repeats 5]

Both paths are always imported directly (ciede2000_pairs_np etc. vs the
dispatched names), so one process can time them side by side regardless of
the PALETTEKIT_NO_NUMBA setting.
"""

import argparse
import time

import numpy as np

from palettekit import _kernels as K


def _random_labs(rng, n):
    return np.column_stack([rng.uniform(0, 100, n), rng.uniform(-100, 100, (n, 2))])


def _time(fn, *args, repeats=5):
    fn(*args)  # warm up (numba compilation, caches)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed repetitions per case (best-of is reported)")
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    print(f"numba active: {K.USING_NUMBA}")
    if not K.USING_NUMBA:
        print("note: accelerated path unavailable; both columns run numpy")
    header = f"{'kernel':<34}{'numpy':>12}{'numba':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))

    cases = []

    l1, l2 = _random_labs(rng, 200_000), _random_labs(rng, 200_000)
    cases.append(("ciede2000_pairs (200k pairs)",
                  (K.ciede2000_pairs_np, K.ciede2000_pairs), (l1, l2)))

    samples = _random_labs(rng, 40_000)
    centroids = _random_labs(rng, 200)
    cases.append(("kmeans_assign (40k x 200)",
                  (K.kmeans_assign_np, K.kmeans_assign), (samples, centroids)))

    acc = rng.uniform(0.5, 1.0, (39, 39))
    acc = (acc + acc.T) / 2
    combos = np.array([sorted(rng.choice(39, size=8, replace=False).tolist())
                       for _ in range(200_000)], dtype=np.int64)
    cases.append(("subset_pair_mean (200k x C(8,2))",
                  (K.subset_pair_mean_np, K.subset_pair_mean), (combos, acc)))

    for name, (slow, fast), data in cases:
        t_np = _time(slow, *data, repeats=args.repeats)
        t_nb = _time(fast, *data, repeats=args.repeats)
        ratio = t_np / t_nb if t_nb > 0 else float("inf")
        print(f"{name:<34}{t_np * 1e3:>10.1f}ms{t_nb * 1e3:>10.1f}ms{ratio:>9.1f}x")


if __name__ == "__main__":
    main()
