"""Compare the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--arity 16] [--repeat 5]

Each kernel runs on the same random input under both backends; outputs are
checked for agreement before timings are reported.
"""
import argparse
import timeit

import numpy as np

from minionlab import _kernels_py as py

try:
    from minionlab import _kernels as cy
except ImportError:  # extension not built
    cy = None


def cases(n, rng):
    table = (rng.random(1 << n) < 0.5).astype(np.uint8)
    vals = rng.random(1 << n)
    m = max(1, n // 2)
    image = rng.integers(0, m, size=n)
    np_ = min(n, 14)  # pivot counting is quadratic in the arity
    return {
        "butterfly_forward": lambda k: k.butterfly_forward(vals, n, 0.3),
        "butterfly_inverse": lambda k: k.butterfly_inverse(vals, n, 0.3),
        "biased_mean": lambda k: k.biased_mean(vals, n, 0.3),
        "flip_mass": lambda k: k.flip_mass(table, n, n // 2, 0.3),
        "minor_table": lambda k: k.minor_table(table, image, m),
        "pivot_counts": lambda k: k.pivot_counts(table[: 1 << np_], np_),
        "subset_zeta": lambda k: k.subset_zeta(vals, n),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--arity", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled kernels not available; build with `pip install --no-build-isolation -e .`")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"arity {args.arity}, best of {args.repeat}")
    print(f"{'kernel':<20}{'numpy [ms]':>12}{'cython [ms]':>13}{'speedup':>9}")
    for name, run in cases(args.arity, rng).items():
        a, b = np.asarray(run(py)), np.asarray(run(cy))
        if not np.allclose(a, b, rtol=1e-9, atol=1e-9):
            raise SystemExit(f"{name}: backends disagree")
        tp = min(timeit.repeat(lambda: run(py), number=1, repeat=args.repeat)) * 1e3
        tc = min(timeit.repeat(lambda: run(cy), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<20}{tp:>12.3f}{tc:>13.3f}{tp / tc:>9.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
