"""Time the numba kernels against the numpy fallback on random chain matrices.

    python3 benchmarks/bench_kernels.py [--sizes 32 128 512] [--repeat 5]

Results are checked for equality before timing.  The first numba call
compiles, so it is warmed up outside the timed region.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from vlift import kernels
from vlift.quantale import make_quantale


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 128, 384])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--chain", type=int, default=5, help="Lukasiewicz chain length")
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; install the 'jit' extra")
    q = make_quantale({"kind": "lukasiewicz_chain", "n": args.chain})
    T, H = q.tensor_table, q.hom_table
    rng = np.random.default_rng(0)
    print(f"{'kernel':<20}{'n':>6}{'numpy s':>12}{'numba s':>12}{'speedup':>10}")
    for n in args.sizes:
        X = rng.integers(0, q.size, (n, n)).astype(np.int64)
        Y = rng.integers(0, q.size, (n, n)).astype(np.int64)
        cases = {
            "sup_tensor": (
                lambda: kernels.sup_tensor_numpy(X, Y, T),
                lambda: kernels.sup_tensor_numba(X, Y, T),
            ),
            "inf_hom": (
                lambda: kernels.inf_hom_numpy(X, Y, H, q.top),
                lambda: kernels.inf_hom_numba(X, Y, H, q.top),
            ),
        }
        for name, (slow, fast) in cases.items():
            if not np.array_equal(slow(), fast()):
                raise SystemExit(f"{name}: backends disagree at n={n}")
            ts, tf = best_of(slow, args.repeat), best_of(fast, args.repeat)
            print(f"{name:<20}{n:>6}{ts:>12.4f}{tf:>12.4f}{ts / tf:>10.1f}")


if __name__ == "__main__":
    main()
