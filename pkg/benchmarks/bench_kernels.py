"""Time the compiled kernels against the pure-Python fallback.

Both backends are called through their raw (array, ..., out) entry points
so one process can measure both.  Outputs are compared bitwise first; a
speed number for a wrong kernel would be worthless.

Run:  python benchmarks/bench_kernels.py [--sizes 10000,100000,1000000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from isdtwin._kernels import _fallback

try:
    from isdtwin._kernels import _core
except ImportError:
    _core = None


def _bench(impl, fn_name, args, out, repeat):
    fn = getattr(impl, fn_name)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args, out)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="10000,100000,1000000",
                    help="comma-separated array lengths")
    ap.add_argument("--repeat", type=int, default=5, help="runs per timing, best kept")
    opts = ap.parse_args()
    sizes = [int(s) for s in opts.sizes.split(",")]

    if _core is None:
        print("compiled extension not available; timing the fallback only")

    rng = np.random.Generator(np.random.PCG64(0))
    print(f"{'kernel':<18} {'n':>9} {'python':>12} {'compiled':>12} {'speedup':>8}")
    for n in sizes:
        data = rng.normal(0.0, 1.0, n)
        cases = (
            ("track_asymmetric", (data, 0.0, 0.03, 0.08)),
            ("decay_accumulate", (data, 0.995, 0.0)),
        )
        for fn_name, args in cases:
            out_py = np.empty(n)
            t_py = _bench(_fallback, fn_name, args, out_py, opts.repeat)
            if _core is None:
                print(f"{fn_name:<18} {n:>9} {t_py * 1e3:>10.2f}ms {'-':>12} {'-':>8}")
                continue
            out_c = np.empty(n)
            t_c = _bench(_core, fn_name, args, out_c, opts.repeat)
            if not np.array_equal(out_py, out_c):
                raise SystemExit(f"{fn_name}: backends disagree at n={n}")
            print(f"{fn_name:<18} {n:>9} {t_py * 1e3:>10.2f}ms {t_c * 1e3:>10.2f}ms "
                  f"{t_py / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
