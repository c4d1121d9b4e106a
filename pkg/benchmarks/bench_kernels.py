"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each case checks that both backends return the same answer before timing.
"""

import argparse
import math
import time

import numpy as np

from minimaxdl import kernels
from minimaxdl.model import random_dictionary
from minimaxdl.seeding import make_rng


def cases(quick):
    rng = make_rng(0)
    out = []
    for p, s in ([(20, 3), (30, 4)] if quick else [(30, 4), (40, 5)]):
        D = random_dictionary(max(s + 2, 10), p, rng)
        out.append((f"rip_extremes p={p} s={s} ({math.comb(p, s)} supports)", "rip_extremes", (D.T @ D, s)))
    for P, d in ([(500, 50)] if quick else [(1000, 50), (4000, 100)]):
        B = (rng.integers(0, 2, size=(P, d)) * 2 - 1).astype(np.int8)
        out.append((f"min_pairwise_hamming P={P} d={d}", "min_pairwise_hamming", (B,)))
    for L, n in ([(64, 60)] if quick else [(64, 60), (1024, 60)]):
        M = rng.standard_normal((L, n))
        out.append((f"pairwise_sq_dist_extremes L={L} n={n}", "pairwise_sq_dist_extremes", (M,)))
    return out


def best_of(fn, args, repeat):
    times, res = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), res


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    backends = kernels.available_backends()
    names = sorted(backends, reverse=True)
    print(f"{'case':<48}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for label, fname, fargs in cases(args.quick):
        t, res = {}, {}
        for n in names:
            t[n], res[n] = best_of(getattr(backends[n], fname), fargs, args.repeat)
        if len(names) == 2:
            a, b = res[names[0]], res[names[1]]
            if fname == "rip_extremes":
                assert abs(a[0] - b[0]) <= 1e-12 and a[2] == b[2]
            elif fname == "pairwise_sq_dist_extremes":
                assert np.allclose(a, b, rtol=1e-12)
            else:
                assert a == b
        speed = t["python"] / t["cython"] if "cython" in t else float("nan")
        print(f"{label:<48}" + "".join(f"{t[n] * 1e3:>10.1f}ms" for n in names) + f"{speed:>9.1f}x")


if __name__ == "__main__":
    main()
