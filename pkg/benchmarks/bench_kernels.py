"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--reps 20000] [--n 1024] [--dp-n 4000]
"""

import argparse
import time

from orrw import _backend, exact, walk
from orrw._rng import SeedSpec
from orrw.walk import ReinforcementParams


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=20000)
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--dp-n", type=int, default=4000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    p = ReinforcementParams(1.0)

    cases = {
        f"range_batch n={args.n} reps={args.reps}":
            lambda b: walk.range_batch(p, args.n, SeedSpec(1), args.reps, b),
        f"first_passage k=20 reps={args.reps // 10}":
            lambda b: walk.first_passage_batch(p, 20, SeedSpec(1), args.reps // 10, backend=b),
        f"dense DP n={args.dp_n} l<=2":
            lambda b: exact.range_moments(p, args.dp_n, 2, mode="float", backend=b),
    }
    names = _backend.available()
    print(f"{'case':<40}" + "".join(f"{n:>12}" for n in names) + "     speedup")
    for label, fn in cases.items():
        secs = [best_of(lambda b=b: fn(b), args.repeat) for b in names]
        speed = f"{secs[-1] / secs[0]:>10.1f}x" if len(secs) > 1 else ""
        print(f"{label:<40}" + "".join(f"{s:>11.3f}s" for s in secs) + speed)


if __name__ == "__main__":
    main()
