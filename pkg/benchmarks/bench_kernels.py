"""Time the numba and numpy Monte Carlo backends on the same workload.

    python3 benchmarks/bench_kernels.py --trials 2000000 --repeat 3
"""

import argparse
import time

from cvdense import _kernels
from cvdense.capacity import DenseCodingChannel
from cvdense.simulate import SimConfig, run


def best_time(cfg, backend, workers, repeat):
    run(cfg, workers=workers, backend=backend)  # warm-up, includes jit compile
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = run(cfg, workers=workers, backend=backend)
        times.append(time.perf_counter() - t0)
    return min(times), res


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)

    cfg = SimConfig("dense-coding", DenseCodingChannel(5.0, 0.3, 1.0, 0.9), args.trials, 1)
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    results = {}
    for name in backends:
        t, res = best_time(cfg, name, args.workers, args.repeat)
        results[name] = res
        print(f"{name:6s} {t:8.3f} s  {args.trials / t / 1e6:6.2f} M trials/s  C={res.capacity_estimate:.12f}")
    if len(results) == 2:
        diff = abs(results["numba"].capacity_estimate - results["numpy"].capacity_estimate)
        print(f"backend capacity difference {diff:.1e}")
    else:
        print("numba not available or disabled by CVDENSE_NUMBA; numpy only")


if __name__ == "__main__":
    main()
