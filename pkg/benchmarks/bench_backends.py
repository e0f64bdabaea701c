"""Compare the compiled kernels against the pure-Python fallback.

Each workload runs on both backends, the results are checked for bitwise
agreement, and the best-of-N wall times are reported side by side.

Usage: python3 benchmarks/bench_backends.py [--repeats N] [--grid N]
"""

import argparse
import math
import time

import numpy as np

from softfinger._kernels import pure

try:
    from softfinger._kernels import _fast as fast
except ImportError:
    fast = None

GEO = (11.5, 38.0, 4.5, 6.0, 14.0)  # R, D1, D2, S, L
TIP = (11.5, 36.0, 4.5)  # R, D3, D4
LINKS = (30.0, 25.0, 20.0)
LIMIT = math.radians(20.0)


def det_grid_workload(n):
    th1s = np.linspace(-LIMIT, LIMIT, n)
    th2s = np.linspace(-LIMIT, LIMIT, n)

    def run(kernels):
        out = np.empty((n, n))
        kernels.det_grid(*GEO, False, th1s, th2s, out)
        return out.tobytes()

    return run


def inverse_grid_workload(n):
    th1s = np.linspace(-LIMIT, LIMIT, n)
    targets = []
    for th1 in th1s:
        for th2 in th1s:
            l1sq, l2sq = pure.dual_lengths_sq(*GEO, False, th1, th2)
            targets.append((math.sqrt(l1sq), math.sqrt(l2sq)))

    def run(kernels):
        acc = []
        for l1, l2 in targets:
            acc.extend(
                kernels.dual_inverse(*GEO, False, l1, l2, 0.0, 0.0, 1e-12, 50)[:2]
            )
        return np.array(acc).tobytes()

    return run


def tip_inverse_workload(n):
    targets = [
        pure.single_length(*TIP, th) for th in np.linspace(-LIMIT, LIMIT, n * n)
    ]

    def run(kernels):
        acc = [
            kernels.single_inverse(*TIP, t, -LIMIT, LIMIT, 1e-12, 80)[0]
            for t in targets
        ]
        return np.array(acc).tobytes()

    return run


def sim_workload(n_steps):
    def run(kernels):
        th = np.array([0.1, 0.05, -0.05])
        om = np.zeros(3)
        rec_t = np.empty(n_steps + 1)
        rec_th = np.empty((n_steps + 1, 3))
        rec_om = np.empty((n_steps + 1, 3))
        rec_cmd = np.empty((n_steps + 1, 3))
        n_rec, _blow = kernels.sim_phase(
            *LINKS, 0.008, 0.006, 0.004, 0.0, 0.0, -9810.0,
            5.0e-3, 4.0e-3, 3.0e-3, 0.05, 0.04, 0.03, 50.0, 50.0, 50.0,
            1e-3, n_steps,
            th, om,
            0.1, 0.05, -0.05, 0.0, 0.0, 0.0,
            0.01, 0.0, -0.01, 0.0, 0.0, 0.0,
            1e-6, 1e3, 0.0, 1,
            rec_t, rec_th, rec_om, rec_cmd, 0,
        )
        return th.tobytes() + om.tobytes() + rec_th[:n_rec].tobytes()

    return run


def best_time(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="best-of-N timing")
    parser.add_argument("--grid", type=int, default=41, help="grid edge length")
    parser.add_argument("--steps", type=int, default=20000, help="sim step count")
    args = parser.parse_args(argv)

    workloads = [
        (f"det grid {args.grid}x{args.grid}", det_grid_workload(args.grid)),
        (f"paired inverse x{args.grid * args.grid}", inverse_grid_workload(args.grid)),
        (f"tip inverse x{args.grid * args.grid}", tip_inverse_workload(args.grid)),
        (f"sim {args.steps} steps", sim_workload(args.steps)),
    ]

    if fast is None:
        print("compiled backend not built; timing the pure backend only")

    header = f"{'workload':<28}{'pure':>12}{'compiled':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, run in workloads:
        t_pure = best_time(lambda: run(pure), args.repeats)
        if fast is None:
            print(f"{name:<28}{t_pure * 1e3:>10.2f} ms{'-':>12}{'-':>10}")
            continue
        if run(pure) != run(fast):
            raise SystemExit(f"BACKEND MISMATCH in workload: {name}")
        t_fast = best_time(lambda: run(fast), args.repeats)
        print(
            f"{name:<28}{t_pure * 1e3:>10.2f} ms{t_fast * 1e3:>10.2f} ms"
            f"{t_pure / t_fast:>9.1f}x"
        )
    if fast is not None:
        print("all workloads agree bit for bit across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
