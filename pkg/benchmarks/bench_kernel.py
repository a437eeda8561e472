#!/usr/bin/env python3
"""Benchmark the compiled hot kernels against their numpy fallbacks.

Times the three kernels on representative problem sizes and, as an
end-to-end figure, one full placement solve under each implementation.

Usage:
    python3 benchmarks/bench_kernel.py [--repeats N]
"""

import argparse
import math
import time

import numpy as np

from vlcplace import _kernel_py

try:
    from vlcplace import _kernel_c
except ImportError:
    _kernel_c = None


def timeit(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def cv_scan_args(n_led=6, n_rx=160, n_cand=256, seed=0):
    rng = np.random.default_rng(seed)
    return dict(
        candidates=np.linspace(0.0, 7.5, n_cand),
        coef=rng.uniform(-1.5, 1.5, n_led),
        offsets=rng.uniform(-4.0, 4.0, n_rx),
        base_sq=rng.uniform(4.0, 20.0, (n_led, n_rx)),
        powers=rng.uniform(0.5, 40.0, n_led),
        neg_half_exp=-2.0,
        d2_max=36.0,
    )


def dual_args(k=4, u=160, iters=2000, seed=0):
    rng = np.random.default_rng(seed)
    pos = np.linspace(1.0, 6.5, k)
    rx = np.sort(rng.uniform(0.0, 7.5, u))
    cross = rng.uniform(0.5, 3.0, (k, u)) ** 2 + 9.0
    gains = 3e-4 * ((pos[:, None] - rx[None, :]) ** 2 + cross) ** -2.0
    served = np.argmax(gains, axis=0)
    idx = np.concatenate([np.nonzero(served == i)[0] for i in range(k)]).astype(np.int64)
    off = np.zeros(k + 1, dtype=np.int64)
    for i in range(k):
        off[i + 1] = off[i] + int((served == i).sum())
    return dict(
        pos_axis=pos, cross_sq=cross, gains=gains, powers=np.full(k, 5.0),
        lambdas=np.ones(u), served_idx=idx, served_off=off, rx_axis=rx,
        illum_min=np.full(u, 0.4), comm_factor=np.full(u, 1.2),
        grid_idx=np.arange(k, dtype=float),
        intervals=np.array([[0.2, 3.7]]), axis_len=7.5, axis_count=k,
        xi=1.0, v_const=2.0, w_const=1.3, noise_std=0.04, m=1.0,
        gain_const=3e-4, gain_expo=-2.0, d2_max=45.0, interference=0,
        gamma=0.01, diminishing=1, max_iters=iters, power_tol=1e-12,
    )


def fixed_point_args(k=6, u=160, seed=0):
    rng = np.random.default_rng(seed)
    gains = rng.uniform(1e-6, 5e-5, (k, u))
    served = np.argmax(gains, axis=0)
    idx = np.concatenate([np.nonzero(served == i)[0] for i in range(k)]).astype(np.int64)
    off = np.zeros(k + 1, dtype=np.int64)
    for i in range(k):
        off[i + 1] = off[i] + int((served == i).sum())
    rate = rng.uniform(0.1, 0.8, u)
    return dict(
        gains=gains, served_idx=idx, served_off=off,
        illum_min=rng.uniform(0.1, 0.5, u),
        comm_scale=np.sqrt((2.0 * np.pi / np.e) * (2.0 ** (2.0 * rate) - 1.0)),
        xi=1.0, noise_std=0.04, interference=0, tol=1e-10, max_passes=1000,
    )


def fresh(args):
    return {key: (val.copy() if isinstance(val, np.ndarray) else val)
            for key, val in args.items()}


def bench_kernels(repeats):
    cases = [
        ("cv_for_spacings (6 LEDs, 160 rx, 256 candidates)",
         "cv_for_spacings", cv_scan_args()),
        ("dual_pass        (4 LEDs, 160 rx, 2000 sweeps)",
         "dual_pass", dual_args()),
        ("power_fixed_point (6 LEDs, 160 rx)",
         "power_fixed_point", fixed_point_args()),
    ]
    print(f"{'kernel':55s} {'numpy':>10s} {'compiled':>10s} {'speedup':>8s}")
    for label, name, args in cases:
        t_py = timeit(lambda: getattr(_kernel_py, name)(**fresh(args)), repeats)
        if _kernel_c is None:
            print(f"{label:55s} {t_py * 1e3:9.2f}ms {'n/a':>10s}")
            continue
        t_c = timeit(lambda: getattr(_kernel_c, name)(**fresh(args)), repeats)
        print(f"{label:55s} {t_py * 1e3:9.2f}ms {t_c * 1e3:9.2f}ms {t_py / t_c:7.1f}x")


def bench_solve(repeats):
    import pathlib
    import subprocess
    import sys

    config = pathlib.Path(__file__).resolve().parent.parent / "configs" / "room_4led.ini"
    script = (
        "import sys, time; from vlcplace.config import load_scenario; "
        "from vlcplace.solver import lxyu; "
        f"sc, cfg = load_scenario({str(config)!r}); "
        "t = time.perf_counter(); lxyu(sc, cfg); "
        "print(f'{time.perf_counter() - t:.2f}')"
    )
    print()
    print("full placement solve (2x2 grid, 160 receivers):")
    for label, env in (("compiled", {}), ("numpy fallback", {"VLCPLACE_PURE_PYTHON": "1"})):
        times = []
        for _ in range(repeats):
            out = subprocess.run([sys.executable, "-c", script],
                                 capture_output=True, text=True,
                                 env={"PATH": "/usr/bin:/bin", **env})
            times.append(float(out.stdout))
        print(f"  {label:15s} {min(times):.2f}s")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repetitions; the best run is reported")
    args = parser.parse_args()
    bench_kernels(args.repeats)
    bench_solve(max(1, args.repeats - 1))


if __name__ == "__main__":
    main()
