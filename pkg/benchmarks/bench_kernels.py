#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the per-grid-point hot path (transfer matrix, covariance propagation,
and the metric set) on a realistic angle grid, for both backends, and a
full sweep through the public API.

Usage: python benchmarks/bench_kernels.py [--points N]
"""

import argparse
import math
import time

import numpy as np

import pondera
from pondera import _reference, kernels
from pondera.cli import recipe_text
from pondera.dynamics import build_coupling_matrix, input_noise_spectrum
from pondera.params import derive_rates
from pondera.sweeps import SweepAxis, sweep_angles

try:
    from pondera import _core
except ImportError:
    _core = None


def bench_kernel_path(backend, k, g, gamma_c, thetas) -> float:
    from pondera.dynamics import sideband_squeeze_matrix

    t0 = time.perf_counter()
    t = backend.transfer_matrix(k, 10.0, gamma_c)
    t = np.ascontiguousarray(t)
    gbuf = np.ascontiguousarray(g.copy())
    for th1, th2 in thetas:
        for j, th in enumerate((th1, th2)):
            s = sideband_squeeze_matrix(0.8, th)
            gbuf[2 * j:2 * j + 2, 2 * j:2 * j + 2] = 2 * gamma_c * (s @ s.T) / 2
        v = backend.output_cov(t, gbuf)
        backend.logneg(v)
        backend.duan(v)
        backend.genoni_two_mode(v)
        backend.kappa_sums(v)
    return time.perf_counter() - t0


def bench_sweep(n: int, threads: int, pure: bool) -> float:
    import pondera.kernels as kmod

    saved = {name: getattr(kmod, name) for name in
             ("transfer_matrix", "output_cov", "logneg", "duan",
              "symplectic_pair", "genoni_two_mode", "kappa_sums")}
    try:
        if pure:
            for name in saved:
                setattr(kmod, name, getattr(_reference, name))
        cfg = pondera.load_config(recipe_text("table1.json"))
        step = 2 * math.pi / n
        axis = lambda nm: SweepAxis(nm, tuple(i * step for i in range(n)), "rad")
        t0 = time.perf_counter()
        sweep_angles(cfg, axis("theta1"), axis("theta2"), threads=threads)
        return time.perf_counter() - t0
    finally:
        for name, fn in saved.items():
            setattr(kmod, name, fn)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=4096,
                        help="number of kernel-path grid points (default 4096)")
    parser.add_argument("--grid", type=int, default=64,
                        help="sweep grid edge for the end-to-end benchmark")
    parser.add_argument("--threads", type=int, default=8)
    args = parser.parse_args()

    cfg = pondera.load_config(recipe_text("table1.json"))
    rates = derive_rates(cfg)
    k = build_coupling_matrix(rates, cfg).entries
    g = input_noise_spectrum(cfg, rates).entries
    rng = np.random.default_rng(0)
    thetas = rng.uniform(0, 2 * math.pi, (args.points, 2))

    print(f"kernel path, {args.points} points "
          f"(transfer + covariance + metrics per point):")
    t_py = bench_kernel_path(_reference, k, g, rates.gamma_c, thetas)
    print(f"  pure-python : {t_py:8.3f} s  "
          f"({1e6 * t_py / args.points:7.1f} us/point)")
    if _core is not None:
        t_c = bench_kernel_path(_core, k, g, rates.gamma_c, thetas)
        print(f"  compiled    : {t_c:8.3f} s  "
              f"({1e6 * t_c / args.points:7.1f} us/point)  "
              f"speedup x{t_py / t_c:.1f}")
    else:
        print("  compiled    : extension not built")

    n = args.grid
    print(f"\nend-to-end {n}x{n} angle sweep ({args.threads} threads):")
    t_sweep_py = bench_sweep(n, args.threads, pure=True)
    print(f"  pure-python : {t_sweep_py:8.3f} s")
    if _core is not None:
        t_sweep_c = bench_sweep(n, args.threads, pure=False)
        print(f"  compiled    : {t_sweep_c:8.3f} s  "
              f"speedup x{t_sweep_py / t_sweep_c:.1f}")
    print(f"\nactive backend at import: {kernels.backend_name()}")


if __name__ == "__main__":
    main()
