#!/usr/bin/env python3
"""Benchmark the compiled quadrature kernel against the NumPy fallback.

The workload mirrors the bound-maximization grids: a dense (rho, sigma_x,
sigma_z) box evaluated for saturated quantizer pairs of increasing bit count.
Run from the repository root:

    python3 benchmarks/bench_price.py [--density 41]

Density 41 is what the bound maximization uses in production; the default
here is smaller so the comparison finishes in a few seconds.
"""

import argparse
import time

import numpy as np

from qgranger._kernels import BACKEND, pair_sum_integral, pair_sum_integral_numpy
from qgranger.gausslink import finite_view
from qgranger.quantize import make_saturated_uniform


def grid_workload(bits: int, density: int):
    spec_x = make_saturated_uniform(-3.0, 3.0, bits)
    spec_z = make_saturated_uniform(-5.0, 5.0, bits)
    c, wa = finite_view(spec_x)
    d, wb = finite_view(spec_z)
    rho = np.linspace(0.0, 0.5, density)
    gx = np.linspace(2.4, 2.6, density)
    gz = np.linspace(2.1, 2.3, density)
    rr, xx, zz = (a.ravel() for a in np.meshgrid(rho, gx, gz, indexing="ij"))
    u = c[None, :] / xx[:, None]
    v = d[None, :] / zz[:, None]
    half = 0.5 * np.arcsin(rr)
    xi, om = np.polynomial.legendre.leggauss(64)
    return u, v, wa, wb, half, xi, om


def timeit(func, *args, repeats: int = 2) -> tuple[float, np.ndarray]:
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = func(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--density", type=int, default=21, help="grid points per axis")
    density = parser.parse_args().density
    print(f"active backend: {BACKEND}")
    print(f"grid density {density}/axis, 64 Gauss-Legendre nodes")
    print(f"{'bits':>4} {'points':>8} {'pairs':>6} {'compiled':>10} {'numpy':>10} {'speedup':>8} {'max|diff|':>10}")
    for bits in (1, 2, 3, 4):
        args = grid_workload(bits, density)
        t_active, out_active = timeit(pair_sum_integral, *args)
        t_numpy, out_numpy = timeit(pair_sum_integral_numpy, *args)
        diff = float(np.max(np.abs(out_active - out_numpy)))
        n_pts = args[0].shape[0]
        n_pairs = args[0].shape[1] * args[1].shape[1]
        speed = t_numpy / t_active if t_active > 0 else float("inf")
        print(
            f"{bits:>4} {n_pts:>8} {n_pairs:>6} {t_active:>9.3f}s {t_numpy:>9.3f}s "
            f"{speed:>7.1f}x {diff:>10.2e}"
        )


if __name__ == "__main__":
    main()
