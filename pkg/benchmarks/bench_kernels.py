#!/usr/bin/env python3
"""Benchmark the numba kernel lane against the pure-numpy lane.

Times the kernels that dominate the measure optimizers and the conjecture
search: channel application, mutual information, the fused fixed-point
residual, the basis chart, and the projected-gradient inner solve.

Run:  python benchmarks/bench_kernels.py [--repeats 2000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from oblique import kernels_numpy
from oblique.measures import params_from_columns

try:
    from oblique import kernels_numba
except ImportError:
    kernels_numba = None


def _case(dims, seed):
    rng = np.random.default_rng(seed)
    d = int(np.prod(dims))
    n = dims[0]
    R = d // n
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    s = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    s /= np.linalg.norm(s, axis=0)
    D = np.ascontiguousarray(np.linalg.inv(s.conj().T))
    return rho, s, D, n, R


def _time(fn, repeats):
    fn()  # warmup / jit compile
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench(dims, repeats):
    rho, V, D, n, R = _case(dims, seed=1)
    dims_arr = np.asarray(dims, dtype=np.int64)
    gid = np.asarray([0] + [1] * (len(dims) - 1), dtype=np.int64)
    x = params_from_columns(V)
    gram = V.conj().T @ V
    G = np.ascontiguousarray(gram.real**2 + gram.imag**2)
    Rb = kernels_numpy.channel_blocks(rho, V, 1, n, R)
    M0 = kernels_numpy.channel_blocks(rho, D, 1, n, R)
    M0 /= np.trace(M0.sum(axis=0)).real

    lanes = [("numpy", kernels_numpy)]
    if kernels_numba is not None:
        lanes.append(("numba", kernels_numba))

    cases = {
        "channel_apply": lambda k: k.channel_apply(rho, V, D, 1, n, R),
        "mutual_info": lambda k: k.mutual_info(rho, dims_arr, gid, 2, 1e-12),
        "residual_max": lambda k: k.residual_max(rho, V, D, 1, n, R),
        "basis_from_params": lambda k: k.basis_from_params(x, n, 1e8),
        "zod_inner": lambda k: k.zod_inner(G, Rb, M0, 1.0, 200, 1e-10),
    }
    results = {}
    for name, call in cases.items():
        row = {}
        for lane, mod in lanes:
            row[lane] = _time(lambda: call(mod), repeats)
        results[name] = row
    return results


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=2000)
    ap.add_argument("--dims", default="2x2,2x3,3x3,2x2x2")
    args = ap.parse_args()

    for tag in args.dims.split(","):
        dims = tuple(int(d) for d in tag.split("x"))
        reps = args.repeats if np.prod(dims) <= 6 else max(args.repeats // 4, 50)
        print(f"\n== dims {tag} ({reps} repeats) ==")
        print(f"{'kernel':<20}{'numpy':>12}{'numba':>12}{'speedup':>10}")
        for name, row in bench(dims, reps).items():
            np_t = row["numpy"] * 1e6
            if "numba" in row:
                nb_t = row["numba"] * 1e6
                print(f"{name:<20}{np_t:>10.1f}us{nb_t:>10.1f}us{np_t / nb_t:>9.1f}x")
            else:
                print(f"{name:<20}{np_t:>10.1f}us{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
