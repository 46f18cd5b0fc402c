"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeats N]

Each kernel is called once before timing so numba compilation is excluded.
The end-to-end rows time a full solve and a measurement search with the
dispatch flag flipped between backends.
"""
import argparse
import time

import numpy as np

from qfdiv import _kernels
from qfdiv.convex_core import renyi
from qfdiv.dmin_solver import GENERIC_GRADIENT, solve
from qfdiv.measurement_oracle import pvm_search
from qfdiv.sampling import random_density


def best_of(fn, repeats):
    fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_rows(repeats):
    rng = np.random.default_rng(0)
    rows = []
    for n in (2, 4, 8, 32):
        t = np.sort(rng.standard_normal(n))
        ht = np.sin(t)
        dmid = np.cos(0.5 * (t[:, None] + t[None, :]))
        rows.append((f"divided difference n={n}",
                     best_of(lambda: _kernels.divided_difference_numpy(t, ht, dmid, 1e-7), repeats),
                     best_of(lambda: _kernels.divided_difference_numba(t, ht, dmid, 1e-7), repeats)))
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        rho = g @ g.conj().T
        u, _ = np.linalg.qr(g)
        rows.append((f"pvm probabilities n={n}",
                     best_of(lambda: _kernels.pvm_probabilities_numpy(u, rho), repeats),
                     best_of(lambda: _kernels.pvm_probabilities_numba(u, rho), repeats)))
    return rows


def end_to_end_rows(repeats):
    rng = np.random.default_rng(1)
    r1, r2 = random_density(3, rng), random_density(3, rng)
    f = renyi(0.3)
    jobs = {
        "generic solve, qutrit, alpha=0.3": lambda: solve(f, r1, r2, force_path=GENERIC_GRADIENT),
        "pvm search, qutrit, 4 restarts": lambda: pvm_search(f, r1, r2, restarts=4, seed=0),
    }
    rows = []
    saved = _kernels.USE_NUMBA
    try:
        for name, job in jobs.items():
            _kernels.USE_NUMBA = False
            t_np = best_of(job, max(1, repeats // 20))
            _kernels.USE_NUMBA = True
            t_nb = best_of(job, max(1, repeats // 20))
            rows.append((name, t_np, t_nb))
    finally:
        _kernels.USE_NUMBA = saved
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; install the 'fast' extra to compare backends")
    rows = kernel_rows(args.repeats) + end_to_end_rows(args.repeats)
    print(f"{'case':40s} {'numpy [us]':>12s} {'numba [us]':>12s} {'speedup':>8s}")
    for name, t_np, t_nb in rows:
        print(f"{name:40s} {t_np * 1e6:12.1f} {t_nb * 1e6:12.1f} {t_np / t_nb:8.2f}")


if __name__ == "__main__":
    main()
