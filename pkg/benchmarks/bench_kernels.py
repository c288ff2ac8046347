"""Compare the numba and numpy kernel backends.

Times the projections on an 80 x 320 coefficient matrix
and a full selection run, once per backend.  Usage::

    python3 benchmarks/bench_kernels.py [--repeat 200] [--solves 5]
"""
import argparse
import time
import timeit

import numpy as np

from dictsel import _kernels
from dictsel.datagen import gen_problem
from dictsel.solver import SolverConfig, select
from dictsel.sparsity import ModelParams


def bench_projections(kern, A, k, p, repeat):
    cases = {
        "project_columns": lambda: kern.project_columns(A, k),
        "project_rows": lambda: kern.project_rows(A, p),
        "project_rows_columns": lambda: kern.project_rows_columns(A, k, p),
        "project_columns k=40": lambda: kern.project_columns(A, 40),
    }
    out = {}
    for name, fn in cases.items():
        fn()  # compile / warm up
        best = min(timeit.repeat(fn, number=repeat, repeat=3)) / repeat
        out[name] = best * 1e6
    return out


def bench_solve(name, solves):
    _kernels.active = _kernels.get_kernels(name)
    probs = [gen_problem(20, 80, 30, 4, 320, s) for s in range(solves)]
    cfg = SolverConfig(ModelParams(4, 30))
    select(probs[0].phi, probs[0].Y, cfg)  # warm up
    t0 = time.perf_counter()
    iters = 0
    for prob in probs:
        iters += select(prob.phi, prob.Y, cfg).iterations_run
    dt = time.perf_counter() - t0
    return dt / solves, dt / max(iters, 1) * 1e6


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--solves", type=int, default=5)
    args = ap.parse_args()

    A = np.random.default_rng(0).standard_normal((80, 320))
    names = ["numpy"] + (["numba"] if _kernels.numba_kernels is not None else [])
    rows = {name: bench_projections(_kernels.get_kernels(name), A, 4, 30, args.repeat)
            for name in names}
    print(f"projections on an 80 x 320 matrix, k=4, p=30 (microseconds per call)")
    print(f"{'kernel':24s}" + "".join(f"{n:>12s}" for n in names))
    for case in rows["numpy"]:
        print(f"{case:24s}" + "".join(f"{rows[n][case]:12.1f}" for n in names))

    print(f"\nfull selection at (20, 80, 30, 4, 320), {args.solves} problems")
    for name in names:
        per_solve, per_iter = bench_solve(name, args.solves)
        print(f"{name:8s} {per_solve:8.3f} s/solve {per_iter:10.0f} us/iteration")


if __name__ == "__main__":
    main()
