"""Compare the compiled and numpy commutator kernels.

Usage: python benchmarks/bench_kernels.py [--repeat R]

Times ``commutator_norms`` and ``commutator_grad`` on the basis stacks used by
the search (K = N = n(n+1)/2 matrices of size n x n) and one full restart.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from ddvv import _kernels_py
from ddvv.algebra import IndexScheme, basis_matrices, random_orthogonal

try:
    from ddvv import _kernels as _compiled
except ImportError:
    _compiled = None


def time_call(func, repeat):
    timer = timeit.Timer(func)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def restart_time(pure, n):
    env = dict(os.environ, DDVV_PURE_PYTHON="1" if pure else "0")
    code = ("import time;from ddvv.search import SearchConfig,_run_restart;"
            "from ddvv.algebra import IndexScheme;"
            f"c=SearchConfig(n={n},max_iters=200);s=IndexScheme.of({n});"
            "t=time.perf_counter();[_run_restart(c,s,i) for i in range(4)];"
            "print((time.perf_counter()-t)/4)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    return float(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled extension not built; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'n':>3}{'K':>5}{'numpy [us]':>14}{'cython [us]':>14}{'speedup':>10}")
    for n in (2, 3, 4, 6, 8):
        scheme = IndexScheme.of(n)
        stack = np.ascontiguousarray(basis_matrices(scheme, random_orthogonal(scheme.N, rng)))
        w = rng.dirichlet(np.ones(scheme.N))
        for name, py, cy in (
            ("commutator_norms", lambda: _kernels_py.commutator_norms(stack),
             lambda: _compiled.commutator_norms(stack)),
            ("commutator_grad", lambda: _kernels_py.commutator_grad(stack, w),
             lambda: _compiled.commutator_grad(stack, w)),
        ):
            tp, tc = time_call(py, args.repeat), time_call(cy, args.repeat)
            print(f"{name:<18}{n:>3}{scheme.N:>5}{tp * 1e6:>14.1f}{tc * 1e6:>14.1f}{tp / tc:>10.1f}")
    print()
    print(f"{'restart (200 it)':<18}{'n':>3}{'numpy [ms]':>19}{'cython [ms]':>14}{'speedup':>10}")
    for n in (3, 4):
        tp, tc = restart_time(True, n), restart_time(False, n)
        print(f"{'':<18}{n:>3}{tp * 1e3:>19.1f}{tc * 1e3:>14.1f}{tp / tc:>10.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
