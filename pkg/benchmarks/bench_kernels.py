"""Compare the compiled and NumPy kernels on norm-sized workloads.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from wbergman import _kernels_py
from wbergman.series import graded_lex

try:
    from wbergman import _kernels as _compiled
except ImportError:
    _compiled = None

CHUNK = 1 << 15


def _case(n, degree, seed=0):
    rng = np.random.default_rng(seed)
    exps = np.array([m for d in range(degree + 1) for m in graded_lex(n, d)], dtype=np.int64)
    coeffs = rng.normal(size=len(exps)) + 1j * rng.normal(size=len(exps))
    pts = rng.uniform(size=(CHUNK, n)) * np.exp(2j * np.pi * rng.uniform(size=(CHUNK, n)))
    return coeffs, exps, np.ascontiguousarray(pts), degree


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _compiled is None:
        print("compiled extension not built; only the NumPy backend is available")
    cases = [("n=1 deg=400", (1, 400)), ("n=2 deg=10", (2, 10)),
             ("n=2 deg=30", (2, 30)), ("n=3 deg=8", (3, 8))]
    print(f"{'eval_monomials':<16}{'terms':>7}{'numpy ms':>11}{'cython ms':>11}{'speedup':>9}")
    for label, (n, deg) in cases:
        args_ = _case(n, deg)
        t_py = _best(lambda: _kernels_py.eval_monomials(*args_), args.repeat)
        line = f"{label:<16}{len(args_[0]):>7}{1e3 * t_py:>11.2f}"
        if _compiled is not None:
            t_c = _best(lambda: _compiled.eval_monomials(*args_), args.repeat)
            line += f"{1e3 * t_c:>11.2f}{t_py / t_c:>8.1f}x"
        print(line)
    vals = np.random.default_rng(1).normal(size=CHUNK * 64)
    t_py = _best(lambda: _kernels_py.tree_sum(vals), args.repeat)
    line = f"{'tree_sum 2M':<16}{'':>7}{1e3 * t_py:>11.2f}"
    if _compiled is not None:
        t_c = _best(lambda: _compiled.tree_sum(vals), args.repeat)
        line += f"{1e3 * t_c:>11.2f}{t_py / t_c:>8.1f}x"
    print(line)


if __name__ == "__main__":
    main()
