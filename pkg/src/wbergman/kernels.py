"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``WBERGMAN_PURE_PYTHON`` is set to a non-empty value,
the NumPy implementation is used. Both expose ``eval_monomials`` and
``tree_sum`` with identical semantics and operation order.
"""
import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("WBERGMAN_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def eval_monomials(coeffs, exps, points, max_degree):
    """Sum ``coeffs[t] * prod_j points[:, j] ** exps[t, j]`` over terms t, per point."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    points = np.ascontiguousarray(points, dtype=np.complex128)
    if coeffs.size == 0:
        return np.zeros(points.shape[0], dtype=np.complex128)
    exps = np.ascontiguousarray(exps, dtype=np.int64).reshape(len(coeffs), -1)
    return _impl.eval_monomials(coeffs, exps, points, int(max_degree))


def tree_sum(values):
    """Deterministic sum whose association depends only on ``len(values)``."""
    return float(_impl.tree_sum(np.ascontiguousarray(values, dtype=np.float64)))
