"""Pure NumPy versions of the compiled kernels (same operation order)."""
import numpy as np


def eval_monomials(coeffs, exps, points, max_degree):
    points = np.ascontiguousarray(points, dtype=np.complex128)
    npts, n = points.shape
    out = np.zeros(npts, dtype=np.complex128)
    if npts == 0 or len(coeffs) == 0:
        return out
    powers = np.empty((n, max_degree + 1, npts), dtype=np.complex128)
    powers[:, 0, :] = 1.0
    for k in range(1, max_degree + 1):
        powers[:, k, :] = powers[:, k - 1, :] * points.T
    for c, row in zip(coeffs, exps):
        term = np.full(npts, c, dtype=np.complex128)
        for j, e in enumerate(row):
            if e:
                term = term * powers[j, e]
        out = out + term
    return out


def tree_sum(values):
    buf = np.array(values, dtype=np.float64)
    if buf.size == 0:
        return 0.0
    while buf.size > 1:
        m = buf.size
        paired = buf[0:m - 1:2] + buf[1:m:2]
        if m % 2:
            paired = np.append(paired, buf[-1])
        buf = paired
    return float(buf[0])
