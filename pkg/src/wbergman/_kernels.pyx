# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: monomial summation at many points, fixed-tree reduction.

Both routines perform exactly the floating-point operations of the NumPy
versions in ``_kernels_py`` and in the same order.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


DEF BLOCK = 64


def eval_monomials(const double complex[::1] coeffs,
                   const cnp.int64_t[:, ::1] exps,
                   const double complex[:, ::1] points,
                   int max_degree):
    """Evaluate sum_m coeffs[m] * prod_j points[:, j] ** exps[m, j].

    Points are processed in blocks so the per-term inner loop runs over
    contiguous memory.
    """
    cdef Py_ssize_t npts = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    cdef Py_ssize_t nterms = coeffs.shape[0]
    cdef Py_ssize_t stride = max_degree + 1
    cdef Py_ssize_t start, nb, b, j, k, t, row
    cdef cnp.int64_t e
    cdef double cr, ci, tmp
    out = np.zeros(npts, dtype=np.complex128)
    cdef double complex[::1] res = out
    cdef double *pw_re
    cdef double *pw_im
    cdef double tr[BLOCK]
    cdef double ti[BLOCK]
    cdef double accr[BLOCK]
    cdef double acci[BLOCK]
    if npts == 0 or nterms == 0:
        return out
    pw_re = <double *> malloc(n * stride * BLOCK * sizeof(double))
    pw_im = <double *> malloc(n * stride * BLOCK * sizeof(double))
    if pw_re == NULL or pw_im == NULL:
        free(pw_re)
        free(pw_im)
        raise MemoryError()
    try:
        with nogil:
            start = 0
            while start < npts:
                nb = npts - start
                if nb > BLOCK:
                    nb = BLOCK
                # powers table: row (j, k) holds z_j^k for every point of the block
                for j in range(n):
                    row = j * stride * BLOCK
                    for b in range(nb):
                        pw_re[row + b] = 1.0
                        pw_im[row + b] = 0.0
                    for k in range(1, stride):
                        for b in range(nb):
                            pw_re[row + k * BLOCK + b] = (
                                pw_re[row + (k - 1) * BLOCK + b] * points[start + b, j].real
                                - pw_im[row + (k - 1) * BLOCK + b] * points[start + b, j].imag)
                            pw_im[row + k * BLOCK + b] = (
                                pw_re[row + (k - 1) * BLOCK + b] * points[start + b, j].imag
                                + pw_im[row + (k - 1) * BLOCK + b] * points[start + b, j].real)
                for b in range(nb):
                    accr[b] = 0.0
                    acci[b] = 0.0
                for t in range(nterms):
                    cr = coeffs[t].real
                    ci = coeffs[t].imag
                    for b in range(nb):
                        tr[b] = cr
                        ti[b] = ci
                    for j in range(n):
                        e = exps[t, j]
                        if e != 0:
                            row = (j * stride + e) * BLOCK
                            for b in range(nb):
                                tmp = tr[b] * pw_re[row + b] - ti[b] * pw_im[row + b]
                                ti[b] = tr[b] * pw_im[row + b] + ti[b] * pw_re[row + b]
                                tr[b] = tmp
                    for b in range(nb):
                        accr[b] = accr[b] + tr[b]
                        acci[b] = acci[b] + ti[b]
                for b in range(nb):
                    res[start + b] = accr[b] + 1j * acci[b]
                start = start + nb
    finally:
        free(pw_re)
        free(pw_im)
    return out


def tree_sum(const double[::1] values):
    """Sum by repeated adjacent pairing; odd tails are carried to the next level."""
    cdef Py_ssize_t m = values.shape[0]
    cdef Py_ssize_t h, i
    cdef double result
    if m == 0:
        return 0.0
    cdef double *buf = <double *> malloc(m * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(m):
                buf[i] = values[i]
            while m > 1:
                h = m // 2
                for i in range(h):
                    buf[i] = buf[2 * i] + buf[2 * i + 1]
                if m % 2:
                    buf[h] = buf[m - 1]
                    m = h + 1
                else:
                    m = h
            result = buf[0]
    finally:
        free(buf)
    return result
