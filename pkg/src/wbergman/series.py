"""Truncated multi-index power series ``f(z) = sum_m a_m z^m``.

Coefficients live in a sparse map keyed by multi-index tuples, so a
degree-400 series in one variable and a small polynomial in three
variables use the same representation.
"""
from __future__ import annotations

import itertools
import json
import math
import numbers

import numpy as np

from . import kernels
from .errors import InvalidArgument

__all__ = [
    "MultiIndex", "PowerSeries", "multi_index", "graded_lex", "monomial",
    "evaluate", "evaluate_many", "dilate", "partial_derivative",
    "radial_derivative", "truncate", "homogeneous_part",
]

MultiIndex = tuple


def multi_index(entries, n=None):
    """Validate ``entries`` as a multi-index (tuple of non-negative ints)."""
    try:
        m = tuple(int(e) for e in entries)
    except (TypeError, ValueError):
        raise InvalidArgument(f"multi-index entries must be integers: {entries!r}")
    if any(e != orig for e, orig in zip(m, entries)):
        raise InvalidArgument(f"multi-index entries must be integers: {entries!r}")
    if any(e < 0 for e in m):
        raise InvalidArgument(f"multi-index entries must be non-negative: {m}")
    if n is not None and len(m) != n:
        raise InvalidArgument(f"multi-index {m} has length {len(m)}, expected {n}")
    return m


def _grlex_key(m):
    return (sum(m), tuple(-e for e in m))


def graded_lex(n, degree):
    """All multi-indices of length ``n`` with ``|m| == degree``, in graded-lex order."""
    if degree < 0:
        return []
    out = [
        tuple(b - a - 1 for a, b in zip((-1,) + c, c + (degree + n - 1,)))
        for c in itertools.combinations(range(degree + n - 1), n - 1)
    ]
    return sorted(out, key=_grlex_key)


class PowerSeries:
    """Immutable truncated power series in ``dimension`` complex variables.

    Parameters
    ----------
    dimension : int
        Number of variables ``n``.
    coefficients : mapping
        Multi-index -> complex coefficient. Zero entries are dropped.
    max_degree : int, optional
        Truncation bound; defaults to the largest stored total degree.
    """

    __slots__ = ("_n", "_coeffs", "_max_degree", "_packed")

    def __init__(self, dimension, coefficients=None, max_degree=None):
        if not isinstance(dimension, numbers.Integral) or dimension < 1:
            raise InvalidArgument(f"dimension must be a positive integer, got {dimension!r}")
        coeffs = {}
        for m, a in (coefficients or {}).items():
            m = multi_index(m, dimension)
            a = complex(a)
            if not (math.isfinite(a.real) and math.isfinite(a.imag)):
                raise InvalidArgument(f"non-finite coefficient at {m}")
            if a != 0:
                coeffs[m] = a
        top = max((sum(m) for m in coeffs), default=0)
        if max_degree is None:
            max_degree = top
        elif max_degree < top:
            raise InvalidArgument(
                f"max_degree {max_degree} is below stored degree {top}")
        self._n = int(dimension)
        self._coeffs = dict(sorted(coeffs.items(), key=lambda kv: _grlex_key(kv[0])))
        self._max_degree = int(max_degree)
        self._packed = None

    @classmethod
    def from_1d(cls, coefficients, max_degree=None):
        """One-variable series from the list ``[a_0, a_1, ...]``."""
        return cls(1, {(k,): a for k, a in enumerate(coefficients)}, max_degree)

    @classmethod
    def constant(cls, dimension, value=1.0):
        return cls(dimension, {(0,) * dimension: value})

    @property
    def dimension(self):
        return self._n

    @property
    def max_degree(self):
        return self._max_degree

    @property
    def coefficients(self):
        """Copy of the nonzero coefficients in graded-lex order."""
        return dict(self._coeffs)

    def coefficient(self, m):
        return self._coeffs.get(tuple(m), 0j)

    def __len__(self):
        return len(self._coeffs)

    def __iter__(self):
        return iter(self._coeffs.items())

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self._n == other._n and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self._n, frozenset(self._coeffs.items())))

    def __repr__(self):
        terms = " + ".join(f"({a:.6g})*z^{m}" for m, a in self._coeffs.items()) or "0"
        return f"PowerSeries(n={self._n}, max_degree={self._max_degree}: {terms})"

    def _check_compatible(self, other):
        if not isinstance(other, PowerSeries):
            raise InvalidArgument(f"expected PowerSeries, got {type(other).__name__}")
        if other._n != self._n:
            raise InvalidArgument(
                f"dimension mismatch: {self._n} vs {other._n}")

    def __add__(self, other):
        if isinstance(other, numbers.Number):
            other = PowerSeries.constant(self._n, other)
        self._check_compatible(other)
        out = dict(self._coeffs)
        for m, a in other._coeffs.items():
            out[m] = out.get(m, 0j) + a
        return PowerSeries(self._n, out, max(self._max_degree, other._max_degree))

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(self._n, {m: -a for m, a in self._coeffs.items()},
                           self._max_degree)

    def __sub__(self, other):
        if isinstance(other, numbers.Number):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if not isinstance(c, numbers.Number):
            return NotImplemented
        return PowerSeries(self._n, {m: c * a for m, a in self._coeffs.items()},
                           self._max_degree)

    __rmul__ = __mul__

    def packed(self):
        """``(coeffs, exps)`` arrays in graded-lex order, cached."""
        if self._packed is None:
            coeffs = np.array(list(self._coeffs.values()), dtype=np.complex128)
            exps = np.array(list(self._coeffs.keys()), dtype=np.int64).reshape(
                len(coeffs), self._n)
            coeffs.setflags(write=False)
            exps.setflags(write=False)
            self._packed = (coeffs, exps)
        return self._packed

    # JSON literal: {"dim": n, "terms": [{"m": [...], "re": x, "im": y}, ...]}
    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            n = obj["dim"]
            terms = obj["terms"]
        except (KeyError, TypeError):
            raise InvalidArgument('series literal needs "dim" and "terms"')
        coeffs = {}
        for term in terms:
            m = multi_index(term["m"], n)
            if m in coeffs:
                raise InvalidArgument(f"duplicate multi-index {list(m)} in series literal")
            coeffs[m] = complex(float(term.get("re", 0.0)), float(term.get("im", 0.0)))
        return cls(n, coeffs, obj.get("max_degree"))

    def to_json(self):
        return {
            "dim": self._n,
            "max_degree": self._max_degree,
            "terms": [{"m": list(m), "re": a.real, "im": a.imag}
                      for m, a in self._coeffs.items()],
        }


def monomial(m, coeff=1.0):
    m = multi_index(m)
    return PowerSeries(len(m), {m: coeff})


def evaluate(f, z):
    """Value of ``f`` at one point ``z`` (length ``f.dimension``)."""
    z = np.asarray(z, dtype=np.complex128).reshape(-1)
    if z.size != f.dimension:
        raise InvalidArgument(
            f"point has {z.size} coordinates, series has dimension {f.dimension}")
    return complex(evaluate_many(f, z.reshape(1, -1))[0])


def evaluate_many(f, points):
    """Values of ``f`` at each row of the ``(npts, n)`` complex array ``points``."""
    points = np.asarray(points, dtype=np.complex128)
    if points.ndim != 2 or points.shape[1] != f.dimension:
        raise InvalidArgument(
            f"points must have shape (npts, {f.dimension}), got {points.shape}")
    coeffs, exps = f.packed()
    degree = int(exps.max()) if exps.size else 0
    return kernels.eval_monomials(coeffs, exps, points, degree)


def dilate(f, r):
    """``f_r(z) = f(r z)``: coefficient ``a_m`` becomes ``r**|m| * a_m``."""
    r = float(r)
    if not 0.0 <= r <= 1.0:
        raise InvalidArgument(f"dilation radius must lie in [0, 1], got {r}")
    return PowerSeries(f.dimension,
                       {m: a * r ** sum(m) for m, a in f},
                       f.max_degree)


def partial_derivative(f, m):
    """``d^|m| f / dz_1^{m_1} ... dz_n^{m_n}``."""
    d = multi_index(m, f.dimension)
    order = sum(d)
    out = {}
    for k, a in f:
        if all(kj >= dj for kj, dj in zip(k, d)):
            factor = 1
            for kj, dj in zip(k, d):
                factor *= math.perm(kj, dj)
            out[tuple(kj - dj for kj, dj in zip(k, d))] = a * float(factor)
    return PowerSeries(f.dimension, out, max(f.max_degree - order, 0))


def radial_derivative(f):
    """``Rf = sum_k z_k df/dz_k``, i.e. ``a_m -> |m| a_m``."""
    return PowerSeries(f.dimension, {m: sum(m) * a for m, a in f}, f.max_degree)


def truncate(f, k):
    """Taylor polynomial keeping the terms with ``|m| <= k``."""
    if k < 0:
        raise InvalidArgument(f"truncation degree must be non-negative, got {k}")
    return PowerSeries(f.dimension, {m: a for m, a in f if sum(m) <= k},
                       min(k, f.max_degree))


def homogeneous_part(f, k):
    """The degree-``k`` homogeneous component ``f_k``."""
    return PowerSeries(f.dimension, {m: a for m, a in f if sum(m) == k},
                       f.max_degree)
