"""Weight functions on the polydisk and the unit ball.

Every weight evaluates vectorized over an ``(npts, n)`` complex array and
refuses to return anything but strictly positive finite values.
"""
from __future__ import annotations

import math

import numpy as np

from . import expr as _expr
from .errors import InvalidArgument, WeightDomainError

__all__ = [
    "Weight", "StandardAlpha", "Gaussian", "ExpModulus", "Angular",
    "RadialAngularProduct", "Expression", "unit_weight", "parse_weight",
    "evaluate_weight", "dilation_ratio", "weight_from_name",
]

DOMAINS = ("polydisk", "ball")


def _as_points(z, n):
    z = np.asarray(z, dtype=np.complex128)
    if z.ndim == 1:
        z = z.reshape(1, -1)
    if z.ndim != 2 or z.shape[1] != n:
        raise InvalidArgument(f"expected points with {n} coordinates, got shape {z.shape}")
    return z


def domain_radius(points, domain):
    """Max modulus (polydisk) or Euclidean norm (ball) of each point."""
    if domain == "ball":
        return np.sqrt(np.sum(np.abs(points) ** 2, axis=1))
    return np.max(np.abs(points), axis=1)


class Weight:
    """Base class; subclasses implement ``_values(points)``."""

    kind = "weight"

    def __init__(self, dimension, domain="polydisk"):
        if int(dimension) != dimension or dimension < 1:
            raise InvalidArgument(f"dimension must be a positive integer, got {dimension!r}")
        if domain not in DOMAINS:
            raise InvalidArgument(f"domain must be one of {DOMAINS}, got {domain!r}")
        self.dimension = int(dimension)
        self.domain = domain

    def __call__(self, points):
        """Weight values at the rows of ``points``; raises on non-positive output."""
        points = _as_points(points, self.dimension)
        with np.errstate(all="ignore"):
            vals = np.asarray(self._values(points), dtype=np.float64)
        vals = np.broadcast_to(vals, (points.shape[0],))
        bad = ~(np.isfinite(vals) & (vals > 0))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise WeightDomainError(
                f"weight {self.describe()} is not strictly positive and finite "
                f"(value {vals[i]!r})", points[i])
        return vals

    def _values(self, points):
        raise NotImplementedError

    def describe(self):
        return self.kind

    def to_config(self):
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} n={self.dimension} {self.describe()}>"

    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash((type(self).__name__, self.describe(), self.dimension))


class StandardAlpha(Weight):
    """``prod_k (alpha + 1) (1 - |z_k|^2)^alpha``."""

    kind = "standard_alpha"

    def __init__(self, dimension, alpha):
        super().__init__(dimension, "polydisk")
        if not alpha >= 0:
            raise InvalidArgument(f"alpha must be >= 0, got {alpha}")
        self.alpha = float(alpha)

    def _values(self, points):
        return np.prod((self.alpha + 1) * (1 - np.abs(points) ** 2) ** self.alpha, axis=1)

    def describe(self):
        return f"standard_alpha(alpha={self.alpha:g})"

    def to_config(self):
        return {"name": "standard_alpha", "alpha": self.alpha}


class Gaussian(Weight):
    """``exp(-beta |z|^2)`` (mode ``full``) or ``exp(-beta sum x_k^2)`` (mode ``real``)."""

    kind = "gaussian"

    def __init__(self, dimension, beta, mode="full", domain="polydisk"):
        super().__init__(dimension, domain)
        if not beta > 0:
            raise InvalidArgument(f"beta must be > 0, got {beta}")
        if mode not in ("full", "real"):
            raise InvalidArgument(f"gaussian mode must be 'full' or 'real', got {mode!r}")
        self.beta = float(beta)
        self.mode = mode

    def _values(self, points):
        if self.mode == "full":
            sq = np.sum(np.abs(points) ** 2, axis=1)
        else:
            sq = np.sum(points.real ** 2, axis=1)
        return np.exp(-self.beta * sq)

    def describe(self):
        return f"gaussian(beta={self.beta:g}, mode={self.mode})"

    def to_config(self):
        name = "gaussian" if self.mode == "full" else "gaussian_real"
        return {"name": name, "beta": self.beta, "domain": self.domain}


class ExpModulus(Weight):
    """``exp(|z|)`` with the Euclidean norm."""

    kind = "exp_modulus"

    def __init__(self, dimension, domain="ball"):
        super().__init__(dimension, domain)

    def _values(self, points):
        return np.exp(np.sqrt(np.sum(np.abs(points) ** 2, axis=1)))

    def describe(self):
        return "exp_modulus"

    def to_config(self):
        return {"name": "exp_modulus", "domain": self.domain}


class _ExprWeight(Weight):
    def _compile(self, src, allowed, label):
        ast = _expr.parse(src, self.dimension)
        used = {kind for kind, _ in _expr.variables(ast)}
        extra = used - set(allowed)
        if extra:
            raise InvalidArgument(
                f"{label} expression may only use {sorted(allowed)}; found {sorted(extra)}")
        return ast


class Angular(Weight):
    """Weight depending only on the arguments ``th_k`` of the coordinates."""

    kind = "angular"

    def __init__(self, dimension, source):
        super().__init__(dimension, "polydisk")
        self.source = source
        self.ast = _ExprWeight._compile(self, source, {"th"}, "angular")

    def _values(self, points):
        return self.evaluate_angles(_expr.principal_angle(points), points)

    def evaluate_angles(self, theta, points=None):
        """Weight as a function of the ``(npts, n)`` angle array alone."""
        theta = np.asarray(theta, dtype=np.float64)
        if theta.ndim == 1:
            theta = theta.reshape(1, -1)
        with np.errstate(all="ignore"):
            vals = np.broadcast_to(
                _expr.evaluate(self.ast, {"th": theta}, points), (theta.shape[0],))
        bad = ~(np.isfinite(vals) & (vals > 0))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            pt = None if points is None else points[i]
            raise WeightDomainError(
                f"angular weight {self.source!r} is not strictly positive and finite "
                f"at theta={theta[i].tolist()}", pt)
        return vals

    def describe(self):
        return f"angular({self.source})"

    def to_config(self):
        return {"name": f"angular:{self.source}"}


class RadialAngularProduct(Weight):
    """``omega(r_1..r_n) * nu(th_1..th_n)``."""

    kind = "product"

    def __init__(self, dimension, radial_source, angular_source):
        super().__init__(dimension, "polydisk")
        self.radial_source = radial_source
        self.angular_source = angular_source
        self.radial_ast = _ExprWeight._compile(self, radial_source, {"r"}, "radial")
        self.angular = Angular(dimension, angular_source)

    def __eq__(self, other):
        return (type(self) is type(other) and self.dimension == other.dimension
                and self.radial_source == other.radial_source
                and self.angular_source == other.angular_source)

    __hash__ = Weight.__hash__

    def evaluate_radial(self, radii, points=None):
        radii = np.asarray(radii, dtype=np.float64)
        if radii.ndim == 1:
            radii = radii.reshape(1, -1)
        with np.errstate(all="ignore"):
            vals = np.broadcast_to(
                _expr.evaluate(self.radial_ast, {"r": radii}, points), (radii.shape[0],))
        bad = ~(np.isfinite(vals) & (vals > 0))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise WeightDomainError(
                f"radial factor {self.radial_source!r} is not strictly positive and "
                f"finite at r={radii[i].tolist()}", None if points is None else points[i])
        return vals

    def _values(self, points):
        return (self.evaluate_radial(np.abs(points), points)
                * self.angular.evaluate_angles(_expr.principal_angle(points), points))

    def describe(self):
        return f"product({self.radial_source} | {self.angular_source})"

    def to_config(self):
        return {"name": f"product:{self.radial_source}|{self.angular_source}"}


class Expression(Weight):
    """Weight given by an arbitrary parsed expression."""

    kind = "expression"

    def __init__(self, dimension, source, domain="polydisk"):
        super().__init__(dimension, domain)
        self.source = source
        self.ast = _expr.parse(source, self.dimension)

    def _values(self, points):
        return _expr.evaluate(self.ast, _expr.point_variables(points), points)

    def describe(self):
        return f"expr({self.source})"

    def to_config(self):
        return {"name": f"expr:{self.source}", "domain": self.domain}


def unit_weight(dimension):
    """``w == 1``; an angular weight, so the exact norm formulas apply."""
    return Angular(dimension, "1")


def parse_weight(src, n, domain="polydisk"):
    """Expression weight parsed from ``src`` (see ``wbergman.expr`` for the grammar)."""
    return Expression(n, src, domain)


def weight_from_name(name, n, **params):
    """Build a weight from its configuration name.

    Names: ``standard_alpha``, ``gaussian``, ``gaussian_real``,
    ``exp_modulus``, ``unit``, ``angular:<expr>``,
    ``product:<radial expr>|<angular expr>``, ``expr:<expr>``.
    """
    domain = params.get("domain")
    if name == "standard_alpha":
        return StandardAlpha(n, params.get("alpha", 0.0))
    if name in ("gaussian", "gaussian_real"):
        mode = "full" if name == "gaussian" else "real"
        return Gaussian(n, params.get("beta", 1.0), mode, domain or "polydisk")
    if name == "exp_modulus":
        return ExpModulus(n, domain or "ball")
    if name == "unit":
        return unit_weight(n)
    if name.startswith("angular:"):
        return Angular(n, name[len("angular:"):])
    if name.startswith("product:"):
        body = name[len("product:"):]
        if body.count("|") != 1:
            raise InvalidArgument("product weight needs '<radial expr>|<angular expr>'")
        radial, angular = body.split("|")
        return RadialAngularProduct(n, radial, angular)
    if name.startswith("expr:"):
        return Expression(n, name[len("expr:"):], domain or "polydisk")
    raise InvalidArgument(f"unknown weight name {name!r}")


def _check_inside(w, points, scale=1.0):
    rad = domain_radius(points, w.domain)
    bad = ~(rad < scale)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        where = "polydisk" if w.domain == "polydisk" else "ball"
        raise InvalidArgument(
            f"point {points[i].tolist()} lies outside the open {where}"
            + ("" if scale == 1.0 else f" of radius {scale:g}"))


def evaluate_weight(w, z):
    """``w(z)`` at one interior point."""
    points = _as_points(z, w.dimension)
    _check_inside(w, points)
    return float(w(points)[0])


def dilation_ratio(w, z, r, k):
    """``r**k * w(z / r) / w(z)`` -- the quantity bounded by C in the dilation condition."""
    r = float(r)
    if not 0.0 < r < 1.0:
        raise InvalidArgument(f"r must lie in (0, 1), got {r}")
    if int(k) != k or k < 0:
        raise InvalidArgument(f"k must be a non-negative integer, got {k}")
    points = _as_points(z, w.dimension)
    _check_inside(w, points, r)
    vals = dilation_ratios(w, points, np.full(points.shape[0], r), int(k))
    return float(vals[0]) if np.ndim(z) == 1 else vals


def dilation_ratios(w, points, radii, k):
    """Vectorized ``dilation_ratio`` without domain checks (callers guarantee them)."""
    radii = np.asarray(radii, dtype=np.float64)
    return radii ** k * w(points / radii[:, None]) / w(points)


def angular_integral_nodes(m):
    """Uniform trapezoid nodes and weight on ``[0, 2*pi)`` with ``m`` points."""
    return 2 * math.pi * np.arange(m) / m, 2 * math.pi / m
