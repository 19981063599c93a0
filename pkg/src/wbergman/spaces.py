"""Weighted Bergman and Besov norms, plus closed-form coefficient norms.

Quadrature norms integrate ``|f|^p w`` (or the derivative-based Besov
integrands) numerically. The ``exact`` kind evaluates the p = 2 norm for
angular and radial-times-angular weights directly from the Taylor
coefficients, which gives an oracle for the quadrature path and a cheap way
to compute Taylor-polynomial approximation errors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidArgument, InvalidSpec
from .integrate import (
    DEFAULT_RHO_MAX, DomainMeasure, QuadratureSpec, convergence_sweep,
    gauss_legendre, integrate,
)
from .series import (
    PowerSeries, evaluate_many, graded_lex, partial_derivative, radial_derivative,
)
from .weights import Angular, RadialAngularProduct, Weight, unit_weight

__all__ = [
    "NormSpec", "NormResult", "norm", "bergman_norm", "besov_ball_norm",
    "radial_besov_norm", "angular_exact_norm", "product_exact_norm",
    "taylor_error", "besov_rho_sweep", "radial_moment", "angular_integral",
    "NORM_KINDS",
]

NORM_KINDS = ("bergman_polydisk", "bergman_ball", "besov_ball", "dirichlet_ball",
              "radial_besov_polydisk", "exact")


@dataclass(frozen=True)
class NormSpec:
    """Which norm to compute and how.

    ``seminorm`` drops the point evaluations at the origin from the Besov
    norms. ``error_levels >= 2`` runs a quadrature refinement sweep and
    reports the difference of the last two levels as ``error_estimate``.
    ``cross_terms`` (exact kind only) includes the off-diagonal Gram entries
    produced by the Fourier coefficients of a non-constant angular factor.
    """

    dimension: int
    kind: str
    p: float = 2.0
    alpha: float = 0.0
    N: int = 1
    weight: Weight = None
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    rho_max: float = DEFAULT_RHO_MAX
    seminorm: bool = False
    cross_terms: bool = False
    error_levels: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.kind not in NORM_KINDS:
            raise InvalidSpec(f"unknown norm kind {self.kind!r}; expected one of {NORM_KINDS}")
        if self.weight is None:
            object.__setattr__(self, "weight", unit_weight(self.dimension))
        if self.weight.dimension != self.dimension:
            raise InvalidSpec(
                f"weight has dimension {self.weight.dimension}, norm has {self.dimension}")
        if not self.p > 0:
            raise InvalidSpec(f"p must be positive, got {self.p}")
        if not self.alpha >= 0:
            raise InvalidSpec(f"alpha must be >= 0, got {self.alpha}")
        if self.kind == "dirichlet_ball" and self.p != 2:
            raise InvalidSpec("the Dirichlet norm has p = 2")
        if self.kind in ("besov_ball", "dirichlet_ball"):
            if int(self.N) != self.N or self.N < 1:
                raise InvalidSpec(f"N must be a positive integer, got {self.N}")
            if not self.p * self.N > self.dimension:
                raise InvalidSpec(
                    f"Besov norm needs p*N > n (p={self.p}, N={self.N}, n={self.dimension})")
            if not 0 < self.rho_max < 1:
                raise InvalidSpec(f"rho_max must lie in (0, 1), got {self.rho_max}")
        if self.kind == "radial_besov_polydisk" and not self.p >= 2:
            raise InvalidSpec(f"the radial-derivative Besov norm needs p >= 2, got {self.p}")
        if self.kind == "exact":
            if self.p != 2:
                raise InvalidSpec("closed-form norms exist only for p = 2")
            if not isinstance(self.weight, (Angular, RadialAngularProduct)):
                raise InvalidSpec("closed-form norms need an angular or product weight")
        if self.error_levels == 1 or self.error_levels < 0:
            raise InvalidSpec("error_levels must be 0 (off) or >= 2")

    def with_(self, **changes):
        from dataclasses import replace
        return replace(self, **changes)

    def to_dict(self):
        return {
            "dimension": self.dimension, "kind": self.kind, "p": self.p,
            "alpha": self.alpha, "N": self.N, "weight": self.weight.to_config(),
            "quadrature": self.quadrature.to_dict(), "rho_max": self.rho_max,
            "seminorm": self.seminorm, "cross_terms": self.cross_terms,
        }


@dataclass
class NormResult:
    """``value`` is the norm; ``pieces`` are additive contributions to ``value_pow_p``."""

    value: float
    value_pow_p: float
    p: float
    error_estimate: float = 0.0
    pieces: dict = field(default_factory=dict)

    @classmethod
    def from_pieces(cls, pieces, p, error_estimate=0.0):
        total = kernels.tree_sum(np.array(list(pieces.values()), dtype=np.float64))
        total = max(total, 0.0)
        return cls(total ** (1.0 / p), total, p, error_estimate, dict(pieces))

    def to_json(self):
        return {"value": self.value, "value_pow_p": self.value_pow_p,
                "error_estimate": self.error_estimate, "pieces": dict(self.pieces)}


def _label(prefix, m):
    return f"{prefix}[{','.join(str(e) for e in m)}]"


def _check_dim(f, spec):
    if f.dimension != spec.dimension:
        raise InvalidArgument(
            f"series dimension {f.dimension} does not match norm dimension {spec.dimension}")


def _integrate_with_estimate(g, dm, spec):
    """Integral at the NormSpec quadrature, and an error estimate in p-th-power units."""
    if spec.error_levels >= 2:
        sweep = convergence_sweep(g, dm, spec.quadrature, spec.error_levels, spec.workers)
        return sweep[-1][1], abs(sweep[-1][1] - sweep[-2][1])
    return integrate(g, dm, spec.quadrature, spec.workers), 0.0


def _value_error(pow_total, pow_err, p):
    if pow_err == 0.0:
        return 0.0
    lo = max(pow_total - pow_err, 0.0)
    return abs(pow_total ** (1.0 / p) - lo ** (1.0 / p))


def bergman_norm(f, spec):
    """``(int |f|^p w dmu)^(1/p)`` on the polydisk (``dV_alpha``) or the ball (``dv``)."""
    _check_dim(f, spec)
    if spec.kind == "bergman_polydisk":
        dm = DomainMeasure.polydisk(spec.dimension, spec.alpha)
    elif spec.kind == "bergman_ball":
        dm = DomainMeasure.ball(spec.dimension)
    else:
        raise InvalidSpec(f"bergman_norm cannot compute kind {spec.kind!r}")
    p, w = spec.p, spec.weight

    def g(points):
        return np.abs(evaluate_many(f, points)) ** p * w(points)

    total, err = _integrate_with_estimate(g, dm, spec)
    res = NormResult.from_pieces({"integral": total}, p)
    res.error_estimate = _value_error(res.value_pow_p, err, p)
    return res


def besov_ball_norm(f, spec):
    """Besov norm on the ball from order-N partial derivatives.

    The invariant measure's singular factor is cancelled against
    ``(1-|z|^2)^(pN)`` before integrating, leaving
    ``|d^m f|^p w (1-|z|^2)^(pN-n-1)`` against ``dv`` on ``|z| <= rho_max``.
    """
    _check_dim(f, spec)
    if spec.kind not in ("besov_ball", "dirichlet_ball"):
        raise InvalidSpec(f"besov_ball_norm cannot compute kind {spec.kind!r}")
    n, p, N, w = spec.dimension, spec.p, int(spec.N), spec.weight
    pieces = {}
    if not spec.seminorm:
        for d in range(N):
            for m in graded_lex(n, d):
                deriv_at_0 = f.coefficient(m) * math.prod(math.factorial(e) for e in m)
                pieces[_label("origin", m)] = abs(deriv_at_0) ** p
    dm = DomainMeasure.ball(n, spec.rho_max)
    exponent = p * N - n - 1
    err_total = 0.0
    for m in graded_lex(n, N):
        fm = partial_derivative(f, m)
        if len(fm) == 0:
            pieces[_label("integral", m)] = 0.0
            continue

        def g(points, fm=fm):
            damp = (1.0 - np.sum(np.abs(points) ** 2, axis=1)) ** exponent
            return np.abs(evaluate_many(fm, points)) ** p * w(points) * damp

        val, err = _integrate_with_estimate(g, dm, spec)
        pieces[_label("integral", m)] = val
        err_total += err
    res = NormResult.from_pieces(pieces, p)
    res.error_estimate = _value_error(res.value_pow_p, err_total, p)
    return res


def besov_rho_sweep(f, spec, levels=3):
    """Besov norms at ``rho_max_j = 1 - (1 - rho_max) / 4**j``; returns ``[(rho_max, result)]``."""
    if levels < 2:
        raise InvalidArgument("a rho_max sweep needs at least 2 levels")
    out = []
    for j in range(levels):
        rho = 1.0 - (1.0 - spec.rho_max) / 4 ** j
        out.append((rho, besov_ball_norm(f, spec.with_(rho_max=rho))))
    return out


def radial_besov_norm(f, spec):
    """``|f(0)|^p + int prod(1-|z_j|^2)^(p-2) |Rf|^p w dV`` on the polydisk, to the power 1/p."""
    _check_dim(f, spec)
    if spec.kind != "radial_besov_polydisk":
        raise InvalidSpec(f"radial_besov_norm cannot compute kind {spec.kind!r}")
    p, w = spec.p, spec.weight
    rf = radial_derivative(f)
    pieces = {}
    if not spec.seminorm:
        pieces["origin"] = abs(f.coefficient((0,) * f.dimension)) ** p
    err = 0.0
    if len(rf) == 0:
        pieces["integral"] = 0.0
    else:
        def g(points):
            damp = np.prod(1.0 - np.abs(points) ** 2, axis=1) ** (p - 2)
            return damp * np.abs(evaluate_many(rf, points)) ** p * w(points)

        pieces["integral"], err = _integrate_with_estimate(
            g, DomainMeasure.polydisk(spec.dimension, 0.0), spec)
    res = NormResult.from_pieces(pieces, p)
    res.error_estimate = _value_error(res.value_pow_p, err, p)
    return res


# ---------------------------------------------------------------------------
# closed-form coefficient norms (p = 2)

def radial_moment(s, alpha):
    """``int_0^1 rho^(2s+1) (1-rho^2)^alpha d rho = G(s+1) G(alpha+1) / (2 G(s+alpha+2))``."""
    return math.exp(math.lgamma(s + 1) + math.lgamma(alpha + 1)
                    - math.lgamma(s + alpha + 2) - math.log(2.0))


def _angle_grid(n, m):
    theta = 2 * math.pi * np.arange(m) / m
    grids = np.meshgrid(*([theta] * n), indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)


def angular_integral(w, q=None):
    """``int_{T^n} w(theta) d theta`` by the product trapezoid rule."""
    q = q or QuadratureSpec()
    ang = w.angular if isinstance(w, RadialAngularProduct) else w
    m = q.angular_nodes
    vals = ang.evaluate_angles(_angle_grid(w.dimension, m))
    return kernels.tree_sum(vals) * (2 * math.pi / m) ** w.dimension


def _angular_fourier(w, q):
    """``c[d] = h^n sum_theta w(theta) exp(i d.theta)``, indexed by ``d mod M``."""
    ang = w.angular if isinstance(w, RadialAngularProduct) else w
    m, n = q.angular_nodes, w.dimension
    vals = ang.evaluate_angles(_angle_grid(n, m)).reshape((m,) * n)
    return np.fft.ifftn(vals) * (2 * math.pi) ** n


def _product_moments(w, alpha, q, exps_pairs):
    """Tensor Gauss-Legendre ``int_{I^n} prod r_k^(e_k) (1-r_k^2)^alpha r_k omega(r) dr``.

    ``exps_pairs`` is an ``(K, n)`` array of exponents ``e_k`` (``2 m_k`` on
    the diagonal, ``m_k + m'_k`` off it).
    """
    n = w.dimension
    x, wx = gauss_legendre(q.radial_nodes)
    base = wx * x * (1.0 - x * x) ** alpha
    grids = np.meshgrid(*([np.arange(x.size)] * n), indexing="ij")
    idx = np.stack([g.reshape(-1) for g in grids], axis=1)
    radii = x[idx]
    weight = np.prod(base[idx], axis=1) * w.evaluate_radial(radii)
    logr = np.log(radii)
    out = np.empty(len(exps_pairs))
    for i, e in enumerate(exps_pairs):
        out[i] = kernels.tree_sum(weight * np.exp(logr @ np.asarray(e, dtype=float)))
    return out


def _exact_norm(f, w, alpha, q, cross_terms, radial_of):
    q = q or QuadratureSpec()
    if f.dimension != w.dimension:
        raise InvalidArgument("series and weight dimensions differ")
    keys = list(f.coefficients)
    coeffs = np.array([f.coefficient(m) for m in keys], dtype=np.complex128)
    if not keys:
        return NormResult.from_pieces({}, 2.0)
    diag = radial_of([[2 * e for e in m] for m in keys])
    pieces = {}
    if not cross_terms:
        total_w = angular_integral(w, q)
        for m, a, g in zip(keys, coeffs, diag):
            pieces[_label("coef", m)] = abs(a) ** 2 * total_w * g
        return NormResult.from_pieces(pieces, 2.0)
    c = _angular_fourier(w, q)
    mm = q.angular_nodes
    k = len(keys)
    ex = np.array(keys, dtype=np.int64)
    pair_e = (ex[:, None, :] + ex[None, :, :]).reshape(-1, w.dimension)
    moments = radial_of(pair_e).reshape(k, k)
    diff = (ex[:, None, :] - ex[None, :, :]) % mm
    fourier = c[tuple(diff[..., j] for j in range(w.dimension))]
    gram = moments * fourier
    for i, m in enumerate(keys):
        pieces[_label("coef", m)] = float((abs(coeffs[i]) ** 2 * gram[i, i]).real)
    full = np.real(coeffs @ gram @ np.conj(coeffs))
    diag_sum = kernels.tree_sum(np.array(list(pieces.values())))
    pieces["cross"] = float(full - diag_sum)
    return NormResult.from_pieces(pieces, 2.0)


def angular_exact_norm(f, w, alpha, q=None, cross_terms=False):
    """Closed-form ``A^2`` norm on ``D^n`` for an angular weight.

    Without cross terms the squared norm is
    ``(int_{T^n} w) * sum_m |a_m|^2 prod_k B_alpha(m_k)`` with
    ``B_alpha(m) = G(m+1) G(alpha+1) / (2 G(m+alpha+2))``. That sum equals the
    integral exactly only when the weight's Fourier coefficients at the
    differences ``m - m'`` vanish (e.g. constant weights); ``cross_terms=True``
    evaluates the full Hermitian form instead.
    """
    if not isinstance(w, Angular):
        raise InvalidArgument(f"angular_exact_norm needs an angular weight, got {w!r}")
    if not alpha >= 0:
        raise InvalidArgument(f"alpha must be >= 0, got {alpha}")

    def radial_of(exps):
        return np.array([math.prod(radial_moment(e / 2.0, alpha) for e in row)
                         for row in exps])

    return _exact_norm(f, w, alpha, q, cross_terms, radial_of)


def product_exact_norm(f, w, alpha, q=None, cross_terms=False):
    """Closed-form ``A^2`` norm for ``w = omega(r) nu(theta)``: ``(int nu) sum |a_m|^2 gamma_m``."""
    if not isinstance(w, RadialAngularProduct):
        raise InvalidArgument(f"product_exact_norm needs a product weight, got {w!r}")
    if not alpha >= 0:
        raise InvalidArgument(f"alpha must be >= 0, got {alpha}")
    q = q or QuadratureSpec()

    def radial_of(exps):
        return _product_moments(w, alpha, q, exps)

    return _exact_norm(f, w, alpha, q, cross_terms, radial_of)


def product_moment(w, m, alpha, q=None):
    """``gamma_m = int_{I^n} prod r_k^(2 m_k) (1-r_k^2)^alpha r_k omega(r) dr``."""
    return float(_product_moments(w, alpha, q or QuadratureSpec(), [[2 * e for e in m]])[0])


def exact_norm(f, spec):
    _check_dim(f, spec)
    if isinstance(spec.weight, Angular):
        return angular_exact_norm(f, spec.weight, spec.alpha, spec.quadrature, spec.cross_terms)
    return product_exact_norm(f, spec.weight, spec.alpha, spec.quadrature, spec.cross_terms)


def taylor_error(f, k, spec):
    """Closed-form ``||f - p_k||`` where ``p_k`` keeps the terms of degree ``<= k``."""
    if spec.kind != "exact":
        raise InvalidSpec("taylor_error needs an exact (angular or product weight) norm spec")
    tail = PowerSeries(f.dimension, {m: a for m, a in f if sum(m) > k}, f.max_degree)
    return exact_norm(tail, spec).value


_DISPATCH = {
    "bergman_polydisk": bergman_norm,
    "bergman_ball": bergman_norm,
    "besov_ball": besov_ball_norm,
    "dirichlet_ball": besov_ball_norm,
    "radial_besov_polydisk": radial_besov_norm,
    "exact": exact_norm,
}


def norm(f, spec):
    """Norm of ``f`` as described by ``spec``."""
    return _DISPATCH[spec.kind](f, spec)
