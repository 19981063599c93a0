"""Deterministic quadrature on the polydisk and the unit ball.

Polydisk integrals use a tensor product of per-coordinate polar rules
(Gauss-Legendre in the modulus, trapezoid in the argument) against the
unnormalized area ``dx dy``. Ball integrals use the polar decomposition
``int g dv = 2n int_0^1 rho^(2n-1) (sphere mean of g) d rho`` with the
normalized volume measure and a fixed seeded set of directions shared by
every radius.

Node contributions are reduced chunk by chunk with ``kernels.tree_sum``;
chunk boundaries depend only on the node count, so the result is
bit-identical for any number of workers.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import roots_legendre
from scipy.stats import qmc

from . import kernels
from .errors import IntegrationError, InvalidArgument

__all__ = [
    "QuadratureSpec", "DomainMeasure", "integrate_polydisk", "integrate_ball",
    "integrate", "convergence_sweep", "gauss_legendre", "sphere_directions",
]

CHUNK = 1 << 15
DEFAULT_RHO_MAX = 1.0 - 2.0 ** -12


@dataclass(frozen=True)
class QuadratureSpec:
    radial_nodes: int = 64
    angular_nodes: int = 128
    sphere_samples: int = 4096
    seed: int = 0

    def __post_init__(self):
        if self.radial_nodes < 4:
            raise InvalidArgument(f"radial_nodes must be >= 4, got {self.radial_nodes}")
        if self.angular_nodes < 8:
            raise InvalidArgument(f"angular_nodes must be >= 8, got {self.angular_nodes}")
        if self.sphere_samples < 64:
            raise InvalidArgument(f"sphere_samples must be >= 64, got {self.sphere_samples}")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidArgument(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def refined(self, level):
        """Spec with radial/angular nodes doubled and sphere samples quadrupled ``level`` times."""
        return replace(self, radial_nodes=self.radial_nodes << level,
                       angular_nodes=self.angular_nodes << level,
                       sphere_samples=self.sphere_samples << (2 * level))

    def to_dict(self):
        return {"radial_nodes": self.radial_nodes, "angular_nodes": self.angular_nodes,
                "sphere_samples": self.sphere_samples, "seed": self.seed}


@dataclass(frozen=True)
class DomainMeasure:
    """Domain plus base measure.

    ``measure`` is ``"v_alpha"`` (polydisk, ``prod (1-|z_k|^2)^alpha dx dy``),
    ``"volume"`` (ball, normalized ``dv``) or ``"tau"`` (ball,
    ``dv / (1-|z|^2)^(n+1)``). Ball measures integrate over ``|z| <= rho_max``;
    ``tau`` requires ``rho_max < 1``.
    """

    domain: str
    dimension: int
    measure: str
    alpha: float = 0.0
    rho_max: float = 1.0

    def __post_init__(self):
        if self.dimension < 1:
            raise InvalidArgument("dimension must be positive")
        if self.domain == "polydisk":
            if self.measure != "v_alpha":
                raise InvalidArgument(f"measure {self.measure!r} is not defined on the polydisk")
            if not self.alpha >= 0:
                raise InvalidArgument(f"alpha must be >= 0, got {self.alpha}")
        elif self.domain == "ball":
            if self.measure not in ("volume", "tau"):
                raise InvalidArgument(f"measure {self.measure!r} is not defined on the ball")
            if not 0 < self.rho_max <= 1:
                raise InvalidArgument(f"rho_max must lie in (0, 1], got {self.rho_max}")
            if self.measure == "tau" and not self.rho_max < 1:
                raise InvalidArgument("the invariant measure tau needs rho_max < 1")
        else:
            raise InvalidArgument(f"unknown domain {self.domain!r}")

    @classmethod
    def polydisk(cls, n, alpha=0.0):
        return cls("polydisk", n, "v_alpha", float(alpha))

    @classmethod
    def ball(cls, n, rho_max=1.0):
        return cls("ball", n, "volume", rho_max=float(rho_max))

    @classmethod
    def tau(cls, n, rho_max=DEFAULT_RHO_MAX):
        return cls("ball", n, "tau", rho_max=float(rho_max))


def gauss_legendre(m, a=0.0, b=1.0):
    """``m``-point Gauss-Legendre nodes and weights on ``[a, b]``."""
    x, w = roots_legendre(m)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def polydisk_rule(n_radial, n_angular, alpha):
    """One-coordinate polar rule: complex nodes and positive weights for ``dA_alpha``."""
    rho, wr = gauss_legendre(n_radial)
    wr = wr * rho * (1.0 - rho * rho) ** alpha
    theta = 2 * math.pi * np.arange(n_angular) / n_angular
    nodes = (rho[:, None] * np.exp(1j * theta)[None, :]).reshape(-1)
    weights = np.repeat(wr, n_angular) * (2 * math.pi / n_angular)
    return nodes, weights


def sphere_directions(n, count, seed):
    """``count`` unit vectors in C^n, deterministic in ``seed``.

    For ``n == 1`` these are equispaced points on the circle with a seeded
    rotation (exact for trigonometric polynomials of degree < count). For
    ``n >= 2`` a scrambled Sobol sequence is mapped to the sphere through
    uniform simplex coordinates for ``|zeta_k|^2`` and uniform phases.
    """
    rng = np.random.default_rng(seed)
    if n == 1:
        phase = rng.uniform(0.0, 2 * math.pi / count)
        return np.exp(1j * (2 * math.pi * np.arange(count) / count + phase)).reshape(-1, 1)
    sampler = qmc.Sobol(d=2 * n - 1, scramble=True, seed=rng)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)  # non power-of-two counts
        u = sampler.random(count)
    # stick-breaking for the uniform distribution on the simplex
    t = np.empty((count, n))
    rest = np.ones(count)
    for k in range(n - 1):
        frac = 1.0 - (1.0 - u[:, k]) ** (1.0 / (n - 1 - k))
        t[:, k] = rest * frac
        rest = rest - t[:, k]
    t[:, n - 1] = np.clip(rest, 0.0, None)
    phases = 2 * math.pi * u[:, n - 1:]
    return np.sqrt(t) * np.exp(1j * phases)


def _reduce(g, make_chunk, nchunks, workers):
    def run(c):
        points, weights = make_chunk(c)
        vals = np.asarray(g(points), dtype=np.float64)
        if vals.shape != weights.shape:
            raise IntegrationError(
                f"integrand returned shape {vals.shape}, expected {weights.shape}")
        bad = ~np.isfinite(vals)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise IntegrationError(f"non-finite integrand value {vals[i]!r}", points[i])
        return kernels.tree_sum(vals * weights)

    if workers and workers > 1 and nchunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(run, range(nchunks)))
    else:
        partials = [run(c) for c in range(nchunks)]
    return kernels.tree_sum(np.array(partials))


def integrate_polydisk(g, dm, q=None, workers=1):
    """``int_{D^n} g dV_alpha`` by the tensor polar rule.

    ``g`` maps an ``(npts, n)`` complex array to ``npts`` real values.
    """
    q = q or QuadratureSpec()
    if dm.domain != "polydisk":
        raise InvalidArgument("integrate_polydisk needs a polydisk measure")
    n = dm.dimension
    nodes, weights = polydisk_rule(q.radial_nodes, q.angular_nodes, dm.alpha)
    k = nodes.size
    total = k ** n
    nchunks = -(-total // CHUNK)
    shape = (k,) * n

    def make_chunk(c):
        idx = np.unravel_index(np.arange(c * CHUNK, min((c + 1) * CHUNK, total)), shape)
        points = np.stack([nodes[i] for i in idx], axis=1)
        w = weights[idx[0]].copy()
        for i in idx[1:]:
            w *= weights[i]
        return points, w

    return _reduce(g, make_chunk, nchunks, workers)


def ball_rule(dm, q):
    """Radial nodes/weights on ``[0, rho_max]`` and the shared directions."""
    n = dm.dimension
    rho, wr = gauss_legendre(q.radial_nodes, 0.0, dm.rho_max)
    wr = wr * 2 * n * rho ** (2 * n - 1)
    if dm.measure == "tau":
        wr = wr / (1.0 - rho * rho) ** (n + 1)
    return rho, wr, sphere_directions(n, q.sphere_samples, q.seed)


def integrate_ball(g, dm, q=None, workers=1):
    """``int_{|z| <= rho_max} g dm`` for the normalized volume or truncated tau measure."""
    q = q or QuadratureSpec()
    if dm.domain != "ball":
        raise InvalidArgument("integrate_ball needs a ball measure")
    rho, wr, dirs = ball_rule(dm, q)
    s = dirs.shape[0]
    total = rho.size * s
    nchunks = -(-total // CHUNK)

    def make_chunk(c):
        flat = np.arange(c * CHUNK, min((c + 1) * CHUNK, total))
        i, j = np.divmod(flat, s)
        return rho[i, None] * dirs[j], wr[i] / s

    return _reduce(g, make_chunk, nchunks, workers)


def integrate(g, dm, q=None, workers=1):
    if dm.domain == "polydisk":
        return integrate_polydisk(g, dm, q, workers)
    return integrate_ball(g, dm, q, workers)


def convergence_sweep(g, dm, base=None, levels=3, workers=1):
    """Integrate at ``levels`` successively refined specs; returns ``[(spec, value), ...]``."""
    base = base or QuadratureSpec()
    if levels < 2:
        raise InvalidArgument(f"a convergence sweep needs at least 2 levels, got {levels}")
    out = []
    for level in range(levels):
        spec = base.refined(level)
        out.append((spec, integrate(g, dm, spec, workers)))
    return out
