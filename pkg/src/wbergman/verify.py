"""Grid certification of the dilation condition and dilation/density experiments.

A passing ``ConditionReport`` is evidence on a finite grid, not a proof:
the supremum it reports is a lower bound for the true one.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InvalidArgument
from .series import dilate, truncate
from .spaces import norm
from .weights import dilation_ratios, domain_radius

__all__ = [
    "Grid", "ConditionReport", "MonotoneReport", "ConvergenceReport",
    "check_condition", "find_min_k", "check_monotone", "dilation_convergence",
    "density_experiment", "DEFAULT_EPS",
]

DEFAULT_EPS = 2.0 ** -20
DEFAULT_BOUND = 1e6


@dataclass(frozen=True)
class Grid:
    """Sampling grid: radii count, shell count, direction count and seed."""

    radii: int = 32
    shells: int = 32
    directions: int = 16
    seed: int = 0

    def __post_init__(self):
        if min(self.radii, self.shells, self.directions) < 1:
            raise InvalidArgument("grid counts must be positive")

    def refined(self):
        """A grid containing every point of this one."""
        return Grid(2 * self.radii, 2 * self.shells - 1, 2 * self.directions, self.seed)

    def directions_for(self, n, domain):
        rng = np.random.default_rng(self.seed)
        raw = rng.normal(size=(self.directions, n, 2))
        u = raw[..., 0] + 1j * raw[..., 1]
        return u / domain_radius(u, domain)[:, None]


@dataclass
class ConditionReport:
    weight: str
    k_tested: int
    r0: float
    grid: dict
    sup_ratio: float
    C_estimate: float
    tail_C: float
    bound: float
    passed: bool
    argmax_r: float
    argmax_z: list
    note: str = "certified on grid"

    def to_json(self):
        return asdict(self)


@dataclass
class MonotoneReport:
    weight: str
    k: int
    r_min: float
    grid: dict
    samples: int
    monotone: list
    fraction_monotone: float
    worst_slope: float
    worst_r: float
    worst_z: list
    passed: bool

    def to_json(self):
        return asdict(self)


@dataclass
class ConvergenceReport:
    norm_spec: dict
    norm_f: float
    rows: list = field(default_factory=list)   # (r, ||f_r||, ||f_r - f||)
    limsup_check: bool = False
    vanishing_check: bool = False

    def to_json(self):
        return {
            "norm_spec": self.norm_spec, "norm_f": self.norm_f,
            "rows": [{"r": r, "norm_fr": a, "norm_diff": b} for r, a, b in self.rows],
            "limsup_check": self.limsup_check, "vanishing_check": self.vanishing_check,
        }

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(["r", "norm_fr", "norm_diff"])
        for row in self.rows:
            writer.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def _complex_list(z):
    return [[float(c.real), float(c.imag)] for c in np.asarray(z).reshape(-1)]


def check_condition(w, k, r0=0.5, grid=None, bound=DEFAULT_BOUND, eps=DEFAULT_EPS):
    """Largest ``r^k w(z/r) / w(z)`` over a grid with ``r0 <= r < 1``, ``|z| < r``.

    Radii are ``r0 + j (1 - r0 - eps) / J`` for ``j = 0..J``; shells are
    ``|z| = t r`` with ``t`` evenly spaced in ``[0.1, 1 - eps]``, measured in
    the weight's domain norm; directions are seeded.
    """
    grid = grid or Grid()
    if not 0.0 < r0 < 1.0:
        raise InvalidArgument(f"r0 must lie in (0, 1), got {r0}")
    if int(k) != k or k < 0:
        raise InvalidArgument(f"k must be a non-negative integer, got {k}")
    n = w.dimension
    radii = r0 + np.arange(grid.radii + 1) * (1.0 - r0 - eps) / grid.radii
    shells = np.linspace(0.1, 1.0 - eps, grid.shells)
    dirs = grid.directions_for(n, w.domain)
    rr = np.repeat(radii, shells.size * dirs.shape[0])
    tt = np.tile(np.repeat(shells, dirs.shape[0]), radii.size)
    uu = np.tile(dirs, (radii.size * shells.size, 1))
    points = (rr * tt)[:, None] * uu
    ratios = dilation_ratios(w, points, rr, int(k))
    if not np.all(np.isfinite(ratios)):
        i = int(np.flatnonzero(~np.isfinite(ratios))[0])
        sup, best = math.inf, i
    else:
        best = int(np.argmax(ratios))   # first maximum = lexicographically smallest (r, t, dir)
        sup = float(ratios[best])
    tail = rr >= 0.9
    tail_c = float(np.max(ratios[tail])) if tail.any() else float("nan")
    return ConditionReport(
        weight=w.describe(), k_tested=int(k), r0=float(r0),
        grid={**asdict(grid), "eps": eps}, sup_ratio=sup, C_estimate=sup,
        tail_C=tail_c, bound=float(bound), passed=bool(math.isfinite(sup) and sup <= bound),
        argmax_r=float(rr[best]), argmax_z=_complex_list(points[best]))


def find_min_k(w, k_max=8, r0=0.5, grid=None, bound=DEFAULT_BOUND, eps=DEFAULT_EPS):
    """Smallest ``k <= k_max`` whose grid supremum is at most ``bound``.

    Returns ``(k_min or None, reports)`` with one report per ``k`` tried.
    """
    if not 0 <= k_max <= 64:
        raise InvalidArgument(f"k_max must lie in 0..64, got {k_max}")
    reports = []
    for k in range(k_max + 1):
        rep = check_condition(w, k, r0, grid, bound, eps)
        reports.append(rep)
        if rep.passed:
            return k, reports
    return None, reports


def check_monotone(w, k, grid=None, r_min=0.0, h=1e-4, tol=-1e-9, shell_range=(0.05, 0.95)):
    """Check that ``r -> r^k w(z/r)`` is nondecreasing on ``(max(|z|, r_min), 1)``.

    Each sampled z gets ``grid.radii`` values of r; slopes are forward
    differences with step ``h``; a slope below ``tol`` is a violation.
    """
    grid = grid or Grid()
    n = w.dimension
    shells = np.linspace(shell_range[0], shell_range[1], grid.shells)
    dirs = grid.directions_for(n, w.domain)
    zs = (shells[:, None, None] * dirs[None, :, :]).reshape(-1, n)
    lo = np.maximum(domain_radius(zs, w.domain), r_min)
    hi = 1.0 - h - DEFAULT_EPS
    if np.any(lo >= hi):
        raise InvalidArgument("no admissible r for some sampled z; lower r_min or the shells")
    frac = (np.arange(grid.radii) + 1.0) / (grid.radii + 1.0)
    r = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
    pts = np.repeat(zs, grid.radii, axis=0)
    rflat = r.reshape(-1)

    def F(radius):
        return radius ** k * w(pts / radius[:, None])

    slopes = ((F(rflat + h) - F(rflat)) / h).reshape(r.shape)
    per_z = np.all(slopes >= tol, axis=1)
    worst = int(np.argmin(slopes))
    zi, ri = divmod(worst, grid.radii)
    return MonotoneReport(
        weight=w.describe(), k=int(k), r_min=float(r_min), grid=asdict(grid),
        samples=int(zs.shape[0]), monotone=[bool(x) for x in per_z],
        fraction_monotone=float(np.mean(per_z)), worst_slope=float(slopes.flat[worst]),
        worst_r=float(r[zi, ri]), worst_z=_complex_list(zs[zi]), passed=bool(per_z.all()))


def dilation_convergence(f, spec, radii, tol=1e-9, threshold=1e-2, window=3):
    """Rows ``(r, ||f_r||, ||f_r - f||)`` for increasing radii.

    ``limsup_check``: every ``||f_r||`` in the final ``window`` rows is at most
    ``||f|| (1 + tol)``. ``vanishing_check``: the last difference is at most
    ``threshold * ||f||`` and the differences do not increase over the window.
    """
    radii = [float(r) for r in radii]
    if any(not 0.0 < r < 1.0 for r in radii):
        raise InvalidArgument("radii must lie in (0, 1)")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise InvalidArgument("radii must be strictly increasing")
    norm_f = norm(f, spec).value
    rows = []
    for r in radii:
        fr = dilate(f, r)
        rows.append((r, norm(fr, spec).value, norm(fr - f, spec).value))
    tail = rows[-window:]
    limsup = all(a <= norm_f * (1.0 + tol) for _, a, _ in tail)
    diffs = [b for _, _, b in tail]
    scale = norm_f if norm_f > 0 else 1.0
    vanishing = bool(rows) and rows[-1][2] <= threshold * scale and all(
        y <= x for x, y in zip(diffs, diffs[1:]))
    return ConvergenceReport(spec.to_dict(), norm_f, rows, bool(limsup), bool(vanishing))


def density_experiment(f, spec, r, degrees):
    """Rows ``(d, ||truncate(f_r, d) - f||)``: the two-step approximation f ~ f_r ~ polynomial."""
    if not 0.0 < r < 1.0:
        raise InvalidArgument(f"r must lie in (0, 1), got {r}")
    fr = dilate(f, r)
    return [(int(d), norm(truncate(fr, int(d)) - f, spec).value) for d in degrees]


def density_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["degree", "error"])
    for d, e in rows:
        writer.writerow([d, repr(float(e))])
    return buf.getvalue()
