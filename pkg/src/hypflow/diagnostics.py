"""Empirical checks of the qualitative flow properties on trajectories.

Covers the h-convexity margin, the inradius/farthest-distance/support
bounds for h-convex domains, exponential-rate fitting of decaying
diagnostics, and an independent curvature oracle that differentiates the
hyperboloid-model embedding directly (no shared code path with the
graph-based curvature formula).

Proxy conventions: the coordinate origin stands in for the inball center,
so min(rho) is used as the inradius and max(rho) as the farthest boundary
distance.  For near-spherical graphs these bracket the true values; all
bound checks carry a configurable slack (default 5e-3).  Bounds are only
asserted for graphs whose h-convexity margin is >= -1e-6, since they fail
to be meaningful otherwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError
from .graph_geometry import RadialGraph, _graph_fields
from .hyptrig import ball_radius_for_volume, circumradius_gap, gtanh, inradius_floor
from .sphere_grid import ScalarField, Topology

MARGIN_TOLERANCE = 1e-6


@dataclass(frozen=True)
class DiagnosticsRow:
    """One time sample of the scalar diagnostics of a flow state."""

    t: float
    area: float
    volume: float
    h_bar: float
    sup_dev: float
    kappa_margin: float
    rho_min: float
    rho_max: float
    inradius_lower: float
    inradius_upper: float
    renorm_delta: float


@dataclass(frozen=True)
class RateFit:
    """Log-linear fit y ~ amplitude * exp(-omega * t) over a window."""

    omega: float
    amplitude: float
    r_squared: float
    window: tuple[float, float]


@dataclass(frozen=True)
class BoundCheck:
    name: str
    passed: bool
    observed: float
    limit: float


@dataclass(frozen=True)
class BoundsReport:
    applicable: bool
    checks: tuple[BoundCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def h_convexity_margin(g: RadialGraph) -> float:
    """min kappa - sqrt(|lam|); positive iff strictly h-convex at this
    resolution (every normal curvature exceeds the horosphere value)."""
    f = _graph_fields(g)
    return float(np.min(f.kappa_min)) - g.params.sqrt_abs_lam


def check_bounds(row: DiagnosticsRow, g: RadialGraph, initial_volume: float,
                 slack: float = 5e-3) -> BoundsReport:
    """Evaluate the h-convex radius/support bounds on one flow sample.

    Not applicable (empty report) when the h-convexity margin is below
    -MARGIN_TOLERANCE.  Failures are report entries, not exceptions.
    """
    params = g.params
    if abs(params.lam) != 1.0:
        warnings.warn(
            "radius-bound constants use the literal sqrt(|lambda|)*log(...) gap; "
            "their scaling for |lambda| != 1 is untested territory",
            stacklevel=2,
        )
    if row.kappa_margin < -MARGIN_TOLERANCE:
        return BoundsReport(False, ())

    psi = ball_radius_for_volume(initial_volume, g.grid.n, params)
    floor_r = inradius_floor(psi, params)
    k = params.sqrt_abs_lam
    rho_min, rho_max = row.rho_min, row.rho_max
    min_support_cos = float(np.min(_graph_fields(g).support_cos))

    maxd_limit = rho_min + float(circumradius_gap(rho_min, params))
    support_limit = k * float(gtanh(rho_min, params))
    diameter_limit = 2.0 * (psi + k * math.log(2.0))

    checks = (
        BoundCheck("inradius_lower", rho_min >= floor_r - slack, rho_min, floor_r),
        BoundCheck("inradius_upper", rho_min <= psi + slack, rho_min, psi),
        BoundCheck("max_distance", rho_max <= maxd_limit + slack, rho_max, maxd_limit),
        BoundCheck("support", min_support_cos >= support_limit - slack,
                   min_support_cos, support_limit),
        BoundCheck("diameter", 2.0 * rho_max <= diameter_limit + slack,
                   2.0 * rho_max, diameter_limit),
    )
    return BoundsReport(True, checks)


def fit_exponential_rate(times, values, window: tuple[float, float] | None = None) -> RateFit:
    """Least-squares line through (t, log y); omega is minus the slope.

    Defaults to the trailing half of the sampled interval.  Requires at
    least 8 strictly positive samples in the window.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise DomainError("times and values must be 1-d arrays of equal length")
    if window is None:
        window = (t[0] + 0.5 * (t[-1] - t[0]), t[-1])
    lo, hi = float(window[0]), float(window[1])
    mask = (t >= lo) & (t <= hi)
    if int(np.count_nonzero(mask)) < 8:
        raise DomainError(f"need at least 8 samples in window [{lo}, {hi}]")
    tw = t[mask]
    yw = y[mask]
    if np.any(yw <= 0.0):
        raise DomainError("nonpositive samples in the fit window; series unusable")
    ly = np.log(yw)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    if ss_tot == 0.0:
        return RateFit(0.0, float(yw[0]), 0.0, (lo, hi))
    slope, intercept = np.polyfit(tw, ly, 1)
    ss_res = float(np.sum((slope * tw + intercept - ly) ** 2))
    return RateFit(float(-slope), float(np.exp(intercept)),
                   1.0 - ss_res / ss_tot, (lo, hi))


def _mdot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minkowski inner product, signature (-,+,+), on stacked 3-vectors."""
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def hyperboloid_curvature_oracle(g: RadialGraph) -> ScalarField:
    """Mean (geodesic) curvature of a circle graph, computed independently.

    Embeds the curve in the hyperboloid sheet {<x,x> = 1/lam, x0 > 0} of
    Minkowski 3-space, takes central differences of the embedding, and
    projects the acceleration onto the in-surface normal obtained by
    Gram-Schmidt from the radial direction (outward orientation, so
    circles about the origin come out positive).  Agreement with the
    graph-formula curvature is O(h^2).
    """
    if g.grid.topology is not Topology.CIRCLE:
        raise ConfigurationError("hyperboloid oracle supports circle grids only")
    k = g.params.sqrt_abs_lam
    theta = g.grid.nodes
    rho = g.rho.values
    sh = np.sinh(k * rho)
    ch = np.cosh(k * rho)
    emb = np.stack([ch / k, sh * np.cos(theta) / k, sh * np.sin(theta) / k])
    h = g.grid.h
    vel = (np.roll(emb, -1, axis=1) - np.roll(emb, 1, axis=1)) / (2.0 * h)
    acc = (np.roll(emb, -1, axis=1) - 2.0 * emb + np.roll(emb, 1, axis=1)) / (h * h)

    surf_normal = k * emb                       # unit timelike, <nu,nu> = -1
    acc_tan = acc + _mdot(acc, surf_normal) * surf_normal
    radial = np.stack([sh, ch * np.cos(theta), ch * np.sin(theta)])  # unit spacelike
    speed_sq = _mdot(vel, vel)
    normal = radial - (_mdot(radial, vel) / speed_sq) * vel
    normal = normal / np.sqrt(_mdot(normal, normal))
    kappa = -_mdot(acc_tan, normal) / speed_sq
    return ScalarField(g.grid, kappa)
