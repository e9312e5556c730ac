"""Extrinsic geometry of radial graphs over the parameter sphere.

A positive function rho on S^n defines the star-shaped hypersurface
u -> exp_p(rho(u) u) in the ambient hyperbolic space.  Writing
sr = gsinh(rho), cr = gcosh(rho) and the stretch factor

    stretch = sqrt(sr^2 + |grad rho|^2),

the induced metric in an orthonormal frame {e_i} of S^n is
g_ij = e_i(rho) e_j(rho) + sr^2 delta_ij, the outward unit normal has
radial component sr/stretch (positive for graphs), and the second
fundamental form is

    alpha_ij = -(sr * Hess_ij(rho) - sr^2 cr delta_ij
                 - 2 cr e_i(rho) e_j(rho)) / stretch.

Mean curvature is the trace of g^{-1} alpha, i.e. the *sum* of the
principal curvatures; a geodesic sphere of radius r has mean curvature
n * gcoth(r) > 0.  In the circle/axisymmetric modes g^{-1} alpha is
diagonal, so the principal curvatures come from the meridional and
azimuthal components directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, DomainError
from .hyptrig import LambdaParams, gcosh, gsinh
from .sphere_grid import (
    Grid,
    ScalarField,
    Topology,
    _azimuthal_hessian,
    _d1,
    _d2,
    _laplacian,
    grids_compatible,
)


@dataclass
class RadialGraph:
    """Radial graph: positive distance function rho sampled on a grid."""

    grid: Grid
    rho: ScalarField
    params: LambdaParams

    def __post_init__(self):
        if not isinstance(self.rho, ScalarField):
            self.rho = ScalarField(self.grid, np.asarray(self.rho, dtype=float))
        elif not grids_compatible(self.rho.grid, self.grid):
            raise ConfigurationError("rho is sampled on an incompatible grid")
        if not np.all(self.rho.values > 0.0):
            raise DomainError("radial function must be positive everywhere")


class _Fields(NamedTuple):
    """Raw per-node arrays shared by the geometry ops and the flow."""

    sr: np.ndarray
    cr: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    grad_sq: np.ndarray
    lap: np.ndarray
    hess_gg: np.ndarray
    stretch_sq: np.ndarray
    stretch: np.ndarray
    support_cos: np.ndarray
    support: np.ndarray
    mean_curv: np.ndarray
    kappa_min: np.ndarray
    kappa_max: np.ndarray
    area_element: np.ndarray


def _compute_fields(grid: Grid, rho: np.ndarray, params: LambdaParams) -> _Fields:
    k = params.sqrt_abs_lam
    kr = k * rho
    sr = np.sinh(kr) / k
    cr = np.cosh(kr)
    d1 = _d1(grid, rho)
    d2 = _d2(grid, rho)
    grad_sq = d1 * d1
    lap = _laplacian(grid, d1, d2)
    hess_gg = d2 * grad_sq
    stretch_sq = sr * sr + grad_sq
    stretch = np.sqrt(stretch_sq)
    support_cos = sr / stretch
    support = sr * support_cos
    n = grid.n
    mean_curv = -(lap - hess_gg / stretch_sq) / (sr * stretch) + (cr / stretch) * (
        n + grad_sq / stretch_sq
    )
    # meridional curvature: alpha_11 / g_11 with g_11 = stretch^2
    kappa_mer = -(sr * d2 - sr * sr * cr - 2.0 * cr * grad_sq) / (stretch * stretch_sq)
    if n == 1:
        kappa_min = kappa_mer
        kappa_max = kappa_mer
        area_element = stretch.copy()
    else:
        h_az = _azimuthal_hessian(grid, d1, d2)
        kappa_az = -(sr * h_az - sr * sr * cr) / (stretch * sr * sr)
        kappa_min = np.minimum(kappa_mer, kappa_az)
        kappa_max = np.maximum(kappa_mer, kappa_az)
        area_element = sr ** (n - 1) * stretch
    return _Fields(
        sr, cr, d1, d2, grad_sq, lap, hess_gg, stretch_sq, stretch,
        support_cos, support, mean_curv, kappa_min, kappa_max, area_element,
    )


def _graph_fields(g: RadialGraph) -> _Fields:
    return _compute_fields(g.grid, g.rho.values, g.params)


@dataclass
class GeometryFields:
    """Per-node geometric quantities of a radial graph."""

    grid: Grid
    grad_sq: np.ndarray
    stretch: np.ndarray
    support_cos: np.ndarray
    support: np.ndarray
    mean_curvature: np.ndarray
    kappa_min: np.ndarray
    kappa_max: np.ndarray
    area_element: np.ndarray


def geometry_fields(g: RadialGraph) -> GeometryFields:
    """All geometric fields of the graph in one pass."""
    f = _graph_fields(g)
    return GeometryFields(
        g.grid, f.grad_sq, f.stretch, f.support_cos, f.support,
        f.mean_curv, f.kappa_min, f.kappa_max, f.area_element,
    )


def radial_support(g: RadialGraph):
    """(stretch, support_cos, support) fields of the graph.

    stretch = sqrt(gsinh(rho)^2 + |grad rho|^2) is the norm of the
    unnormalized radial normal, support_cos = gsinh(rho)/stretch the
    radial component of the outward unit normal, and
    support = gsinh(rho) * support_cos the support function relative to
    the graph center.
    """
    f = _graph_fields(g)
    grid = g.grid
    return (
        ScalarField(grid, f.stretch),
        ScalarField(grid, f.support_cos),
        ScalarField(grid, f.support),
    )


def mean_curvature(g: RadialGraph) -> ScalarField:
    """Mean curvature (sum of principal curvatures) of the graph:

    H = -(lap rho - Hess(grad,grad)/stretch^2) / (gsinh(rho) stretch)
        + gcosh(rho)/stretch * (n + |grad rho|^2/stretch^2)
    """
    return ScalarField(g.grid, _graph_fields(g).mean_curv)


def principal_curvatures(g: RadialGraph):
    """(kappa_min, kappa_max) fields: extreme eigenvalues of the shape
    operator.  Their weighted sum (meridional + (n-1) azimuthal) equals
    the mean curvature to rounding error."""
    f = _graph_fields(g)
    return ScalarField(g.grid, f.kappa_min), ScalarField(g.grid, f.kappa_max)


def area_element(g: RadialGraph) -> ScalarField:
    """Area element relative to the S^n measure: gsinh(rho)^(n-1) * stretch."""
    return ScalarField(g.grid, _graph_fields(g).area_element)


def offset_sphere_graph(
    grid: Grid,
    params: LambdaParams,
    radius: float,
    radius_shift: float = 0.0,
    center=None,
) -> RadialGraph:
    """Radial graph of the geodesic sphere of radius ``radius + radius_shift``
    centered at normal coordinates ``center`` (vector in R^(n+1)) relative
    to the graph origin.

    Per node u the radial distance rho solves the hyperbolic law of
    cosines

        gcosh(R) = gcosh(rho) gcosh(d)
                   + lam * gsinh(rho) * (gsinh(d)/d) * <u, center>

    with R = radius + radius_shift and d = |center|; the graph origin must
    be interior (R > d), otherwise the sphere is not star-shaped about it.
    Solved by bracketed bisection on (0, R + d] plus a Newton polish.
    """
    R = float(radius) + float(radius_shift)
    if center is None:
        center = np.zeros(grid.n + 1)
    center = np.asarray(center, dtype=float)
    if center.shape != (grid.n + 1,):
        raise ConfigurationError(
            f"center must be a vector in R^{grid.n + 1}, got shape {center.shape}"
        )
    d = float(np.linalg.norm(center))
    if R <= 0.0:
        raise ConfigurationError(f"offset sphere radius must be positive, got {R}")
    if d >= R:
        raise ConfigurationError(
            f"graph origin lies outside the offset sphere (|center|={d} >= radius {R})"
        )
    if d == 0.0:
        return RadialGraph(grid, np.full(grid.m, R), params)
    if grid.topology is Topology.AXISYMMETRIC and np.any(center[1:] != 0.0):
        raise ConfigurationError("axisymmetric grids require the center on the polar axis")

    theta = grid.nodes
    if grid.topology is Topology.CIRCLE:
        uz = center[0] * np.cos(theta) + center[1] * np.sin(theta)
    else:
        uz = center[0] * np.cos(theta)

    k = params.sqrt_abs_lam
    k2 = -params.lam
    c_target = float(gcosh(R, params))
    cd = float(gcosh(d, params))
    sd_ratio = float(gsinh(d, params)) / d

    def resid(rho):
        return np.cosh(k * rho) * cd + params.lam * (np.sinh(k * rho) / k) * sd_ratio * uz - c_target

    lo = np.zeros(grid.m)
    hi = np.full(grid.m, R + d)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        neg = resid(mid) < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    rho = 0.5 * (lo + hi)
    for _ in range(2):
        slope = k2 * (np.sinh(k * rho) / k) * cd + params.lam * np.cosh(k * rho) * sd_ratio * uz
        rho = rho - resid(rho) / slope
    return RadialGraph(grid, rho, params)
