"""Quadrature over the parameter sphere; area, volume and averaged curvature.

Weights: uniform h on the circle (exact for constants since m*h = 2*pi);
trapezoid weights h * vol(S^(n-1)) * sin(theta)^(n-1) on axisymmetric
grids (the pole factor vanishes, so the end correction is natural).

Sums go through math.fsum, which returns the correctly rounded total and
is therefore invariant under node permutations -- circle-grid rotation
equivariance of whole trajectories depends on this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph_geometry import RadialGraph, _graph_fields
from .hyptrig import gsinh_power_integral, unit_sphere_volume
from .sphere_grid import Grid, Topology


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    grid: Grid
    weights: np.ndarray


def quadrature_rule(grid: Grid) -> QuadratureRule:
    if grid.topology is Topology.CIRCLE:
        w = np.full(grid.m, grid.h)
    else:
        w = grid.h * unit_sphere_volume(grid.n - 1) * np.sin(grid.nodes) ** (grid.n - 1)
        w[0] *= 0.5
        w[-1] *= 0.5
    w.setflags(write=False)
    return QuadratureRule(grid, w)


def integrate(rule: QuadratureRule, values: np.ndarray) -> float:
    """Correctly rounded weighted sum over the grid nodes."""
    return math.fsum((rule.weights * values).tolist())


def surface_area(g: RadialGraph) -> float:
    """Total area of the graph hypersurface."""
    return integrate(quadrature_rule(g.grid), _graph_fields(g).area_element)


def enclosed_volume(g: RadialGraph) -> float:
    """Volume of the domain enclosed by the graph, using the closed-form
    radial antiderivative of gsinh^n (no nested quadrature error)."""
    rule = quadrature_rule(g.grid)
    return integrate(rule, gsinh_power_integral(g.rho.values, g.grid.n, g.params))


def averaged_mean_curvature(g: RadialGraph) -> float:
    """Area-weighted mean of the mean curvature field."""
    f = _graph_fields(g)
    rule = quadrature_rule(g.grid)
    return integrate(rule, f.area_element * f.mean_curv) / integrate(rule, f.area_element)
