"""Finite-difference discretization of the parameter sphere S^n.

Two node layouts:

* ``CIRCLE`` -- uniform periodic grid on S^1 (hypersurface dimension 1),
  nodes theta_j = 2*pi*j/m;
* ``AXISYMMETRIC`` -- uniform polar-angle grid on [0, pi] for functions
  on S^n (n >= 2) that depend only on the polar angle, nodes
  theta_j = pi*j/(m-1) with both poles included.

Derivatives are second-order central differences.  At the axisymmetric
poles the gradient of a smooth axisymmetric function vanishes and the
Laplace-Beltrami operator has the regular limit n * f''(pole); f'' at the
poles comes from the one-sided second-order stencil.  All stencils return
exactly zero on constant input.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError

MIN_NODES = 8


class Topology(enum.Enum):
    CIRCLE = "circle"
    AXISYMMETRIC = "axisymmetric"


@dataclass(frozen=True, eq=False)
class Grid:
    topology: Topology
    n: int
    m: int
    nodes: np.ndarray
    h: float


def make_grid(topology: Topology | str, n: int, m: int) -> Grid:
    """Build a grid, validating the (topology, n, m) combination."""
    topology = Topology(topology)
    n = int(n)
    m = int(m)
    if m < MIN_NODES:
        raise ConfigurationError(f"need at least {MIN_NODES} nodes, got m={m}")
    if topology is Topology.CIRCLE:
        if n != 1:
            raise ConfigurationError(f"circle topology requires n=1, got n={n}")
        h = 2.0 * np.pi / m
    else:
        if n < 2:
            raise ConfigurationError(f"axisymmetric topology requires n>=2, got n={n}")
        h = np.pi / (m - 1)
    nodes = h * np.arange(m, dtype=float)
    nodes.setflags(write=False)
    return Grid(topology, n, m, nodes, float(h))


def grids_compatible(a: Grid, b: Grid) -> bool:
    return a.topology is b.topology and a.n == b.n and a.m == b.m


@dataclass
class ScalarField:
    """Scalar function sampled at the grid nodes."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.m,):
            raise DomainError(f"field has shape {v.shape}, grid has {self.grid.m} nodes")
        if not np.all(np.isfinite(v)):
            raise DomainError("field contains non-finite values")
        self.values = v


def _d1(grid: Grid, v: np.ndarray) -> np.ndarray:
    """Central first derivative; zero at axisymmetric poles."""
    if grid.topology is Topology.CIRCLE:
        return (np.roll(v, -1) - np.roll(v, 1)) / (2.0 * grid.h)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * grid.h)
    out[0] = 0.0
    out[-1] = 0.0
    return out


def _d2(grid: Grid, v: np.ndarray) -> np.ndarray:
    """Central second derivative; one-sided 4-point stencil at the poles,
    assembled from node differences so constants map to exact zero."""
    h2 = grid.h * grid.h
    if grid.topology is Topology.CIRCLE:
        return (np.roll(v, -1) - 2.0 * v + np.roll(v, 1)) / h2
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h2
    out[0] = (-2.0 * (v[1] - v[0]) + 3.0 * (v[2] - v[1]) - (v[3] - v[2])) / h2
    out[-1] = (-2.0 * (v[-2] - v[-1]) + 3.0 * (v[-3] - v[-2]) - (v[-4] - v[-3])) / h2
    return out


def _cot_interior(grid: Grid) -> np.ndarray:
    theta = grid.nodes[1:-1]
    return np.cos(theta) / np.sin(theta)


def _laplacian(grid: Grid, d1: np.ndarray, d2: np.ndarray) -> np.ndarray:
    """Laplace-Beltrami from precomputed derivative arrays."""
    if grid.topology is Topology.CIRCLE:
        return d2
    out = np.empty_like(d2)
    out[1:-1] = d2[1:-1] + (grid.n - 1) * _cot_interior(grid) * d1[1:-1]
    out[0] = grid.n * d2[0]
    out[-1] = grid.n * d2[-1]
    return out


def _azimuthal_hessian(grid: Grid, d1: np.ndarray, d2: np.ndarray) -> np.ndarray:
    """Hessian component along the azimuthal directions, cot(theta)*f',
    with its regular limit f'' at the poles.  Axisymmetric grids only."""
    out = np.empty_like(d1)
    out[1:-1] = _cot_interior(grid) * d1[1:-1]
    out[0] = d2[0]
    out[-1] = d2[-1]
    return out


def sphere_gradient_sq(f: ScalarField) -> ScalarField:
    """|grad f|^2 on S^n for axisymmetric/periodic data: (f')^2."""
    d1 = _d1(f.grid, f.values)
    return ScalarField(f.grid, d1 * d1)


def sphere_laplacian(f: ScalarField) -> ScalarField:
    """Laplace-Beltrami of f: f'' on the circle, f'' + (n-1) cot(theta) f'
    at axisymmetric interior nodes, n f'' at the poles."""
    v = f.values
    return ScalarField(f.grid, _laplacian(f.grid, _d1(f.grid, v), _d2(f.grid, v)))


def hessian_grad_grad(f: ScalarField) -> ScalarField:
    """Hessian of f contracted twice with grad f: f'' * (f')^2."""
    d1 = _d1(f.grid, f.values)
    d2 = _d2(f.grid, f.values)
    return ScalarField(f.grid, d2 * d1 * d1)
