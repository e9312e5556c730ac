"""Named initial-condition generators for tests and the CLI.

Built-in presets are checked for strict h-convexity at build time and
rejected otherwise; resuming arbitrary (possibly non-convex) data goes
through the custom snapshot preset, which only enforces the radial-graph
invariants.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .diagnostics import h_convexity_margin
from .errors import ConfigurationError
from .graph_geometry import RadialGraph, offset_sphere_graph
from .hyptrig import LambdaParams
from .snapshots import read_snapshot
from .sphere_grid import Topology, make_grid


class PresetKind(enum.Enum):
    SPHERE = "sphere"
    PERTURBED = "perturbed"
    OFFSET = "offset"
    CUSTOM = "custom"


@dataclass(frozen=True)
class PresetSpec:
    kind: PresetKind
    n: int = 1
    m: int = 256
    lam: float = -1.0
    radius: float = 1.0
    amplitude: float = 0.0
    harmonic: int = 2
    radius_shift: float = 0.0
    center: tuple[float, ...] = ()
    path: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PresetKind(self.kind))


def build_preset(spec: PresetSpec) -> RadialGraph:
    """Build the named graph; invalid parameters raise ConfigurationError."""
    if spec.kind is PresetKind.CUSTOM:
        if not spec.path:
            raise ConfigurationError("custom preset needs a snapshot path")
        graph = read_snapshot(spec.path).graph
        if graph.grid.n != spec.n or graph.grid.m != spec.m or graph.params.lam != spec.lam:
            raise ConfigurationError(
                f"snapshot (n={graph.grid.n}, m={graph.grid.m}, lambda={graph.params.lam}) "
                f"contradicts the requested (n={spec.n}, m={spec.m}, lambda={spec.lam})"
            )
        return graph

    topology = Topology.CIRCLE if spec.n == 1 else Topology.AXISYMMETRIC
    grid = make_grid(topology, spec.n, spec.m)
    params = LambdaParams(spec.lam)

    if spec.kind is PresetKind.SPHERE:
        if not spec.radius > 0.0:
            raise ConfigurationError(f"sphere radius must be positive, got {spec.radius}")
        graph = RadialGraph(grid, np.full(grid.m, float(spec.radius)), params)
    elif spec.kind is PresetKind.PERTURBED:
        if not spec.radius > 0.0:
            raise ConfigurationError(f"base radius must be positive, got {spec.radius}")
        if not 0.0 <= spec.amplitude < spec.radius:
            raise ConfigurationError(
                f"perturbation amplitude must satisfy 0 <= a < r0, got a={spec.amplitude}"
            )
        if spec.harmonic < 0:
            raise ConfigurationError(f"harmonic index must be nonnegative, got {spec.harmonic}")
        if topology is Topology.CIRCLE:
            values = spec.radius + spec.amplitude * np.cos(spec.harmonic * grid.nodes)
        else:
            legendre = np.polynomial.legendre.Legendre.basis(spec.harmonic)
            values = spec.radius + spec.amplitude * legendre(np.cos(grid.nodes))
        graph = RadialGraph(grid, values, params)
    elif spec.kind is PresetKind.OFFSET:
        center = np.asarray(spec.center if spec.center else np.zeros(spec.n + 1), dtype=float)
        graph = offset_sphere_graph(grid, params, spec.radius, spec.radius_shift, center)
    else:  # pragma: no cover - enum is exhaustive
        raise ConfigurationError(f"unknown preset kind {spec.kind}")

    margin = h_convexity_margin(graph)
    if margin <= 0.0:
        raise ConfigurationError(
            f"{spec.kind.value} preset is not h-convex at this resolution "
            f"(margin {margin:.3e}); use a custom snapshot for non-convex data"
        )
    return graph
