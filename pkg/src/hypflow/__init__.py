"""Mean curvature flow and volume-preserving mean curvature flow of
star-shaped hypersurfaces in hyperbolic space, represented as radial
graphs over the unit sphere, with a diagnostics suite for the flows'
qualitative properties (volume conservation, h-convexity preservation,
radius bounds, exponential convergence to a geodesic sphere)."""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    DomainError,
    HypflowError,
    NumericalFailure,
    PoleError,
    SnapshotFormatError,
)
from .hyptrig import LambdaParams
from .sphere_grid import Grid, ScalarField, Topology, make_grid
from .graph_geometry import GeometryFields, RadialGraph, offset_sphere_graph
from .flow import FlowConfig, FlowState, Mode, Scheme, Trajectory, exact_mcf_sphere, run, step
from .presets import PresetKind, PresetSpec, build_preset
from .diagnostics import DiagnosticsRow, RateFit, fit_exponential_rate, h_convexity_margin

__all__ = [
    "ConfigurationError",
    "DiagnosticsRow",
    "DomainError",
    "FlowConfig",
    "FlowState",
    "GeometryFields",
    "Grid",
    "HypflowError",
    "LambdaParams",
    "Mode",
    "NumericalFailure",
    "PoleError",
    "PresetKind",
    "PresetSpec",
    "RadialGraph",
    "RateFit",
    "ScalarField",
    "Scheme",
    "SnapshotFormatError",
    "Topology",
    "Trajectory",
    "build_preset",
    "exact_mcf_sphere",
    "fit_exponential_rate",
    "h_convexity_margin",
    "make_grid",
    "offset_sphere_graph",
    "run",
    "step",
]
