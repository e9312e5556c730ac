"""Lossless text snapshots of flow states.

JSON documents with the radial samples serialized through Python float
repr, which round-trips doubles exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DomainError, SnapshotFormatError
from .flow import FlowState
from .graph_geometry import RadialGraph
from .hyptrig import LambdaParams
from .sphere_grid import make_grid

SCHEMA_VERSION = 1


def write_snapshot(state: FlowState, path) -> None:
    grid = state.graph.grid
    doc = {
        "schema_version": SCHEMA_VERSION,
        "lambda": state.graph.params.lam,
        "topology": grid.topology.value,
        "n": grid.n,
        "m": grid.m,
        "t": state.t,
        "rho": state.graph.rho.values.tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def read_snapshot(path) -> FlowState:
    """Exact inverse of write_snapshot on the rho array; schema or
    invariant violations raise SnapshotFormatError."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SnapshotFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise SnapshotFormatError(f"{path}: expected a JSON object")
    missing = {"schema_version", "lambda", "topology", "n", "m", "t", "rho"} - doc.keys()
    if missing:
        raise SnapshotFormatError(f"{path}: missing fields {sorted(missing)}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SnapshotFormatError(
            f"{path}: unsupported schema version {doc['schema_version']}"
        )
    try:
        grid = make_grid(doc["topology"], int(doc["n"]), int(doc["m"]))
        params = LambdaParams(float(doc["lambda"]))
        rho = np.asarray(doc["rho"], dtype=float)
        graph = RadialGraph(grid, rho, params)
    except (DomainError, ValueError, TypeError) as exc:
        raise SnapshotFormatError(f"{path}: invalid snapshot content ({exc})") from exc
    return FlowState.from_graph(graph, t=float(doc["t"]))
