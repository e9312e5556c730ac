from __future__ import annotations

import numpy as np
import pytest

from hypflow import LambdaParams, RadialGraph, Topology, make_grid


@pytest.fixture
def unit_params() -> LambdaParams:
    return LambdaParams(-1.0)


def circle_graph(values, params, m=None):
    values = np.asarray(values, dtype=float)
    grid = make_grid(Topology.CIRCLE, 1, m or values.size)
    return RadialGraph(grid, values, params)


def sphere_graph(radius, params, m=256, topology=Topology.CIRCLE, n=1):
    grid = make_grid(topology, n, m)
    return RadialGraph(grid, np.full(grid.m, float(radius)), params)


def perturbed_circle(radius, amplitude, harmonic, params, m=256):
    grid = make_grid(Topology.CIRCLE, 1, m)
    return RadialGraph(grid, radius + amplitude * np.cos(harmonic * grid.nodes), params)
