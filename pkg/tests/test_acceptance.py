"""Acceptance suite: every criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass/fail
line per criterion.
"""

from __future__ import annotations

import hashlib
import math
import time
from pathlib import Path

import numpy as np
import pytest

from hypflow.cli import main
from hypflow.diagnostics import check_bounds, fit_exponential_rate, hyperboloid_curvature_oracle
from hypflow.flow import FlowConfig, FlowState, Mode, exact_mcf_sphere, run, stable_dt, step
from hypflow.graph_geometry import RadialGraph, geometry_fields, mean_curvature, offset_sphere_graph
from hypflow.hyptrig import (
    LambdaParams,
    ball_volume,
    ball_radius_for_volume,
    circumradius_bound,
    gcosh,
    gsinh,
    inradius_floor,
)
from hypflow.sphere_grid import Topology, make_grid

UNIT = LambdaParams(-1.0)


def _report(num: int, name: str, ok: bool, detail: str = ""):
    line = f"ACCEPTANCE {num} ({name}): {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    assert ok, line


def test_criterion_1_mcf_sphere_oracle():
    grid = make_grid(Topology.CIRCLE, 1, 256)
    graph = RadialGraph(grid, np.full(256, 1.0), UNIT)
    config = FlowConfig(mode=Mode.MCF, t_max=0.2, cadence=0.02, cfl=0.25,
                        renormalize_volume=False)
    started = time.perf_counter()
    trajectory = run(graph, config)
    elapsed = time.perf_counter() - started
    worst = 0.0
    for state in trajectory.states[1:]:
        exact = exact_mcf_sphere(1.0, state.t, 1, UNIT)
        worst = max(worst, float(np.max(np.abs(state.graph.rho.values - exact))) / exact)
    _report(1, "mcf sphere oracle", worst <= 1e-4 and elapsed <= 10.0,
            f"max rel err {worst:.3e}, runtime {elapsed:.2f}s")


def test_criterion_2_vpmcf_fixed_points():
    config = FlowConfig(mode=Mode.VPMCF, renormalize_volume=False)

    def drift(graph, n_steps=10_000):
        state = FlowState.from_graph(graph)
        start = graph.rho.values.copy()
        for _ in range(n_steps):
            state = step(state, stable_dt(state.graph, config), config)
        return float(np.max(np.abs(state.graph.rho.values - start)))

    circle = make_grid(Topology.CIRCLE, 1, 256)
    drift_sphere = drift(RadialGraph(circle, np.full(256, 1.0), UNIT))
    drift_offset = drift(offset_sphere_graph(circle, UNIT, 1.0, 0.2, (0.3, 0.0)))
    axi = make_grid(Topology.AXISYMMETRIC, 2, 256)
    drift_axi = drift(RadialGraph(axi, np.full(256, 1.0), UNIT))
    ok = drift_sphere <= 1e-8 and drift_offset <= 5e-3 and drift_axi <= 1e-8
    _report(2, "vpmcf fixed points", ok,
            f"sphere {drift_sphere:.2e}, offset {drift_offset:.2e}, axisym {drift_axi:.2e}")


def test_criterion_3_standard_convergence_run():
    grid = make_grid(Topology.CIRCLE, 1, 256)
    graph = RadialGraph(grid, 1.0 + 0.1 * np.cos(2.0 * grid.nodes), UNIT)
    config = FlowConfig(mode=Mode.VPMCF, t_max=10.0, cadence=0.1, cfl=0.25,
                        renormalize_volume=True)
    started = time.perf_counter()
    trajectory = run(graph, config)
    elapsed = time.perf_counter() - started
    rows = trajectory.rows
    v0 = trajectory.initial_volume

    vol_drift = max(abs(r.volume - v0) / v0 for r in rows)
    sup_ratio = rows[-1].sup_dev / rows[0].sup_dev
    min_margin = min(r.kappa_margin for r in rows)
    bounds_ok = all(
        check_bounds(r, s.graph, v0).all_passed
        for r, s in zip(rows, trajectory.states)
    )
    fit = fit_exponential_rate([r.t for r in rows], [r.sup_dev for r in rows])
    final_rho = trajectory.final_state.graph.rho.values
    psi = ball_radius_for_volume(v0, 1, UNIT)
    mean_gap = abs(float(final_rho.mean()) - psi)
    spread = float(final_rho.max() - final_rho.min())

    checks = {
        "volume": vol_drift <= 1e-10,
        "area": trajectory.max_area_increase <= 1e-8,
        "sup_dev": sup_ratio <= 1e-3,
        "margin": min_margin >= -1e-6,
        "bounds": bounds_ok,
        "rate": fit.omega > 0.0 and fit.r_squared >= 0.98,
        "limit sphere": mean_gap <= 1e-3 and spread <= 1e-3,
        "runtime": elapsed <= 60.0,
    }
    detail = (f"vol {vol_drift:.1e}; dA+ {trajectory.max_area_increase:.1e}; "
              f"sup ratio {sup_ratio:.1e}; margin {min_margin:.3f}; "
              f"omega {fit.omega:.3f} r2 {fit.r_squared:.6f}; "
              f"|mean-psi| {mean_gap:.1e}; spread {spread:.1e}; {elapsed:.1f}s")
    _report(3, "standard convergence run", all(checks.values()),
            detail + "; failed: " + str([k for k, v in checks.items() if not v]))


def test_criterion_4_oracle_equivalence():
    errors, spacings = [], []
    for m in (64, 128, 256):
        grid = make_grid(Topology.CIRCLE, 1, m)
        graph = RadialGraph(grid, 1.0 + 0.1 * np.cos(2.0 * grid.nodes), UNIT)
        diff = np.abs(mean_curvature(graph).values - hyperboloid_curvature_oracle(graph).values)
        errors.append(float(diff.max()))
        spacings.append(grid.h)
    orders = [math.log(errors[i] / errors[i + 1]) / math.log(spacings[i] / spacings[i + 1])
              for i in range(2)]
    ok = min(orders) >= 1.9 and errors[-1] <= 5e-3
    _report(4, "curvature oracle equivalence", ok,
            f"orders {orders[0]:.3f}/{orders[1]:.3f}, sup diff {errors[-1]:.2e}")


def test_criterion_5_offset_sphere_consistency():
    grid = make_grid(Topology.CIRCLE, 1, 256)
    graph = offset_sphere_graph(grid, UNIT, 1.0, 0.2, (0.3, 0.0))
    expected = math.cosh(1.2) / math.sinh(1.2)
    h_dev = float(np.max(np.abs(mean_curvature(graph).values - expected)))

    e = 1e-5
    d_shift = (offset_sphere_graph(grid, UNIT, 1.0, e).rho.values
               - offset_sphere_graph(grid, UNIT, 1.0, -e).rho.values) / (2.0 * e)
    der_err = float(np.max(np.abs(d_shift - 1.0)))
    for i, component in enumerate((np.cos(grid.nodes), np.sin(grid.nodes))):
        plus, minus = [0.0, 0.0], [0.0, 0.0]
        plus[i], minus[i] = e, -e
        d_center = (offset_sphere_graph(grid, UNIT, 1.0, 0.0, plus).rho.values
                    - offset_sphere_graph(grid, UNIT, 1.0, 0.0, minus).rho.values) / (2.0 * e)
        der_err = max(der_err, float(np.max(np.abs(d_center - component))))
    ok = h_dev <= 5e-3 and der_err <= 1e-6
    _report(5, "offset sphere cross-formulas", ok,
            f"H dev {h_dev:.2e}, derivative err {der_err:.2e}")


def test_criterion_6_identities_equivariance_determinism(tmp_path):
    # curvature-scaled trig rules on 1000 random samples
    rng = np.random.default_rng(2026)
    t = rng.uniform(0.1, 10.0, 1000)
    lams = rng.choice([-1.0, -4.0], size=1000)
    worst = 0.0
    for lam in (-1.0, -4.0):
        p = LambdaParams(lam)
        p4 = LambdaParams(4.0 * lam)
        tt = t[lams == lam]
        s, c = gsinh(tt, p), gcosh(tt, p)
        worst = max(worst, float(np.max(np.abs(c * c + lam * s * s - 1.0))))
        worst = max(worst, float(np.max(np.abs(gcosh(tt, p4) - (c * c - lam * s * s))
                                        / gcosh(tt, p4))))
        worst = max(worst, float(np.max(np.abs(gsinh(tt, p4) - s * c) / gsinh(tt, p4))))
    identities_ok = worst <= 1e-12

    # exact rotation equivariance: geometry fields and a full trajectory
    grid = make_grid(Topology.CIRCLE, 1, 256)
    rho = 1.0 + 0.1 * np.cos(2.0 * grid.nodes)
    base_fields = geometry_fields(RadialGraph(grid, rho, UNIT))
    shift = 37
    rolled_fields = geometry_fields(RadialGraph(grid, np.roll(rho, shift), UNIT))
    fields_ok = all(
        np.array_equal(np.roll(getattr(base_fields, name), shift), getattr(rolled_fields, name))
        for name in ("grad_sq", "stretch", "support_cos", "support",
                     "mean_curvature", "kappa_min", "kappa_max", "area_element")
    )
    small = make_grid(Topology.CIRCLE, 1, 64)
    rho_small = 1.0 + 0.1 * np.cos(2.0 * small.nodes)
    cfg = FlowConfig(mode=Mode.VPMCF, t_max=0.5, cadence=0.1)
    base_run = run(RadialGraph(small, rho_small, UNIT), cfg)
    rolled_run = run(RadialGraph(small, np.roll(rho_small, 11), UNIT), cfg)
    trajectory_ok = base_run.steps == rolled_run.steps and all(
        np.array_equal(np.roll(sa.graph.rho.values, 11), sb.graph.rho.values)
        and sa.h_bar == sb.h_bar
        for sa, sb in zip(base_run.states, rolled_run.states)
    )

    # radius/volume inversions round-trip
    roundtrip = 0.0
    for x in rng.uniform(0.2, 3.0, 32):
        v = float(ball_volume(x, 1, UNIT))
        roundtrip = max(roundtrip, abs(ball_radius_for_volume(v, 1, UNIT) - x))
        s = float(circumradius_bound(x, UNIT))
        roundtrip = max(roundtrip, abs(inradius_floor(s, UNIT) - x))
    for x in rng.uniform(0.2, 2.0, 8):
        v = float(ball_volume(x, 2, UNIT))
        roundtrip = max(roundtrip, abs(ball_radius_for_volume(v, 2, UNIT) - x))
    roundtrip_ok = roundtrip <= 1e-9

    # bit-identical reruns of the same configuration
    args = ["--grid", "64", "--t-max", "0.5", "--preset", "perturbed:1,0.1,2"]
    digests = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(args + ["--out", str(out)]) == 0
        blob = (out / "timeseries.csv").read_bytes() + (out / "final_state.json").read_bytes()
        digests.append(hashlib.sha256(blob).hexdigest())
    rerun_ok = digests[0] == digests[1]

    ok = identities_ok and fields_ok and trajectory_ok and roundtrip_ok and rerun_ok
    _report(6, "identity and equivariance suite", ok,
            f"trig worst {worst:.1e}; fields {fields_ok}; trajectory {trajectory_ok}; "
            f"roundtrip {roundtrip:.1e}; rerun identical {rerun_ok}")
