"""Render diagnostic figures for a completed run directory.

Works from the delimited output alone (plus the manifest for the
run constants), so it can be pointed at any finished run:

    hypflow --figures on ...        # render as part of a run
    python -m hypflow.report DIR    # render after the fact
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .cli import CSV_HEADER
from .diagnostics import fit_exponential_rate
from .errors import DomainError, SnapshotFormatError
from .hyptrig import LambdaParams, ball_radius_for_volume, inradius_floor
from .snapshots import read_snapshot
from .sphere_grid import Topology


def load_timeseries(path) -> dict[str, np.ndarray]:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise SnapshotFormatError(f"{path}: unexpected time-series header")
    columns = CSV_HEADER.split(",")
    data = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    return {name: data[:, i] for i, name in enumerate(columns)}


def render_run_figures(run_dir) -> list[Path]:
    run_dir = Path(run_dir)
    ts = load_timeseries(run_dir / "timeseries.csv")
    manifest = json.loads((run_dir / "manifest.json").read_text(encoding="utf-8"))
    lam = float(manifest["config"]["lambda"])
    n = int(manifest["config"]["dim"])
    v0 = float(manifest["initial_volume"])
    params = LambdaParams(lam)
    t = ts["t"]
    written: list[Path] = []

    fig = Figure(figsize=(10, 7.5))
    axes = fig.subplots(2, 2)

    ax = axes[0][0]
    positive = ts["sup_dev"] > 0
    ax.semilogy(t[positive], ts["sup_dev"][positive], ".-", ms=3, label="sup |H - H_avg|")
    try:
        fit = fit_exponential_rate(t, ts["sup_dev"])
        tw = np.linspace(fit.window[0], fit.window[1], 64)
        ax.semilogy(tw, fit.amplitude * np.exp(-fit.omega * tw), "--",
                    label=f"fit: {fit.amplitude:.2e} exp(-{fit.omega:.3f} t), "
                          f"r2={fit.r_squared:.4f}")
    except DomainError:
        pass
    ax.set_xlabel("t")
    ax.set_title("curvature deviation")
    ax.legend(fontsize=8)

    ax = axes[0][1]
    ax.plot(t, ts["area"], label="area")
    ax.set_xlabel("t")
    ax.set_ylabel("area")
    ax2 = ax.twinx()
    ax2.plot(t, (ts["volume"] - v0) / v0, color="tab:red", label="relative volume drift")
    ax2.set_ylabel("(V - V0)/V0", color="tab:red")
    ax.set_title("area decrease / volume conservation")

    ax = axes[1][0]
    psi = ball_radius_for_volume(v0, n, params)
    floor_r = inradius_floor(psi, params)
    ax.plot(t, ts["rho_min"], label="min rho")
    ax.plot(t, ts["rho_max"], label="max rho")
    ax.axhline(psi, ls="--", color="gray", label="ball radius of V0")
    ax.axhline(floor_r, ls=":", color="gray", label="inradius floor")
    ax.set_xlabel("t")
    ax.set_title("radius envelope and bounds")
    ax.legend(fontsize=8)

    ax = axes[1][1]
    ax.plot(t, ts["kappa_margin"])
    ax.axhline(0.0, ls="--", color="gray")
    ax.set_xlabel("t")
    ax.set_title("h-convexity margin (min kappa - sqrt|lambda|)")

    fig.tight_layout()
    target = run_dir / "diagnostics.png"
    fig.savefig(target, dpi=130)
    written.append(target)

    snapshot_path = run_dir / "final_state.json"
    if snapshot_path.exists():
        state = read_snapshot(snapshot_path)
        grid = state.graph.grid
        rho = state.graph.rho.values
        fig = Figure(figsize=(5, 5))
        if grid.topology is Topology.CIRCLE:
            ax = fig.add_subplot(projection="polar")
            theta = np.append(grid.nodes, grid.nodes[0])
            ax.plot(theta, np.append(rho, rho[0]))
            ax.set_title(f"final profile, t={state.t:g}")
        else:
            ax = fig.add_subplot()
            ax.plot(grid.nodes, rho)
            ax.set_xlabel("polar angle")
            ax.set_ylabel("rho")
            ax.set_title(f"final profile, t={state.t:g}")
        fig.tight_layout()
        target = run_dir / "final_profile.png"
        fig.savefig(target, dpi=130)
        written.append(target)
    return written


def main(argv=None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print("usage: python -m hypflow.report RUN_DIR", file=sys.stderr)
        return 1
    for path in render_run_figures(args[0]):
        print(path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
