"""Command-line entry point and delimited/manifest output.

Exit codes: 0 success, 1 configuration error, 2 numerical failure (the
failing time is printed), 3 I/O error.  A run writes ``timeseries.csv``,
``final_state.json`` and ``manifest.json`` into the output directory; the
``config`` section of the manifest is itself a valid ``--config`` file,
and re-running with it reproduces the CSV and snapshot byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import ConfigurationError, DomainError, NumericalFailure, SnapshotFormatError
from .flow import FlowConfig, Trajectory, run
from .presets import PresetKind, PresetSpec, build_preset
from .snapshots import read_snapshot, write_snapshot

CSV_HEADER = "t,area,volume,h_bar,sup_dev,kappa_margin,rho_min,rho_max,renorm_delta"

_DEFAULTS = {
    "lambda": -1.0,
    "dim": 1,
    "grid": 256,
    "mode": "vpmcf",
    "preset": "sphere:1",
    "cfl": 0.25,
    "dt": None,
    "t_max": 10.0,
    "renormalize": "on",
    "stop_tol": 0.0,
    "cadence": 0.1,
    "scheme": "rk2",
    "target_volume": None,
    "rho_floor": 1e-6,
    "out": "out",
    "figures": "off",
}

_CONFIG_KEYS = set(_DEFAULTS)


@dataclass(frozen=True)
class RunOptions:
    out_dir: Path
    figures: bool


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_on_off(key: str, value) -> bool:
    if isinstance(value, bool):
        return value
    if value in ("on", "off"):
        return value == "on"
    raise ConfigurationError(f"{key} must be 'on' or 'off', got {value!r}")


def _parse_preset(text: str, n: int, m: int, lam: float) -> PresetSpec:
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    args = [a for a in rest.split(",") if a != ""] if rest else []
    try:
        if name == "sphere":
            radius = float(args[0]) if args else 1.0
            if len(args) > 1:
                raise ConfigurationError(f"sphere preset takes one parameter, got {text!r}")
            return PresetSpec(PresetKind.SPHERE, n, m, lam, radius=radius)
        if name == "perturbed":
            if len(args) != 3:
                raise ConfigurationError(
                    f"perturbed preset takes radius,amplitude,harmonic; got {text!r}"
                )
            return PresetSpec(PresetKind.PERTURBED, n, m, lam, radius=float(args[0]),
                              amplitude=float(args[1]), harmonic=int(args[2]))
        if name == "offset":
            if len(args) < 2 or len(args) > 2 + (n + 1):
                raise ConfigurationError(
                    f"offset preset takes radius,shift[,center components]; got {text!r}"
                )
            center = [float(a) for a in args[2:]]
            center += [0.0] * (n + 1 - len(center))
            return PresetSpec(PresetKind.OFFSET, n, m, lam, radius=float(args[0]),
                              radius_shift=float(args[1]), center=tuple(center))
        if name == "custom":
            if not rest:
                raise ConfigurationError("custom preset needs a snapshot path, e.g. custom:run/final_state.json")
            return PresetSpec(PresetKind.CUSTOM, n, m, lam, path=rest)
    except (ValueError, IndexError) as exc:
        raise ConfigurationError(f"could not parse preset {text!r}: {exc}") from exc
    raise ConfigurationError(f"unknown preset {name!r} (sphere, perturbed, offset, custom)")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hypflow",
        description="Mean curvature flow / volume-preserving mean curvature flow "
                    "of radial graphs in hyperbolic space.",
    )
    p.add_argument("--lambda", dest="lam", type=float, help="ambient curvature < 0 (default -1)")
    p.add_argument("--dim", type=int, help="hypersurface dimension n (default 1)")
    p.add_argument("--grid", type=int, help="node count m (default 256)")
    p.add_argument("--mode", choices=["mcf", "vpmcf"], help="flow mode (default vpmcf)")
    p.add_argument("--preset", help="initial condition, e.g. sphere:1 | perturbed:1,0.1,2 | "
                                    "offset:1,0.2,0.3 | custom:PATH (default sphere:1)")
    p.add_argument("--dt", type=float, help="fixed time step (overrides the cfl policy)")
    p.add_argument("--cfl", type=float, help="parabolic step factor in (0, 0.5] (default 0.25)")
    p.add_argument("--t-max", dest="t_max", type=float, help="integration horizon (default 10)")
    p.add_argument("--renormalize", choices=["on", "off"],
                   help="per-step volume renormalization (default on)")
    p.add_argument("--stop-tol", dest="stop_tol", type=float,
                   help="stop when sup|H - H_avg| falls below this (default 0 = never)")
    p.add_argument("--out", help="output directory (default ./out)")
    p.add_argument("--cadence", type=float, help="output sampling interval (default 0.1)")
    p.add_argument("--scheme", choices=["rk2", "semi-implicit"], help="time stepper (default rk2)")
    p.add_argument("--target-volume", dest="target_volume", type=float,
                   help="renormalization target (default: initial volume)")
    p.add_argument("--rho-floor", dest="rho_floor", type=float,
                   help="abort when min rho falls below this (default 1e-6)")
    p.add_argument("--figures", choices=["on", "off"],
                   help="render diagnostic figures into the output directory (default off)")
    p.add_argument("--config", help="JSON file with defaults for any of the above keys")
    return p


def parse_config(argv=None) -> tuple[PresetSpec, FlowConfig, RunOptions]:
    """Resolve flags and the optional config file into run objects.

    Precedence: flags > config file > built-in defaults.  Unknown config
    keys and contradictory options raise ConfigurationError.
    """
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports unknown flags itself
        raise ConfigurationError("could not parse command line") from exc

    flag_values = {
        "lambda": ns.lam, "dim": ns.dim, "grid": ns.grid, "mode": ns.mode,
        "preset": ns.preset, "cfl": ns.cfl, "dt": ns.dt, "t_max": ns.t_max,
        "renormalize": ns.renormalize, "stop_tol": ns.stop_tol, "out": ns.out,
        "cadence": ns.cadence, "scheme": ns.scheme, "target_volume": ns.target_volume,
        "rho_floor": ns.rho_floor, "figures": ns.figures,
    }
    explicit = {k for k, v in flag_values.items() if v is not None}

    file_values: dict = {}
    if ns.config is not None:
        try:
            file_values = json.loads(Path(ns.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file {ns.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config file {ns.config} is not valid JSON: {exc}") from exc
        if not isinstance(file_values, dict):
            raise ConfigurationError(f"config file {ns.config} must hold a JSON object")
        if file_values.get("artifact") == "hypflow" and isinstance(file_values.get("config"), dict):
            file_values = file_values["config"]  # a manifest works as a config file
        unknown = set(file_values) - _CONFIG_KEYS
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")

    merged = dict(_DEFAULTS)
    merged.update(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    explicit |= set(file_values)

    if "dt" in explicit and "cfl" in explicit and merged["dt"] is not None:
        raise ConfigurationError("give either dt or cfl, not both")

    lam = float(merged["lambda"])
    n = int(merged["dim"])
    m = int(merged["grid"])

    preset_text = str(merged["preset"])
    if preset_text.partition(":")[0].strip().lower() == "custom":
        snap = read_snapshot(preset_text.partition(":")[2])
        grid = snap.graph.grid
        if "dim" not in explicit:
            n = grid.n
        if "grid" not in explicit:
            m = grid.m
        if "lambda" not in explicit:
            lam = snap.graph.params.lam
        merged["dim"], merged["grid"], merged["lambda"] = n, m, lam

    preset = _parse_preset(preset_text, n, m, lam)
    config = FlowConfig(
        mode=merged["mode"],
        t_max=float(merged["t_max"]),
        cfl=float(merged["cfl"]),
        dt=None if merged["dt"] is None else float(merged["dt"]),
        scheme=merged["scheme"],
        renormalize_volume=_parse_on_off("renormalize", merged["renormalize"]),
        target_volume=None if merged["target_volume"] is None else float(merged["target_volume"]),
        stop_tolerance=float(merged["stop_tol"]),
        cadence=float(merged["cadence"]),
        rho_floor=float(merged["rho_floor"]),
    )
    options = RunOptions(Path(merged["out"]), _parse_on_off("figures", merged["figures"]))
    return preset, config, options


def config_echo(preset: PresetSpec, config: FlowConfig) -> dict:
    """The resolved run-defining configuration, reusable via --config."""
    if preset.kind is PresetKind.CUSTOM:
        preset_text = f"custom:{preset.path}"
    elif preset.kind is PresetKind.SPHERE:
        preset_text = f"sphere:{preset.radius!r}"
    elif preset.kind is PresetKind.PERTURBED:
        preset_text = f"perturbed:{preset.radius!r},{preset.amplitude!r},{preset.harmonic}"
    else:
        center = ",".join(repr(c) for c in preset.center)
        preset_text = f"offset:{preset.radius!r},{preset.radius_shift!r}" + (
            f",{center}" if center else ""
        )
    return {
        "lambda": preset.lam,
        "dim": preset.n,
        "grid": preset.m,
        "mode": config.mode.value,
        "preset": preset_text,
        "cfl": config.cfl,
        "dt": config.dt,
        "t_max": config.t_max,
        "renormalize": "on" if config.renormalize_volume else "off",
        "stop_tol": config.stop_tolerance,
        "cadence": config.cadence,
        "scheme": config.scheme.value,
        "target_volume": config.target_volume,
        "rho_floor": config.rho_floor,
    }


def write_timeseries(trajectory: Trajectory, path) -> None:
    """CSV with one row per cadence tick, 17 significant digits per value."""
    if not trajectory.rows:
        raise DomainError("trajectory has no rows to write")
    lines = [CSV_HEADER]
    for r in trajectory.rows:
        lines.append(",".join(_fmt(v) for v in (
            r.t, r.area, r.volume, r.h_bar, r.sup_dev, r.kappa_margin,
            r.rho_min, r.rho_max, r.renorm_delta,
        )))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_manifest(path, echo: dict, trajectory: Trajectory,
                    started: str, finished: str) -> None:
    doc = {
        "artifact": "hypflow",
        "version": __version__,
        "config": echo,
        "started_utc": started,
        "finished_utc": finished,
        "termination": trajectory.termination,
        "steps": trajectory.steps,
        "initial_volume": trajectory.initial_volume,
        "max_area_increase": trajectory.max_area_increase,
        "max_abs_renorm_delta": trajectory.max_abs_renorm_delta,
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def execute(preset: PresetSpec, config: FlowConfig, options: RunOptions) -> Trajectory:
    """Build the preset, run the flow, and write all outputs."""
    initial = build_preset(preset)
    options.out_dir.mkdir(parents=True, exist_ok=True)
    started = _utcnow()
    trajectory = run(initial, config)
    finished = _utcnow()
    write_timeseries(trajectory, options.out_dir / "timeseries.csv")
    write_snapshot(trajectory.final_state, options.out_dir / "final_state.json")
    _write_manifest(options.out_dir / "manifest.json", config_echo(preset, config),
                    trajectory, started, finished)
    if options.figures:
        from . import report

        report.render_run_figures(options.out_dir)
    return trajectory


def main(argv=None) -> int:
    try:
        preset, config, options = parse_config(argv)
        trajectory = execute(preset, config, options)
    except (ConfigurationError, DomainError, SnapshotFormatError) as exc:
        print(f"hypflow: configuration error: {exc}", file=sys.stderr)
        return 1
    except NumericalFailure as exc:
        print(f"hypflow: numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"hypflow: i/o error: {exc}", file=sys.stderr)
        return 3
    last = trajectory.rows[-1]
    print(f"hypflow: {trajectory.termination} after {trajectory.steps} steps; "
          f"t={last.t:g} sup_dev={last.sup_dev:.3e} volume={last.volume:.12g} "
          f"-> {options.out_dir}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
