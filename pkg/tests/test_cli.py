from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest

from hypflow.cli import CSV_HEADER, config_echo, main, parse_config, write_timeseries
from hypflow.errors import ConfigurationError, SnapshotFormatError
from hypflow.flow import FlowState, Mode, Scheme, run
from hypflow.presets import PresetKind, build_preset
from hypflow.snapshots import read_snapshot, write_snapshot


def test_parse_defaults():
    preset, config, options = parse_config([])
    assert preset.kind is PresetKind.SPHERE and preset.radius == 1.0
    assert preset.n == 1 and preset.m == 256 and preset.lam == -1.0
    assert config.mode is Mode.VPMCF
    assert config.cfl == 0.25 and config.dt is None
    assert config.t_max == 10.0 and config.cadence == 0.1
    assert config.renormalize_volume is True
    assert config.scheme is Scheme.RK2
    assert options.out_dir == Path("out") and options.figures is False


def test_parse_flag_mapping():
    preset, config, _ = parse_config(
        ["--mode", "mcf", "--preset", "sphere:1", "--t-max", "0.2", "--grid", "64",
         "--renormalize", "off", "--cadence", "0.05"]
    )
    assert config.mode is Mode.MCF
    assert config.t_max == 0.2 and config.cadence == 0.05
    assert config.renormalize_volume is False
    assert preset.m == 64


def test_parse_preset_forms():
    preset, _, _ = parse_config(["--preset", "perturbed:1,0.1,2"])
    assert preset.kind is PresetKind.PERTURBED
    assert (preset.radius, preset.amplitude, preset.harmonic) == (1.0, 0.1, 2)
    preset, _, _ = parse_config(["--preset", "offset:1,0.2,0.3"])
    assert preset.kind is PresetKind.OFFSET
    assert preset.center == (0.3, 0.0)
    with pytest.raises(ConfigurationError):
        parse_config(["--preset", "trefoil:1"])
    with pytest.raises(ConfigurationError):
        parse_config(["--preset", "perturbed:1"])


def test_parse_rejects_grid_below_minimum(capsys):
    assert main(["--grid", "4"]) == 1
    assert "configuration error" in capsys.readouterr().err


def test_parse_rejects_unknown_flag():
    with pytest.raises(ConfigurationError):
        parse_config(["--frobnicate", "1"])


def test_parse_rejects_dt_and_cfl_together():
    with pytest.raises(ConfigurationError):
        parse_config(["--dt", "1e-4", "--cfl", "0.2"])


def test_config_file_merge_and_override(tmp_path):
    cfg_file = tmp_path / "run.json"
    cfg_file.write_text(json.dumps({"grid": 64, "t_max": 0.5, "mode": "mcf"}))
    preset, config, _ = parse_config(["--config", str(cfg_file), "--t-max", "0.25"])
    assert preset.m == 64
    assert config.mode is Mode.MCF
    assert config.t_max == 0.25  # flag wins over file


def test_config_file_rejects_unknown_keys(tmp_path):
    cfg_file = tmp_path / "run.json"
    cfg_file.write_text(json.dumps({"gird": 64}))
    with pytest.raises(ConfigurationError, match="unknown config keys"):
        parse_config(["--config", str(cfg_file)])


def run_cli(tmp_path, name, extra):
    out = tmp_path / name
    code = main(extra + ["--out", str(out)])
    assert code == 0
    return out


BASE = ["--grid", "64", "--t-max", "0.5", "--preset", "perturbed:1,0.1,2"]


def test_cli_outputs_and_header(tmp_path):
    out = run_cli(tmp_path, "a", BASE)
    lines = (out / "timeseries.csv").read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) - 1 == math.floor(0.5 / 0.1) + 1
    assert (out / "final_state.json").exists()
    assert (out / "manifest.json").exists()


def test_cli_sphere_run_rows_trivial(tmp_path):
    out = run_cli(tmp_path, "sph", ["--grid", "64", "--t-max", "0.3"])
    rows = (out / "timeseries.csv").read_text().splitlines()[1:]
    header = CSV_HEADER.split(",")
    v0 = None
    for line in rows:
        rec = dict(zip(header, (float(x) for x in line.split(","))))
        assert rec["sup_dev"] <= 1e-12
        v0 = rec["volume"] if v0 is None else v0
        assert rec["volume"] == pytest.approx(v0, rel=1e-12)


def test_csv_roundtrips_doubles(tmp_path, unit_params):
    from conftest import perturbed_circle

    graph = perturbed_circle(1.0, 0.1, 2, unit_params, m=64)
    from hypflow.flow import FlowConfig

    trajectory = run(graph, FlowConfig(t_max=0.2, cadence=0.1))
    path = tmp_path / "ts.csv"
    write_timeseries(trajectory, path)
    lines = path.read_text().splitlines()
    for row, line in zip(trajectory.rows, lines[1:]):
        parsed = [float(x) for x in line.split(",")]
        assert parsed == [row.t, row.area, row.volume, row.h_bar, row.sup_dev,
                          row.kappa_margin, row.rho_min, row.rho_max, row.renorm_delta]


def test_reruns_are_byte_identical(tmp_path):
    a = run_cli(tmp_path, "a", BASE)
    b = run_cli(tmp_path, "b", BASE)
    assert (a / "timeseries.csv").read_bytes() == (b / "timeseries.csv").read_bytes()
    assert (a / "final_state.json").read_bytes() == (b / "final_state.json").read_bytes()


def test_manifest_reproduces_run(tmp_path):
    a = run_cli(tmp_path, "a", BASE)
    c = run_cli(tmp_path, "c", ["--config", str(a / "manifest.json")])
    assert (a / "timeseries.csv").read_bytes() == (c / "timeseries.csv").read_bytes()
    assert (a / "final_state.json").read_bytes() == (c / "final_state.json").read_bytes()


def test_manifest_echo_covers_run_keys(tmp_path):
    preset, config, _ = parse_config(BASE)
    echo = config_echo(preset, config)
    assert echo["grid"] == 64 and echo["preset"].startswith("perturbed:")
    # every echoed key is accepted back as a config file
    cfg_file = tmp_path / "echo.json"
    cfg_file.write_text(json.dumps(echo))
    preset2, config2, _ = parse_config(["--config", str(cfg_file)])
    assert preset2 == preset
    assert config2 == config


# --- snapshots ---------------------------------------------------------------


def test_snapshot_roundtrip(tmp_path):
    graph = build_preset_default()
    state = FlowState.from_graph(graph, t=1.25)
    path = tmp_path / "snap.json"
    write_snapshot(state, path)
    loaded = read_snapshot(path)
    assert loaded.t == state.t
    assert np.array_equal(loaded.graph.rho.values, graph.rho.values)
    assert loaded.graph.grid.topology is graph.grid.topology
    assert loaded.graph.grid.n == graph.grid.n and loaded.graph.grid.m == graph.grid.m
    assert loaded.graph.params.lam == graph.params.lam


def build_preset_default():
    from hypflow.presets import PresetSpec

    return build_preset(PresetSpec(PresetKind.PERTURBED, m=64, radius=1.0,
                                   amplitude=0.1, harmonic=2))


def test_snapshot_rejects_negative_radius(tmp_path):
    state = FlowState.from_graph(build_preset_default())
    path = tmp_path / "snap.json"
    write_snapshot(state, path)
    doc = json.loads(path.read_text())
    doc["rho"][3] = -0.5
    path.write_text(json.dumps(doc))
    with pytest.raises(SnapshotFormatError):
        read_snapshot(path)


def test_snapshot_rejects_bad_schema(tmp_path):
    path = tmp_path / "snap.json"
    path.write_text("{not json")
    with pytest.raises(SnapshotFormatError):
        read_snapshot(path)
    path.write_text(json.dumps({"schema_version": 99}))
    with pytest.raises(SnapshotFormatError):
        read_snapshot(path)


def test_resume_from_snapshot_is_bit_exact(tmp_path):
    # full run over [0, 1] versus a run to 0.5 resumed for another 0.5
    common = ["--grid", "64", "--preset", "perturbed:1,0.1,2", "--cadence", "0.1"]
    full = run_cli(tmp_path, "full", common + ["--t-max", "1.0"])
    first = run_cli(tmp_path, "first", common + ["--t-max", "0.5"])
    v0 = json.loads((full / "manifest.json").read_text())["initial_volume"]
    second = run_cli(
        tmp_path, "second",
        ["--preset", f"custom:{first / 'final_state.json'}", "--cadence", "0.1",
         "--t-max", "0.5", "--target-volume", repr(v0)],
    )
    rows_full = (full / "timeseries.csv").read_text().splitlines()[1:]
    rows_second = (second / "timeseries.csv").read_text().splitlines()[1:]
    # rows at t, t+0.5 agree on every column except t and the seam's renorm delta
    for offset, line in enumerate(rows_second[1:], start=1):
        full_line = rows_full[5 + offset]
        assert line.split(",")[1:] == full_line.split(",")[1:]
    final_full = json.loads((full / "final_state.json").read_text())
    final_second = json.loads((second / "final_state.json").read_text())
    assert final_full["rho"] == final_second["rho"]


def test_custom_preset_contradicting_flags_fails(tmp_path):
    first = run_cli(tmp_path, "first", BASE)
    snap = first / "final_state.json"
    assert main(["--preset", f"custom:{snap}", "--grid", "128", "--t-max", "0.1",
                 "--out", str(tmp_path / "x")]) == 1


# --- exit codes --------------------------------------------------------------


def test_exit_code_numerical_failure(tmp_path, capsys):
    code = main(["--mode", "mcf", "--preset", "sphere:0.3", "--grid", "64",
                 "--t-max", "1.0", "--renormalize", "off", "--rho-floor", "0.05",
                 "--out", str(tmp_path / "mcf")])
    assert code == 2
    err = capsys.readouterr().err
    assert "numerical failure" in err and "t=" in err


def test_exit_code_io_error(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("file, not a directory")
    code = main(BASE + ["--out", str(blocker / "sub")])
    assert code == 3
    assert "i/o error" in capsys.readouterr().err
