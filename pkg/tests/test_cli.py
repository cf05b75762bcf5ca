import csv
import json

import numpy as np
import pytest

from shockflow.cli import main, parse_config_text
from shockflow.errors import ConfigError


def run_cli(*args):
    return main(list(args))


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_parse_config_text():
    raw = parse_config_text(
        "experiment = solve\n"
        "# a comment\n"
        "viscous.mu_ladder = 0.08,0.04  # trailing comment\n"
        "\n"
        "out = somewhere\n")
    assert raw["experiment"] == "solve"
    assert raw["viscous.mu_ladder"] == "0.08,0.04"
    assert raw["out"] == "somewhere"


def test_parse_rejects_duplicates_and_bad_lines():
    with pytest.raises(ConfigError):
        parse_config_text("a = 1\na = 2\n")
    with pytest.raises(ConfigError):
        parse_config_text("just some words\n")


def test_list_fixtures(capsys):
    assert run_cli("list-fixtures") == 0
    out = capsys.readouterr().out.split()
    assert "sawtooth" in out and "neg-abs" in out


def test_solve_writes_profile_and_shock_markers(tmp_path):
    cfg = tmp_path / "solve.cfg"
    out = tmp_path / "out"
    cfg.write_text(
        "experiment = solve\n"
        "fixture = sawtooth\n"
        "fixture.tilt = 0.2\n"
        "solve.t = 0.5\n"
        "solve.n = 101\n"
        f"out = {out}\n")
    assert run_cli("validate", str(cfg)) == 0
    assert run_cli("run", str(cfg)) == 0
    rows = read_csv(out / "profile.csv")
    assert len(rows) == 101
    assert set(rows[0]) == {"t", "x1", "phi"}
    shocks = read_csv(out / "shocks.csv")
    assert len(shocks) == 1
    # the crest-born shock has drifted to 0.1 by t = 0.5
    assert abs(float(shocks[0]["value"]) - 0.1) < 0.05
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiment"] == "solve"
    assert "profile.csv" in manifest["artifacts"]


def test_particles_csv_schema_and_determinism(tmp_path):
    cfg = tmp_path / "p.cfg"
    out = tmp_path / "out"
    cfg.write_text(
        "experiment = particles\n"
        "fixture = neg-abs\n"
        "particles.seeds = 0.5; -0.3\n"
        "particles.horizon = 0.3\n"
        "particles.dt = 0.002\n"
        f"out = {out}\n")
    assert run_cli("run", str(cfg)) == 0
    body1 = (out / "trajectories.csv").read_bytes()
    rows = read_csv(out / "trajectories.csv")
    assert set(rows[0]) == {"traj_id", "t", "x1", "on_shock", "merged_into"}
    ids = {r["traj_id"] for r in rows}
    assert ids == {"0", "1"}
    assert all(r["merged_into"] == "-1" for r in rows)  # no merge yet
    assert run_cli("run", str(cfg)) == 0
    assert (out / "trajectories.csv").read_bytes() == body1


def test_anomaly_plateau_reaches_burgers_rate(tmp_path):
    cfg = tmp_path / "a.cfg"
    out = tmp_path / "out"
    cfg.write_text(
        "experiment = anomaly\n"
        "fixture = sawtooth\n"
        "hamiltonian = quadratic\n"
        "viscous.mu_ladder = 0.02, 0.01\n"
        "viscous.n = 2048\n"
        "viscous.horizon = 1.0\n"
        "viscous.seed_point = 0.5\n"
        f"out = {out}\n")
    assert run_cli("run", str(cfg)) == 0
    rows = read_csv(out / "anomaly.csv")
    assert [float(r["t"]) for r in rows] == [0.02, 0.01]
    plateau = float(rows[-1]["value"])
    assert plateau == pytest.approx(-0.5, rel=0.05)
    series = read_csv(out / "anomaly_series.csv")
    assert len(series) > 500


def test_negative_mu_exits_2_naming_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(
        "experiment = anomaly\n"
        "fixture = sawtooth\n"
        "viscous.mu_ladder = -0.01\n"
        f"out = {tmp_path / 'out'}\n")
    assert run_cli("run", str(cfg)) == 2
    err = capsys.readouterr().err
    assert "mu" in err


def test_unknown_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "u.cfg"
    cfg.write_text(
        "experiment = solve\n"
        "fixture = cosine\n"
        "solve.t = 0.5\n"
        "solve.banana = 3\n")
    assert run_cli("run", str(cfg)) == 2
    assert "banana" in capsys.readouterr().err


def test_missing_config_exits_2(tmp_path, capsys):
    assert run_cli("run", str(tmp_path / "nope.cfg")) == 2
    assert "nope.cfg" in capsys.readouterr().err


def test_bench_oracle_gaps_within_grid_step(tmp_path):
    cfg = tmp_path / "b.cfg"
    out = tmp_path / "out"
    cfg.write_text(
        "experiment = admissible-bench\n"
        "bench.instances = 40\n"
        "rng_seed = 1\n"
        f"out = {out}\n")
    assert run_cli("run", str(cfg)) == 0
    rows = read_csv(out / "bench.csv")
    assert len(rows) == 40
    for r in rows:
        step = 1e-3 if r["dim"] == "1" else 5e-3
        assert float(r["oracle_gap"]) <= 2.0 * step
        assert float(r["hull_distance"]) <= 1e-8


def test_sde_experiment_reports_comparison(tmp_path):
    cfg = tmp_path / "s.cfg"
    out = tmp_path / "out"
    cfg.write_text(
        "experiment = sde\n"
        "fixture = sawtooth\n"
        "sde.epsilon = 0.05\n"
        "sde.horizon = 0.2\n"
        "sde.n_paths = 40\n"
        "rng_seed = 7\n"
        f"out = {out}\n")
    assert run_cli("run", str(cfg)) == 0
    occ = read_csv(out / "occupancy.csv")
    assert len(occ) == 2
    total = sum(float(r["occupancy"]) for r in occ)
    assert total == pytest.approx(1.0, abs=1e-12)
    comp = {r["label"]: r["value"] for r in read_csv(out / "comparison.csv")}
    assert comp["verdict"] == "coincide"
    assert float(comp["v_star"]) == pytest.approx(0.0, abs=1e-6)


def test_viscous_compare_gaps_shrink(tmp_path):
    cfg = tmp_path / "v.cfg"
    out = tmp_path / "out"
    cfg.write_text(
        "experiment = viscous-compare\n"
        "fixture = sawtooth\n"
        "viscous.mu_ladder = 0.08, 0.04\n"
        "viscous.n = 512\n"
        "viscous.horizon = 0.5\n"
        "viscous.seed_point = 0.5\n"
        f"out = {out}\n")
    assert run_cli("run", str(cfg)) == 0
    for name in ("value_gap.csv", "flow_gap.csv"):
        rows = read_csv(out / name)
        gaps = [float(r["value"]) for r in rows]
        assert gaps[1] < gaps[0]


def test_validate_does_not_write(tmp_path):
    cfg = tmp_path / "v.cfg"
    out = tmp_path / "out"
    cfg.write_text(
        "experiment = particles\n"
        "fixture = neg-abs\n"
        "particles.seeds = 0.1\n"
        "particles.horizon = 0.5\n"
        f"out = {out}\n")
    assert run_cli("validate", str(cfg)) == 0
    assert not out.exists()
