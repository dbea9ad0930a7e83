import json
import subprocess
import sys

import pytest

from fdcoop.cli import (CSV_HEADER, format_sweep_csv, load_config,
                        load_sweep_spec, run_cli)
from fdcoop.scenario import ConfigError


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({
        "scenario": {"seed": 5, "k1": 2, "k2": 2, "n_subcarriers": 8},
        "sweep": {"pmax_user_dbm_values": [0.0, 10.0, 20.0],
                  "si_modes": ["with_si", "without_si"],
                  "trials_per_point": 8},
    }))
    return str(path)


def test_load_config_defaults(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("{}")
    cfg = load_config(str(path))
    assert cfg.pmax_user_dbm == 20.0
    assert cfg.pmax_bs_dbw == 10.0
    assert cfg.subcarrier_bandwidth_hz == 20e3
    assert cfg.noise_density_dbm_hz == -174.0
    assert cfg.n_subcarriers == 8


def test_load_config_overrides(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("{}")
    cfg = load_config(str(path), ["pmax_user_dbm=25", "scenario.seed=7"])
    assert cfg.pmax_user_dbm == 25.0
    assert cfg.seed == 7


def test_load_config_validation_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"scenario": {"n_subcarriers": 0}}))
    with pytest.raises(ConfigError, match="n_subcarriers"):
        load_config(str(path))
    path.write_text(json.dumps({"scenery": {}}))
    with pytest.raises(ConfigError, match="scenery"):
        load_config(str(path))
    with pytest.raises(ConfigError, match="not found"):
        load_config(str(tmp_path / "missing.json"))


def test_override_rejects_lists(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("{}")
    with pytest.raises(ConfigError, match="lists"):
        load_sweep_spec(str(path), ["sweep.pmax_user_dbm_values=[1,2]"])


def test_load_sweep_spec(small_config):
    spec = load_sweep_spec(small_config)
    assert spec.trials_per_point == 8
    assert spec.pmax_user_dbm_values == (0.0, 10.0, 20.0)
    assert spec.group_sizes == ((2, 2),)
    spec = load_sweep_spec(small_config, ["sweep.trials_per_point=3"])
    assert spec.trials_per_point == 3


def test_sweep_csv_contract(small_config, tmp_path, capsys):
    out = tmp_path / "result.csv"
    assert run_cli(["sweep", "--config", small_config, "--out", str(out)]) == 0
    data = out.read_bytes()
    lines = data.decode().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 2 * 3
    assert b"\r" not in data
    row = lines[1].split(",")
    assert row[1] in ("with_si", "without_si")
    assert int(row[4]) == 8


def test_sweep_csv_byte_stable(small_config, tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run_cli(["sweep", "--config", small_config, "--out", str(a)]) == 0
    assert run_cli(["sweep", "--config", small_config, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_trial_json_deterministic(small_config, capsys):
    assert run_cli(["trial", "--config", small_config, "--set", "seed=7"]) == 0
    first = capsys.readouterr().out
    assert run_cli(["trial", "--config", small_config, "--set", "seed=7"]) == 0
    second = capsys.readouterr().out
    assert first == second
    payload = json.loads(first)
    assert payload["feasible"] is True
    assert payload["sum_rate_bps_hz"] > 0
    assert set(payload["coop_rate_bps_hz"]) == {"0", "1"}


def test_lap_subcommand_reference_matrix(tmp_path, capsys):
    matrix = tmp_path / "m.txt"
    matrix.write_text("3 3\n4 1 3\n2 0 5\n3 2 2\n")
    assert run_cli(["lap", "--matrix", str(matrix)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[-1] == "total_cost 5"
    assert run_cli(["lap", "--matrix", str(matrix), "--brute-force"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "total_cost 5"


def test_audit_subcommand(tmp_path):
    out = tmp_path / "audit.json"
    assert run_cli(["audit", "--points", "200", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["pass"] is True
    assert payload["points_tested"] == 200
    assert payload["max_violation"] <= 1e-6


def test_sweep_renders_figures(small_config, tmp_path):
    out = tmp_path / "result.csv"
    figdir = tmp_path / "figs"
    code = run_cli(["sweep", "--config", small_config, "--out", str(out),
                    "--set", "sweep.trials_per_point=2", "--figures", str(figdir)])
    assert code == 0
    pngs = sorted(p.name for p in figdir.glob("*.png"))
    assert "sweep_sum_rate_with_si.png" in pngs
    assert "sweep_sum_rate_without_si.png" in pngs
    assert "sweep_si_comparison.png" in pngs
    assert all((figdir / name).stat().st_size > 0 for name in pngs)


def test_report_subcommand(small_config, tmp_path, capsys):
    out = tmp_path / "result.csv"
    assert run_cli(["sweep", "--config", small_config, "--out", str(out),
                    "--set", "sweep.trials_per_point=2"]) == 0
    figdir = tmp_path / "report"
    assert run_cli(["report", "--csv", str(out), "--out-dir", str(figdir)]) == 0
    assert len(list(figdir.glob("*.png"))) >= 2


def test_exit_codes(tmp_path, capsys):
    assert run_cli(["frobnicate"]) == 1                      # unknown subcommand
    missing = str(tmp_path / "nope.json")
    assert run_cli(["trial", "--config", missing]) == 1      # malformed/missing config
    over = tmp_path / "over.json"
    over.write_text(json.dumps({"scenario": {"k1": 2, "k2": 3, "n_subcarriers": 2}}))
    assert run_cli(["trial", "--config", str(over)]) == 2    # over-subscription
    capsys.readouterr()


def test_cli_module_invocation(small_config):
    proc = subprocess.run([sys.executable, "-m", "fdcoop", "trial",
                           "--config", small_config], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["sum_rate_bps_hz"] > 0


def test_format_sweep_csv_significant_digits():
    from fdcoop.montecarlo import SweepPoint
    point = SweepPoint(pmax_dbm=20.0, si_mode="with_si", k1=2, k2=2, trials=3,
                       mean_sum_rate=12.3456789123456, ci95_halfwidth=0.123456789123,
                       outage_fraction=0.0)
    text = format_sweep_csv([point])
    assert "12.3456789" in text
    assert "0.123456789" in text
    assert text.endswith("\n") and "\r" not in text
