import os

import pytest

from dronenet.cli import main
from dronenet.config import ScenarioConfig, config_to_text


@pytest.fixture()
def small_config(tmp_path):
    text = config_to_text(ScenarioConfig())
    text = text.replace("region.width_m = 5000.0", "region.width_m = 2500.0")
    text = text.replace("region.height_m = 5000.0", "region.height_m = 2500.0")
    text = text.replace("geometry.drone_count = 6", "geometry.drone_count = 3")
    path = tmp_path / "scenario.cfg"
    path.write_text(text)
    return str(path)


def test_run_writes_artifacts(tmp_path, small_config, capsys):
    out = str(tmp_path / "out")
    code = main(["--config", small_config, "--seed", "5", "--out", out, "run"])
    assert code == 0
    for name in ("rsus.csv", "drones.csv", "channel.csv", "association.csv",
                 "metrics.csv", "chain.txt", "stages.txt"):
        assert os.path.exists(os.path.join(out, name))
    assert "sum_rate_bps=" in capsys.readouterr().out


def test_env_var_overrides_output_dir(tmp_path, small_config, monkeypatch):
    override = str(tmp_path / "elsewhere")
    monkeypatch.setenv("DRONENET_OUT", override)
    assert main(["--config", small_config, "--seed", "5", "--out", str(tmp_path / "ignored"), "run"]) == 0
    assert os.path.exists(os.path.join(override, "metrics.csv"))
    assert not os.path.exists(str(tmp_path / "ignored"))


def test_invalid_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("geometry.drone_count = 0\n")
    code = main(["--config", str(bad), "--out", str(tmp_path / "o"), "run"])
    assert code == 2
    assert "error.config" in capsys.readouterr().err


def test_generic_sweep(tmp_path, small_config):
    out = str(tmp_path / "out")
    code = main(["--config", small_config, "--reps", "2", "--out", out,
                 "sweep", "--param", "drone_count", "--values", "2,3"])
    assert code == 0
    assert os.path.exists(os.path.join(out, "sweep_drone_count.csv"))
    assert os.path.exists(os.path.join(out, "sweep_drone_count.dat"))


def test_gas_figure_sweep(tmp_path, small_config):
    out = str(tmp_path / "out")
    assert main(["--config", small_config, "--out", out, "sweep", "--figure", "gas"]) == 0
    lines = open(os.path.join(out, "gas_sweep.csv")).read().splitlines()
    assert lines[0] == "gas_limit,kind,tx_per_block"
    assert len(lines) > 1


def test_ledger_cli_lifecycle(tmp_path, capsys):
    chain = str(tmp_path / "chain.txt")
    assert main(["--seed", "9", "ledger", "init", "--chain", chain]) == 0

    assert main(["ledger", "register", "--chain", chain, "--kind", "drone",
                 "--id", "D0001", "--area", "A001",
                 "--address", "aa" * 20]) == 0
    out = capsys.readouterr().out
    assert "accepted" in out

    # a non-C&C sender is rejected
    code = main(["ledger", "register", "--chain", chain, "--kind", "sv",
                 "--address", "bb" * 20, "--sender", "cc" * 20])
    assert code == 3
    assert "unauthorized" in capsys.readouterr().out

    assert main(["ledger", "mine", "--chain", chain]) == 0
    capsys.readouterr()

    assert main(["ledger", "auth", "--chain", chain, "--address", "aa" * 20]) == 0
    assert "authenticated" in capsys.readouterr().out
    assert main(["ledger", "auth", "--chain", chain, "--address", "bb" * 20]) == 3

    assert main(["ledger", "verify", "--chain", chain]) == 0
    assert main(["ledger", "stats", "--chain", chain]) == 0
    stats_out = capsys.readouterr().out
    assert "blocks:" in stats_out


def test_oracle_compare_cli(capsys):
    code = main(["--seed", "4", "oracle-compare", "--instances", "25",
                 "--max-rsus", "6", "--max-drones", "2"])
    assert code == 0
    assert "worst_relative_gap" in capsys.readouterr().out
