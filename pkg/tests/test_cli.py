"""Command-line client: commands, exit codes, config files, output files."""

import json
import warnings

import pytest
from click.testing import CliRunner

from diracshell.cli import main

warnings.filterwarnings("ignore", category=DeprecationWarning)


@pytest.fixture()
def runner():
    return CliRunner()


def test_spectrum_command(runner):
    res = runner.invoke(main, ["spectrum", "--eta", "2", "--mass", "1"])
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert body["case"] == "thm_ii"
    assert body["pp"][0]["value"] == 0.0


def test_bands_csv_and_out_file(runner, tmp_path):
    out = tmp_path / "bands.csv"
    res = runner.invoke(
        main,
        ["bands", "--eta", "3", "--tau", "2", "--lambda", "1", "--mass", "1",
         "--kmin", "-1", "--kmax", "1", "--samples", "5", "--out", str(out)],
    )
    assert res.exit_code == 0
    text = out.read_text()
    assert text.splitlines()[0] == "k,z_single_or_plus,admissible_single_or_plus"
    assert len(text.splitlines()) == 6


def test_bands_svg_format(runner):
    res = runner.invoke(
        main, ["bands", "--eta", "1", "--mass", "1", "--samples", "51", "--format", "svg"]
    )
    assert res.exit_code == 0
    assert res.output.lstrip().startswith("<?xml")


def test_fiber_command(runner):
    res = runner.invoke(main, ["fiber", "--eta", "1", "--mass", "1", "--k", "0"])
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert body["eigenvalues"] == [pytest.approx(-0.6)]


def test_approx_command(runner):
    res = runner.invoke(
        main,
        ["approx", "--eta", "1", "--mass", "1", "--eps", "0.1,0.01", "--format", "json"],
    )
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert body["final_error"] < 5e-3


def test_confining_exits_3(runner):
    res = runner.invoke(main, ["spectrum", "--tau", "-2", "--mass", "1"])
    assert res.exit_code == 3


def test_config_error_exits_2(runner):
    res = runner.invoke(main, ["bands", "--eta", "1", "--kmin", "2", "--kmax", "-2"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["approx", "--eta", "1", "--mass", "1", "--eps", "nope"])
    assert res.exit_code == 2


def test_config_file_and_flag_precedence(runner, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("eta = 2\nmass = 1\nlambda = 0\n")
    res = runner.invoke(main, ["spectrum", "--config", str(cfg)])
    assert res.exit_code == 0
    assert json.loads(res.output)["case"] == "thm_ii"
    # explicit flag wins over the config value
    res = runner.invoke(main, ["spectrum", "--config", str(cfg), "--eta", "1"])
    assert res.exit_code == 0
    assert json.loads(res.output)["case"] == "thm_iii"


def test_config_file_unknown_key(runner, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("etaa = 2\n")
    res = runner.invoke(main, ["spectrum", "--config", str(cfg)])
    assert res.exit_code == 2


def test_resolvent_check_command(runner):
    res = runner.invoke(
        main, ["resolvent-check", "--eta", "1", "--mass", "1", "--k", "0", "--eps", "0.05"]
    )
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert body["ok"] is True
    assert body["estimate"] <= body["bound"]


def test_packet_command(runner):
    res = runner.invoke(
        main,
        ["packet", "--eta", "3", "--tau", "2", "--lambda", "1", "--mass", "1",
         "--k0", "0", "--sigma-k", "0.4", "--nodes", "256", "--t", "1"],
    )
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert body["group_velocity"] == pytest.approx(-1 / 3)


def test_validate_command(runner):
    res = runner.invoke(main, ["validate"])
    assert res.exit_code == 0
    assert json.loads(res.output)["passed"] is True
