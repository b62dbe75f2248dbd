import json

import pytest

from redwsn.cli import EXIT_CONFIG, EXIT_OK, main_avail, main_sim


def test_avail_table_output(capsys):
    assert main_avail(["--lambda", "1e-4", "--mu", "20.83e-3", "--n-max", "4"]) == EXIT_OK
    out = capsys.readouterr().out
    lines = [line for line in out.strip().split("\n") if line]
    assert len(lines) == 5  # header + four rows
    assert "4.7778e-03" in lines[1]
    assert "1.2505e-08" in lines[4]


def test_avail_csv_and_json(capsys):
    assert main_avail(["--format", "csv"]) == EXIT_OK
    csv_out = capsys.readouterr().out
    assert csv_out.startswith("n_boards,failure_probability")
    assert main_avail(["--format", "json"]) == EXIT_OK
    parsed = json.loads(capsys.readouterr().out)
    assert set(parsed) == {"1", "2", "3", "4"}
    assert parsed["1"] == pytest.approx(4.777e-3, rel=5e-4)


def test_avail_rejects_bad_rates(capsys):
    assert main_avail(["--lambda", "-1"]) == EXIT_CONFIG
    assert main_avail(["--n-max", "0"]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_sim_avail_subcommand(capsys):
    assert main_sim(["avail", "--n-max", "2"]) == EXIT_OK
    assert "4.7778e-03" in capsys.readouterr().out


def test_sim_presets_lists_all(capsys):
    assert main_sim(["presets"]) == EXIT_OK
    names = capsys.readouterr().out.split()
    assert "HF" in names and "GWF" in names and "SF1-noSARB" in names


def test_sim_run_preset_to_stdout(capsys, tmp_path):
    cfg = tmp_path / "quick.cfg"
    cfg.write_text("preset = control-clean\nduration_ms = 300000\n")
    assert main_sim(["run", str(cfg), "--seeds", "1"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["scenario"] == "control-clean"
    assert report["iterations"][0]["prr_redundant"] == 1.0


def test_sim_run_csv_to_file(capsys, tmp_path):
    cfg = tmp_path / "quick.cfg"
    cfg.write_text("preset = control-clean\nduration_ms = 300000\n")
    out = tmp_path / "report.csv"
    code = main_sim(["run", str(cfg), "--seeds", "1,2", "--format", "csv", "--out", str(out)])
    assert code == EXIT_OK
    text = out.read_text()
    assert text.startswith("scenario,iteration,metric,value")
    assert ",mean,mean_prr_redundant," in text


def test_sim_run_unknown_scenario_is_config_error(capsys):
    assert main_sim(["run", "no-such-preset"]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_sim_run_bad_seeds_is_config_error(capsys):
    assert main_sim(["run", "control-clean", "--seeds", "a,b"]) == EXIT_CONFIG
    capsys.readouterr()


def test_sim_run_bad_config_names_key(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nodez = 1\n")
    assert main_sim(["run", str(cfg)]) == EXIT_CONFIG
    assert "nodez" in capsys.readouterr().err


def test_sim_run_deterministic_stdout(capsys, tmp_path):
    cfg = tmp_path / "quick.cfg"
    cfg.write_text("preset = control-noise\nduration_ms = 300000\n")
    main_sim(["run", str(cfg), "--seeds", "5"])
    first = capsys.readouterr().out
    main_sim(["run", str(cfg), "--seeds", "5"])
    second = capsys.readouterr().out
    assert first == second
