import csv
import io
import json

import pytest

from poolcount.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bounds_prints_bare_value(capsys):
    code, out, _ = run_cli(
        capsys, "bounds", "det_lower", "-n", "1024", "-d", "1", "--eps", "0.0"
    )
    assert code == 0
    assert out.strip() == "10.0"


def test_bounds_all_table(capsys):
    code, out, _ = run_cli(capsys, "bounds", "all", "-n", "1024", "-d", "16")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 9
    assert any("det_lower" in line for line in lines)
    assert any("asymptotic" in line for line in lines)


def test_bounds_json(capsys):
    code, out, _ = run_cli(
        capsys, "bounds", "mc_lower_loglog", "-n", "100", "-d", "65536", "--json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == 3.0


def test_simulate_emits_csv(capsys):
    code, out, err = run_cli(
        capsys,
        "simulate", "--estimator", "deterministic",
        "-n", "256", "-d", "3", "7",
        "--trials", "5", "--seed", "11",
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][0] == "estimator"
    assert len(rows) == 3  # header + one row per d
    assert "success" in err  # human summary stays on stderr


def test_simulate_json_flag(capsys):
    code, out, _ = run_cli(
        capsys,
        "simulate", "--estimator", "deterministic",
        "-n", "64", "-d", "2", "--trials", "3", "--seed", "1", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["spec"]["n"] == 64
    assert len(payload["results"]) == 1


def test_simulate_out_file(tmp_path, capsys):
    target = tmp_path / "run.csv"
    code, out, _ = run_cli(
        capsys,
        "simulate", "--estimator", "deterministic",
        "-n", "64", "-d", "2", "--trials", "3", "--seed", "1",
        "--out", str(target),
    )
    assert code == 0
    assert out == ""  # machine output went to the file
    assert target.read_text().startswith("estimator,")


def test_config_file_provides_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"trials": 4, "seed": 9, "estimator": "deterministic"}))
    code, out, _ = run_cli(
        capsys, "simulate", "--config", str(cfg), "-n", "64", "-d", "2"
    )
    assert code == 0
    row = list(csv.DictReader(io.StringIO(out)))[0]
    assert row["trials"] == "4"


def test_flag_beats_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"trials": 4, "estimator": "deterministic"}))
    code, out, _ = run_cli(
        capsys,
        "simulate", "--config", str(cfg), "-n", "64", "-d", "2", "--trials", "6",
    )
    assert code == 0
    row = list(csv.DictReader(io.StringIO(out)))[0]
    assert row["trials"] == "6"


def test_toml_config(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('trials = 3\nestimator = "deterministic"\n')
    code, out, _ = run_cli(capsys, "simulate", "--config", str(cfg), "-n", "64", "-d", "1")
    assert code == 0
    row = list(csv.DictReader(io.StringIO(out)))[0]
    assert row["trials"] == "3"


def test_unknown_config_key_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--config", str(cfg), "-n", "64", "-d", "1"])
    assert exc.value.code == 2


def test_missing_required_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--estimator", "deterministic"])
    assert exc.value.code == 2


def test_bad_parameter_value_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--estimator", "deterministic", "-n", "64", "-d", "1",
              "--eps", "1.5", "--trials", "2"])
    assert exc.value.code == 2


def test_sweep_passes_on_clean_run(capsys):
    code, out, err = run_cli(
        capsys,
        "sweep", "--estimator", "deterministic",
        "-n", "256", "-d", "4", "--trials", "4", "--seed", "3",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["bounds"]
    assert "[pass]" in err


def test_sweep_fails_on_violated_bound(capsys, monkeypatch):
    import poolcount.cli as climod

    def doctored(stats, constants=None):
        return [{
            "estimator": "deterministic", "n": 256, "d": 4,
            "metric": "queries_max", "empirical": 999.0, "bound": 1.0,
            "kind": "hard", "passed": False,
        }]

    monkeypatch.setattr(climod, "compare_with_bounds", doctored)
    code, _, err = run_cli(
        capsys,
        "sweep", "--estimator", "deterministic",
        "-n", "256", "-d", "4", "--trials", "2", "--seed", "3",
    )
    assert code == 1
    assert "[FAIL]" in err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "poolcount" in capsys.readouterr().out
