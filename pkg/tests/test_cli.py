import math
from pathlib import Path

import pytest

from src import main
from src.logic.csv_output import read_csv

CONFIG_DIR = Path(__file__).resolve().parents[1] / "data" / "configs"
CASE1 = str(CONFIG_DIR / "example_case1.cfg")
CASE2 = str(CONFIG_DIR / "example_case2.cfg")


@pytest.fixture(autouse=True)
def quiet_logging(monkeypatch):
    monkeypatch.setattr(main, "setup_logging", lambda *args, **kwargs: None)


def test_help_exits_cleanly(capsys):
    assert main.run(["--help"]) == 0
    assert "oracle-check" in capsys.readouterr().out


def test_help_lists_command_groups(capsys):
    assert main.run(["--help"]) == 0
    out = capsys.readouterr().out
    assert "command groups:" in out
    assert "Monte Carlo: sample, runs" in out
    assert "Figures: figure2, figure3" in out


def test_crb_levitated(tmp_path):
    out = tmp_path / "crb.csv"
    code = main.run(["crb", "--platform", "levitated", "--case", "1", "--n-nodes", "2", "--n-exc", "1",
                     "--mu", "10000", "-o", str(out)])
    assert code == 0
    row = read_csv(out).iloc[0]
    assert row["bound"] == pytest.approx(3.47e-27, rel=1e-2)
    assert row["bound_unit"] == "m^2/s^4"
    assert row["delta_rms"] == pytest.approx(5.89e-14, rel=1e-2)
    assert row["min_n_exc"] == 2
    assert row["single_param_qfi"] == pytest.approx(4 * (4 * math.pi * 1963.0) ** 2 / 4)


def test_entropy_vanishes_at_two_pi(tmp_path):
    out = tmp_path / "entropy.csv"
    assert main.run(["entropy", "--config", CASE1, "--tau-grid", "0:2pi:0.5pi", "-o", str(out)]) == 0
    frame = read_csv(out)
    assert list(frame.columns) == ["tau", "S_L_closed", "S_L_gram"]
    assert frame["tau"].iloc[-1] == pytest.approx(2 * math.pi)
    assert frame["S_L_closed"].iloc[-1] == pytest.approx(0.0, abs=1e-15)
    assert frame["S_L_gram"].iloc[2] == pytest.approx(frame["S_L_closed"].iloc[2], abs=1e-10)


def test_metadata_line_and_stdout(capsys):
    assert main.run(["state", "--config", CASE1, "--tau", "2pi"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# sensornet ")
    assert "config_hash=" in lines[0]
    assert lines[1].startswith("branch,mode,coefficient_re")
    assert len(lines) == 2 + 9


def test_reruns_are_byte_identical(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["qfim", "--config", CASE2, "--case", "2", "--mu", "100"]
    assert main.run(args + ["-o", str(first)]) == 0
    assert main.run(args + ["-o", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_measure_command(tmp_path):
    out = tmp_path / "measure.csv"
    assert main.run(["measure", "--config", CASE1, "--case", "1", "--refs", "0.06", "0.03", "-o", str(out)]) == 0
    frame = read_csv(out)
    probabilities = frame[frame.quantity == "probability"]["value"]
    assert len(probabilities) == 3
    assert probabilities.sum() == pytest.approx(1.0, abs=1e-10)
    closed = frame[frame.quantity == "closed_form_probability"]["value"]
    assert list(closed) == pytest.approx(list(probabilities), abs=1e-12)


def test_qfim_command_reports_nuisance_degradation(tmp_path):
    out = tmp_path / "qfim.csv"
    assert main.run(["qfim", "--config", CASE1, "--case", "1", "--mu", "100", "-o", str(out)]) == 0
    frame = read_csv(out)
    degradation = frame[frame.quantity == "nuisance_degradation"]["value"].iloc[0]
    assert degradation == pytest.approx(4 / 3)
    known = frame[frame.quantity == "known_parameter_bound"].set_index("i")["value"]
    nuisance = frame[frame.quantity == "nuisance_bound"].set_index("i")["value"]
    assert (nuisance / known).tolist() == pytest.approx([degradation] * 2)


def test_plot_script_option(tmp_path):
    out, script = tmp_path / "fig.csv", tmp_path / "plot_fig.py"
    assert main.run(["figure2", "--platforms", "levitated", "-o", str(out), "--plot-script", str(script)]) == 0
    assert script.exists()
    assert str(out) in script.read_text(encoding="utf-8")
    assert set(read_csv(out)["panel"]) == {"a", "b", "c"}


@pytest.mark.parametrize(
    "argv, code",
    [
        (["state", "--config", "missing.cfg", "--tau", "1"], 1),
        (["crb", "--platform", "trapped-ions", "--case", "1", "--n-nodes", "2", "--n-exc", "1"], 1),
        (["crb", "--platform", "levitated", "--case", "2", "--n-nodes", "2", "--n-exc", "1"], 1),
        (["qfim", "--config", CASE1, "--case", "3"], 1),
        (["no-such-command"], 1),
        (["qfim", "--config", CASE1, "--case", "2"], 3),
        (["measure", "--config", CASE1, "--case", "1", "--refs", "0.1"], 1),
    ],
)
def test_exit_codes(argv, code):
    assert main.run(argv) == code


def test_numerical_failure_exit_code(write_config):
    path = write_config(
        "n_nodes = 2\nlambda = 0.5\nlambda_prime = -0.5\ncouplings = [1.0, 0.8]\ndrivings = [0, 0]\n"
    )
    assert main.run(["qfim", "--config", str(path), "--case", "2"]) == 2


def test_sample_save_and_list(engine, tmp_path):
    argv = ["sample", "--config", CASE1, "--case", "1", "--mu", "1000", "--trials", "100",
            "--seed", "3", "--single-parameter", "2", "--save", "-o", str(tmp_path / "sample.csv")]
    assert main.run(argv) == 0
    report = read_csv(tmp_path / "sample.csv").iloc[0]
    assert report["kind"] == "single_parameter"
    assert main.run(["runs", "--limit", "5", "-o", str(tmp_path / "runs.csv")]) == 0
    runs = read_csv(tmp_path / "runs.csv")
    assert len(runs) == 1
    assert runs["ratio"].iloc[0] == pytest.approx(report["ratio"], rel=1e-10)


@pytest.mark.slow
def test_oracle_check_command(tmp_path):
    out = tmp_path / "oracle.csv"
    assert main.run(["oracle-check", "--nodes", "2", "-o", str(out)]) == 0
    assert read_csv(out)["passed"].all()
