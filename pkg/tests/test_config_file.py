import math
from pathlib import Path

import numpy as np
import pytest

from src.exceptions import ConfigInvalid
from src.logic.config_file import build_config, config_hash, config_to_dict, load_config, parse_config_text
from src.logic.csv_output import metadata_line, read_csv, render_csv, write_csv, write_plot_script
from src.routers.base import parse_grid, parse_real

CONFIG_DIR = Path(__file__).resolve().parents[1] / "data" / "configs"

VALID = """
# two nodes
n_nodes = 2
lambda = 1
lambda_prime = 0
couplings = [0.1, 0.1]
drivings = [0.05, 0.0]   # E_2 = 0
alpha_re = 1.0
alpha_im = -0.5
"""


def test_load_config(write_config):
    config = load_config(write_config(VALID))
    assert config.n_nodes == 2
    assert config.couplings == (0.1, 0.1)
    assert config.alpha == complex(1.0, -0.5)


def test_example_configs_load():
    for name in ("example_case1.cfg", "example_case2.cfg"):
        assert load_config(CONFIG_DIR / name).n_nodes == 3


@pytest.mark.parametrize(
    "text",
    [
        VALID + "lambda = 2\n",
        VALID + "spin = 1\n",
        VALID.replace("[0.1, 0.1]", "0.1, 0.1"),
        VALID.replace("n_nodes = 2", "n_nodes = two"),
        VALID.replace("lambda_prime = 0", "lambda_prime"),
    ],
)
def test_malformed_text(text):
    with pytest.raises(ConfigInvalid):
        parse_config_text(text)


def test_invalid_values():
    values = parse_config_text(VALID)
    with pytest.raises(ConfigInvalid):
        build_config({**values, "n_nodes": 2.5})
    with pytest.raises(ConfigInvalid):
        build_config({key: v for key, v in values.items() if key != "drivings"})
    with pytest.raises(ConfigInvalid):
        build_config({**values, "couplings": [0.1]})


def test_missing_file(tmp_path):
    with pytest.raises(ConfigInvalid):
        load_config(tmp_path / "absent.cfg")


def test_config_dict_and_hash(write_config):
    config = load_config(write_config(VALID))
    payload = config_to_dict(config)
    assert payload["alpha"] == [1.0, -0.5]
    assert config_hash(payload) == config_hash(dict(reversed(list(payload.items()))))
    assert len(config_hash(payload)) == 12
    assert config_hash({"x": 1}) != config_hash({"x": 2})


@pytest.mark.parametrize(
    "text, expected",
    [("1.5", 1.5), ("pi", math.pi), ("2pi", 2 * math.pi), ("-0.5pi", -0.5 * math.pi), ("1e-3", 1e-3)],
)
def test_parse_real(text, expected):
    assert parse_real(text) == pytest.approx(expected)


def test_parse_real_rejects_garbage():
    with pytest.raises(ConfigInvalid):
        parse_real("tau")


def test_parse_grid_includes_endpoint():
    grid = parse_grid("0:2pi:0.5pi")
    assert len(grid) == 5
    assert grid[-1] == 2 * math.pi
    assert len(parse_grid("0:1:0.1")) == 11
    with pytest.raises(ConfigInvalid):
        parse_grid("1:0:0.1")
    with pytest.raises(ConfigInvalid):
        parse_grid("0:1")


def test_csv_rendering(tmp_path):
    import pandas as pd

    frame = pd.DataFrame({"tau": [0.0, np.pi], "value": [1.0, 1.0 / 3.0]})
    text = render_csv(frame, {"command": "entropy"})
    lines = text.splitlines()
    assert lines[0] == metadata_line({"command": "entropy"}).rstrip("\n")
    assert lines[1] == "tau,value"
    assert lines[3] == "3.141592653590e+00,3.333333333333e-01"
    path = tmp_path / "out" / "table.csv"
    write_csv(frame, path, {"command": "entropy"})
    assert path.read_text(encoding="utf-8") == text
    assert read_csv(path)["value"].iloc[1] == pytest.approx(1 / 3, rel=1e-12)


def test_plot_script(tmp_path):
    script = write_plot_script(tmp_path / "plot.py", ["a.csv"], "n_nodes", ["delta_rms"])
    body = script.read_text(encoding="utf-8")
    assert "matplotlib" in body
    assert "'a.csv'" in body
    compile(body, str(script), "exec")
