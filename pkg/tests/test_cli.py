import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from frhtlab import FunctionSpec
from frhtlab.cli import _jsonable, config_schema, dumps, main, parse_grid, parse_real, parse_schedule

ROOT = Path(__file__).resolve().parents[1]


def run(*args):
    return main([str(a) for a in args])


def test_parse_helpers():
    assert parse_real("2pi/3") == pytest.approx(2 * math.pi / 3)
    assert parse_real("pi/2") == pytest.approx(math.pi / 2)
    assert parse_real("-1.25") == -1.25
    g = parse_grid("log:1e-3:50:5")
    assert g.size == 5 and g[0] == pytest.approx(1e-3) and g[-1] == pytest.approx(50)
    s = parse_schedule("0.5:0.7:30")
    assert (s.eps0, s.rho, s.J) == (0.5, 0.7, 30)


def test_dumps_is_deterministic_and_exact():
    text = dumps(_jsonable({"b": 0.1, "a": [1, math.nan, math.inf], "c": 1 + 2j}))
    assert text == dumps(_jsonable({"c": 1 + 2j, "a": [1, math.nan, math.inf], "b": 0.1}))
    data = json.loads(text)
    assert data["b"] == 0.1 and data["a"][1] == "nan" and data["a"][2] == "inf"
    assert data["c"] == {"re": 1.0, "im": 2.0}
    third = 1 / 3
    assert json.loads(dumps(third)) == third


def test_transform_csv_round_trip(tmp_path, capsys):
    out = tmp_path / "t.csv"
    rc = run("transform", "--alpha", "pi/3", "--mu", "0", "--xi-grid", "log:0.01:10:64",
             "--out-csv", out)
    assert rc == 0
    assert "transform: PASS" in capsys.readouterr().out
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["xi", "re", "im", "err_estimate", "converged"]
    assert len(rows) == 65
    spec = FunctionSpec.from_csv(str(out))
    xi = spec.grid[0]
    expected = xi ** 0.5 * np.exp(-xi ** 2 / 2) / math.sqrt(math.sin(math.pi / 3))
    assert np.max(np.abs(spec.grid[1] - expected)) < 1e-8


def test_outputs_are_bit_identical_on_repeat(tmp_path):
    files = []
    for i in range(2):
        c, j = tmp_path / f"r{i}.csv", tmp_path / f"r{i}.json"
        assert run("ivt", "--out-csv", c, "--out-json", j, "--quiet") == 0
        files.append((c.read_bytes(), j.read_bytes()))
    assert files[0] == files[1]


def test_ivt_and_fvt_pass_by_default(tmp_path):
    j = tmp_path / "ivt.json"
    assert run("ivt", "--out-json", j, "--quiet") == 0
    rep = json.loads(j.read_text())
    assert rep["pass"] is True and rep["theorem"] == "ivt"
    assert run("fvt", "--quiet") == 0


def test_failed_hypothesis_json(tmp_path):
    j = tmp_path / "bad.json"
    rc = run("ivt", "--eta", "1.2", "--out-json", j, "--quiet")
    assert rc == 1
    rep = json.loads(j.read_text())
    assert rep["conclusion"] is None
    assert rep["hypotheses"]["eta_window"]["pass"] is False


def test_identities_exit_codes():
    assert run("identities", "--quiet") == 1
    assert run("identities", "--unitary", "--quiet") == 0


def test_seminorm_and_svf(capsys):
    assert run("seminorm", "--fn", "x^0.5*exp(-x^2)", "--m", "0", "--k", "1") == 0
    assert "gamma_{0,1} = 1.99999" in capsys.readouterr().out
    assert run("svf", "--quiet") == 0
    assert run("svf", "--L", "x^0.1", "--quiet") == 1


@pytest.mark.parametrize("args", [
    ["transform", "--alpha", "5"],
    ["transform", "--mu", "-0.9"],
    ["transform", "--fn", "x +* 2"],
    ["svf", "--L", "-1"],
])
def test_bad_input_exit_2(args, capsys):
    assert run(*args) == 2
    assert "frht-lab: error:" in capsys.readouterr().err


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "seminorm", "m": 1, "k": 0, "quiet": True}))
    assert run("--config", cfg) == 0


def test_config_errors(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "seminorm", "mm": 1}))
    assert run("--config", cfg) == 2
    assert "config error at /" in capsys.readouterr().err
    cfg.write_text("{not json")
    assert run("--config", cfg) == 2
    assert run("--config", tmp_path / "missing.json") == 2


def test_unwritable_output_exit_1(tmp_path):
    assert run("seminorm", "--out-json", tmp_path / "no" / "such" / "dir.json", "--quiet") == 1


def test_schema_file_matches_code():
    on_disk = json.loads((ROOT / "docs" / "config_schema.json").read_text())
    assert on_disk == config_schema()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "frhtlab.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "frht-lab" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "frhtlab.cli"], capture_output=True, text=True)
    assert proc.returncode == 2
