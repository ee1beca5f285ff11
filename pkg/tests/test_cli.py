import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arenslab import cli
from arenslab.export import dumps, format_complex, grid_from_csv, grid_to_csv, parse_complex
from arenslab.matrix_core import ConvergenceError


def _run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def _strip_time(text):
    data = json.loads(text)
    data.pop("wall_time")
    return data


@given(st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_complex_format_round_trips(z):
    text = format_complex(z)
    assert text.endswith("j")
    assert parse_complex(text) == z


def test_complex_format_example():
    assert format_complex(1 - 0.5j) == "1-0.5j"
    assert format_complex(0.1) == "0.10000000000000001+0j"


def test_csv_round_trip():
    g = np.array([[1 / 3 + 2j, -1e-300], [np.pi, 1j]])
    np.testing.assert_array_equal(grid_from_csv(grid_to_csv(g)), g)


def test_dumps_is_deterministic_and_plain_json():
    text = dumps({"b": 1 + 2j, "a": np.float64(0.5), "c": np.arange(2)})
    assert text == dumps({"c": np.arange(2), "a": 0.5, "b": 1 + 2j})
    assert json.loads(text) == {"a": 0.5, "b": [1.0, 2.0], "c": [0, 1]}


def test_list_catalog(capsys):
    code, out = _run(["list"], capsys)
    assert code == 0
    assert sum(1 for line in out.out.splitlines() if line and not line.startswith(" ")) == 7
    code, out = _run(["list", "--json"], capsys)
    catalog = json.loads(out.out)
    assert len(catalog) == 7 and all(entry["result"] for entry in catalog)


def test_hs_run_reports_violation_with_exit_zero(capsys):
    code, out = _run(["run", "--scenario", "hs-hs", "--n", "32"], capsys)
    assert code == 0
    report = json.loads(out.out)
    assert report["verdict"]["status"] == "VIOLATION"
    assert report["verdict"]["discrepancy"] == 1.0
    assert report["grid"]["row_then_col"]["value"] == [0.0, 0.0]
    assert report["grid"]["col_then_row"]["value"] == [1.0, 0.0]
    assert report["version"] == cli.__version__ and "wall_time" in report


def test_p_tagged_run_certifies_families(capsys):
    code, out = _run(["run", "--scenario", "hs-hs", "--n", "32", "--p", "1", "--q", "1"], capsys)
    report = json.loads(out.out)
    assert report["config"]["p"] == 1.0
    assert all(c["norm"] == 1.0 and c["max"] <= 1.0 for c in report["certificates"].values())


def test_bk_and_b0k_csv_grids_identical(tmp_path):
    for name in ("bk-k", "b0k-k"):
        assert cli.main(["run", "--scenario", name, "--n", "24", "--format", "csv",
                         "--out", str(tmp_path / f"{name}.csv")]) == 0
    a, b = (tmp_path / "bk-k.csv").read_bytes(), (tmp_path / "b0k-k.csv").read_bytes()
    assert a == b
    g = grid_from_csv(a.decode())
    i, j = np.indices(g.shape)
    np.testing.assert_array_equal(g, (i <= j).astype(complex))
    assert json.loads((tmp_path / "bk-k.json").read_text())["verdict"]["status"] == "VIOLATION"


@pytest.mark.parametrize("argv", [
    ["run", "--scenario", "schur", "--n", "24", "--trials", "2", "--seed", "4"],
    ["run", "--scenario", "finite-dim", "--trials", "3", "--dim", "2"],
    ["run", "--scenario", "projnorm", "--dim", "3", "--trials", "4"],
])
def test_reports_are_deterministic(argv, capsys):
    _, first = _run(argv, capsys)
    _, second = _run(argv, capsys)
    assert _strip_time(first.out) == _strip_time(second.out)

    def without_time(text):
        return [line for line in text.splitlines() if '"wall_time"' not in line]

    assert without_time(first.out) == without_time(second.out)


def test_suite_reports(capsys, tmp_path):
    _, out = _run(["run", "--scenario", "schur", "--n", "24", "--trials", "2"], capsys)
    report = json.loads(out.out)
    assert report["verdict"]["witness"]["violations"] == 0
    assert len(report["trials"]) == 2
    path = tmp_path / "fd.csv"
    cli.main(["run", "--scenario", "finite-dim", "--trials", "3", "--dim", "2", "--format", "csv",
              "--out", str(path)])
    lines = path.read_text().splitlines()
    assert lines[0] == "trial,seed,status,limit_error" and len(lines) == 4


def test_projnorm_report(capsys):
    _, out = _run(["run", "--scenario", "projnorm", "--dim", "3"], capsys)
    report = json.loads(out.out)
    est = report["estimates"]
    assert est["lower"] <= report["nuclear_oracle"] + 1e-8 <= est["upper"] + 2e-8
    _, out = _run(["run", "--scenario", "projnorm", "--dim", "4", "--p", "1", "--trials", "4"], capsys)
    report = json.loads(out.out)
    assert report["nuclear_oracle"] is None and report["legs"]["left_shape"] == [2, 2]


@pytest.mark.parametrize("argv", [
    ["run", "--scenario", "nope"],
    ["run", "--scenario", "hs-hs", "--window", "40"],
    ["run", "--scenario", "hs-hs", "--eps", "0"],
    ["run", "--scenario", "hs-hs", "--tol", "-1"],
    ["run", "--scenario", "hs-hs", "--p", "0.5"],
    ["run", "--scenario", "hs-hs", "--format", "csv"],
    ["run"],
])
def test_usage_errors_exit_two(argv, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 2


def test_numerical_failure_exit_one(monkeypatch, capsys):
    def boom(cfg):
        raise ConvergenceError("forced", 1.0)

    monkeypatch.setattr(cli, "run", boom)
    code, out = _run(["run", "--scenario", "hs-hs"], capsys)
    assert code == 1 and "ConvergenceError" in out.err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "arenslab", "list"], capture_output=True, text=True)
    assert proc.returncode == 0 and "hs-hs" in proc.stdout
