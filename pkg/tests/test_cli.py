import csv
import json

import pytest

from heavenly.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from heavenly.report import strip_timestamp


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_show_defaults(capsys):
    code, out, _ = run(capsys, "--show-defaults")
    assert code == EXIT_OK
    assert json.loads(out)["version"] == 1


@pytest.mark.parametrize(
    "args",
    [
        [],
        ["nope"],
        ["verify", "--grid", "7"],
        ["evolve", "--dt", "0"],
        ["evolve", "--init", "sin(x"],
        ["evolve", "--init", "sin(y)"],
        ["bracket-table", "--case", "kdv"],
    ],
)
def test_usage_errors(capsys, args):
    code, _, err = run(capsys, *args)
    assert code == EXIT_USAGE
    assert "error" in err


def test_verify_grid_passes(capsys):
    code, out, err = run(capsys, "verify", "grid", "--grid", "64")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert "generated_at" in doc and all(r["pass"] for r in doc["reports"])
    assert "[PASS]" in err


def test_failing_check_exits_one(capsys):
    code, out, _ = run(capsys, "reconstruct", "--grid", "64")
    assert code == EXIT_FAIL
    names = {r["check"]: r["pass"] for r in json.loads(out)["reports"]}
    assert names["variational_derivative"] and not names["homotopy_h0"]


def test_blowup_is_a_failed_report(capsys):
    code, out, _ = run(capsys, "evolve", "--init", "sin(x)", "--T", "2", "--grid", "64", "--no-timestamp")
    assert code == EXIT_FAIL
    assert json.loads(out)["reports"][0]["check"] == "evolve_blowup"


def test_reports_reproducible(capsys, tmp_path):
    args = ["lax-check", "--case", "mp", "--seed", "11"]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert strip_timestamp(a) == strip_timestamp(b)
    p1, p2 = tmp_path / "1.json", tmp_path / "2.json"
    run(capsys, *args, "--no-timestamp", "--out", str(p1))
    run(capsys, *args, "--no-timestamp", "--out", str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_seed_changes_jets(capsys):
    _, a, _ = run(capsys, "casimir", "--seed", "1", "--no-timestamp")
    _, b, _ = run(capsys, "casimir", "--seed", "2", "--no-timestamp")
    assert a != b


def test_evolve_csv(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    code, _, _ = run(capsys, "evolve", "--T", "0.01", "--grid", "64", "--csv", str(path))
    assert code == EXIT_OK
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["time", "H0", "min_v", "max_v"]
    assert float(rows[-1][0]) == pytest.approx(0.01)


def test_bracket_csv(capsys, tmp_path):
    path = tmp_path / "k.csv"
    run(capsys, "bracket-table", "--case", "mp", "--grid", "64", "--p", "0", "--csv", str(path))
    rows = list(csv.reader(open(path)))
    assert rows[0][:2] == ["case", "p"] and len(rows) > 1


def test_field_option(capsys):
    code, out, _ = run(capsys, "lax-check", "--field", "sin(x + y + t)", "--no-timestamp")
    assert code == EXIT_OK
    assert json.loads(out)["reports"][0]["params"]["field"] == "sin(x + y + t)"
