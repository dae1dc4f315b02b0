import csv
import io
import json
import subprocess
import sys

import pytest

from hyperstress.cli import main
from hyperstress.config import ENV_DEFAULT_TOL
from hyperstress.fields import PolyField, field_to_json
from hyperstress.geometry import unit_cube

FAST = {"verify-pvp": ["--samples", "2"], "reconstruct": ["--samples", "20"],
        "classify": ["--samples", "5"], "invariance": ["--samples", "20"],
        "nsalpha": ["--samples", "6"], "scan": ["--samples", "8"]}


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


@pytest.mark.parametrize("command", sorted(FAST))
def test_every_command_passes(capsys, command):
    code, out = run(capsys, command, *FAST[command])
    assert code == 0
    report = json.loads(out.out)
    assert report["passed"] is True and report["config"]["subcommand"] == command


@pytest.mark.parametrize("command", ["verify-pvp", "reconstruct", "classify", "invariance", "nsalpha"])
def test_injected_defect_breaches(capsys, command):
    code, out = run(capsys, command, *FAST[command], "--inject-defect")
    assert code == 1
    assert json.loads(out.out)["passed"] is False


def test_output_is_deterministic(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["verify-pvp", "--samples", "2", "--seed", "5", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_tight_tolerance_breaches(capsys):
    code, _ = run(capsys, "verify-pvp", "--samples", "3", "--tol", "1e-18")
    assert code == 1


def test_environment_tolerance(capsys, monkeypatch):
    monkeypatch.setenv(ENV_DEFAULT_TOL, "1e-18")
    code, out = run(capsys, "verify-pvp", "--samples", "3")
    assert code == 1
    assert {r["tol"] for r in json.loads(out.out)["reports"]} == {1e-18}
    code, _ = run(capsys, "verify-pvp", "--samples", "3", "--tol", "1e-10")
    assert code == 0


def test_csv(capsys):
    code, out = run(capsys, "scan", "--samples", "4", "--axis", "0", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out.out)))
    assert code == 0 and len(rows) == 4
    assert list(rows[0]) == ["theta", "f1", "f2", "f3"] and float(rows[0]["theta"]) == 0.0


def test_part_and_field_files(capsys, tmp_path):
    part = tmp_path / "cube.json"
    part.write_text(json.dumps(unit_cube().to_json()))
    fields = tmp_path / "fields.json"
    fields.write_text(json.dumps({"T": field_to_json(PolyField.zero(2)),
                                  "H": field_to_json(PolyField.zero(3)),
                                  "v": field_to_json(PolyField.position())}))
    code, out = run(capsys, "verify-pvp", "--part", str(part), "--fields", str(fields))
    reports = json.loads(out.out)["reports"]
    assert code == 0 and len(reports) == 1 and reports[0]["part"] == "cube"


def test_constant_inputs(capsys, tmp_path):
    spec = tmp_path / "h.json"
    single_pair = [[[0, 0, 0], [0, 0, 1], [0, 1, 0]], [[0] * 3] * 3, [[0] * 3] * 3]
    spec.write_text(json.dumps({"H": [single_pair]}))
    code, out = run(capsys, "reconstruct", "--fields", str(spec))
    assert code == 0 and json.loads(out.out)["passed"]
    spec.write_text(json.dumps({"g": [1, 2]}))
    assert run(capsys, "nsalpha", "--fields", str(spec))[0] == 2


def test_malformed_json_is_an_input_error(capsys, caplog, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": [[0, 0, 0],\n  oops]}')
    code, _ = run(capsys, "verify-pvp", "--part", str(bad))
    assert code == 2 and "line 2, column 3" in caplog.text


def test_missing_file_and_bad_parameters(capsys, tmp_path):
    assert run(capsys, "verify-pvp", "--part", str(tmp_path / "nope.json"))[0] == 2
    assert run(capsys, "classify", "--tol", "-1")[0] == 2
    assert run(capsys, "classify", "--degree", "99")[0] == 2


def test_open_part_is_an_input_error(capsys, tmp_path):
    data = unit_cube().to_json()
    data["faces"] = data["faces"][:-1]
    part = tmp_path / "open.json"
    part.write_text(json.dumps(data))
    assert run(capsys, "verify-pvp", "--part", str(part))[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hyperstress", "scan", "--samples", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["scan"][1]["theta"] == pytest.approx(1.5707963267948966)
