import json

import pytest

from cswl.cli import main


def test_run_writes_report(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", "--experiment", "exp3", "--participants", "2", "--seed", "3",
                 "--out", str(out), "--format", "json"])
    assert code == 0
    data = json.loads((out / "report.json").read_text())
    assert data["manifest"]["designs"] == ["exp3"]
    assert data["manifest"]["dataset"].startswith("synthetic")
    assert str(out / "report.json") in capsys.readouterr().out


def test_run_is_reproducible(tmp_path):
    for name in ("a", "b"):
        assert main(["run", "--experiment", "exp1", "--participants", "2",
                     "--out", str(tmp_path / name)]) == 0
    for f in ("participants.csv", "summary.csv", "paired.csv", "manifest.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_run_with_descriptor_dataset(tmp_path):
    from cswl.experiments import load_designs
    from cswl.pipeline import default_object_names

    n = len(default_object_names(load_designs().values()))
    data = tmp_path / "data"
    assert main(["gen-descriptors", "--synthetic", "--objects", str(n),
                 "--out", str(data / "descriptors.txt")]) == 0
    assert main(["run", "--experiment", "exp5", "--participants", "1", "--dataset", str(data),
                 "--out", str(tmp_path / "o"), "--format", "text"]) == 0
    assert "Run manifest" in (tmp_path / "o" / "report.txt").read_text()


@pytest.mark.parametrize("argv", [
    [],
    ["run", "--experiment", "exp9", "--out", "x"],
    ["run", "--experiment", "exp2"],
    ["run", "--experiment", "exp2", "--out", "x", "--participants", "0"],
    ["run", "--experiment", "exp2", "--out", "x", "--seed", "-1"],
    ["run", "--experiment", "exp2", "--out", "x", "--format", "xml"],
    ["bogus"],
])
def test_usage_errors(argv):
    assert main(argv) == 1


def test_data_errors(tmp_path):
    out = str(tmp_path / "o")
    bad_params = tmp_path / "p.txt"
    bad_params.write_text("association.unknown = 1\n")
    assert main(["run", "--experiment", "exp2", "--out", out, "--params", str(bad_params)]) == 2
    assert main(["run", "--experiment", "exp2", "--out", out, "--dataset", str(tmp_path)]) == 2
    assert main(["run", "--experiment", "exp2", "--out", out, "--params", str(tmp_path / "none")]) == 2
    bad_design = tmp_path / "d.ini"
    bad_design.write_text("[exp2]\nkind = nope\nparticipants = 1\n")
    assert main(["validate-schedule", "--experiment", "exp2", "--designs", str(bad_design)]) == 2
    # dataset lacking the design's objects
    data = tmp_path / "small"
    assert main(["gen-descriptors", "--synthetic", "--objects", "2", "--out", str(data / "descriptors.txt")]) == 0
    assert main(["run", "--experiment", "exp2", "--out", out, "--dataset", str(data)]) == 2


def test_runtime_error_on_unwritable_output(tmp_path):
    blocker = tmp_path / "f"
    blocker.write_text("")
    assert main(["run", "--experiment", "exp3", "--participants", "1", "--out", str(blocker / "x")]) == 3


def test_validate_schedule(capsys):
    assert main(["validate-schedule", "--experiment", "all", "--seed", "4"]) == 0
    out = capsys.readouterr().out
    assert out.count(": ok") == 8
    assert main(["validate-schedule", "--experiment", "exp5", "--show"]) == 0
    assert "|" in capsys.readouterr().out
