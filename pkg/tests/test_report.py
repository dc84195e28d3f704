import json

import pytest

from cswl.experiments import ExperimentResult, run_experiment
from cswl.report import ReportError, build_report, emit_report, load_json_report, render


@pytest.fixture(scope="module")
def results(designs, default_reps):
    return [run_experiment(designs[k], default_reps, participants=4, seed=1)
            for k in ("exp1_2x2", "exp1_4x4", "exp4")]


def test_tables(results):
    rep = build_report(results, {"dataset": "toy"})
    assert len(rep.participants) == 12
    acc = [r for r in rep.summary if r["metric"] == "accuracy"]
    assert [r["design"] for r in acc] == ["exp1_2x2", "exp1_4x4"]
    assert all(r["chance"] == 0.25 and r["n"] == 4 for r in acc)
    pairs = {(r["design_a"], r["metric_a"], r["design_b"], r["metric_b"]) for r in rep.paired}
    assert ("exp1_2x2", "accuracy", "exp1_4x4", "accuracy") in pairs
    assert ("exp4", "single", "exp4", "both") in pairs
    assert ("exp4", "early_first", "exp4", "late_first") in pairs
    m = rep.manifest
    assert m["seed"] == 1 and m["dataset"] == "toy" and len(m["params_digest"]) == 16
    assert m["participants"] == {"exp1_2x2": 4, "exp1_4x4": 4, "exp4": 4}


@pytest.mark.parametrize("fmt", ["csv", "json", "text"])
def test_byte_stable(results, designs, default_reps, tmp_path, fmt):
    again = [run_experiment(r.design, default_reps, participants=4, seed=1) for r in results]
    a = emit_report(results, tmp_path / "a", fmt)
    b = emit_report(again, tmp_path / "b", fmt)
    assert [p.name for p in a] == [p.name for p in b]
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()


def test_json_round_trip(results, tmp_path):
    (path,) = emit_report(results, tmp_path, "json")
    data = load_json_report(path)
    assert data == json.loads(json.dumps(build_report(results).as_dict()))
    for row, orig in zip(data["participants"], build_report(results).participants):
        assert row == orig


def test_csv_files(results):
    files = render(build_report(results), "csv")
    assert set(files) == {"participants.csv", "summary.csv", "paired.csv", "manifest.csv"}
    header = files["summary.csv"].splitlines()[0].split(",")
    for col in ("design", "metric", "chance", "mean", "sd", "se", "t", "p_two_sided", "sig_1pct"):
        assert col in header


def test_empty_and_bad_inputs(results, tmp_path):
    with pytest.raises(ReportError):
        build_report([])
    empty = ExperimentResult(results[0].design, 0, results[0].config, [])
    with pytest.raises(ReportError):
        build_report([empty])
    with pytest.raises(ReportError):
        emit_report(results, tmp_path, "xml")
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError):
        emit_report(results, blocker / "sub", "csv")
