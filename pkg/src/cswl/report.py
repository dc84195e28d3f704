"""Per-participant, aggregate and paired-test tables in csv, json or text.

Output is a pure function of its inputs (no timestamps, sorted keys, shortest
round-trip float formatting), so reruns with a fixed seed are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

from .experiments import ExperimentResult, condition_group, metric_chances
from .stats import StatsError, TTestResult, one_sample_t, paired_t, summarize

FORMATS = ("csv", "json", "text")
EXP1_PAIRS = (("exp1_2x2", "exp1_3x3"), ("exp1_3x3", "exp1_4x4"), ("exp1_2x2", "exp1_4x4"))


class ReportError(ValueError):
    pass


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _test_fields(test: TTestResult | None) -> dict:
    if test is None:
        return {"t": None, "df": None, "p_two_sided": None, "p_one_sided": None,
                "sig_1pct": None, "sig_5pct": None}
    return {"t": test.t, "df": test.df, "p_two_sided": test.p_two_sided,
            "p_one_sided": test.p_one_sided(), "sig_1pct": test.sig_1pct, "sig_5pct": test.sig_5pct}


def _safe(fn, *args) -> TTestResult | None:
    try:
        return fn(*args)
    except StatsError:
        return None


def _paired_specs(res: ExperimentResult) -> list[tuple[str, str]]:
    d = res.design
    if d.kind == "yurovsky":
        specs = [("single", "both")]
        if d.variant == "ordered":
            specs.append(("early_first", "late_first"))
        return specs
    if d.kind == "trueswell":
        return [("after_right", "after_wrong")]
    if d.kind == "context":
        groups = list(dict.fromkeys(condition_group(c) for c in d.conditions))
        return list(zip(groups, groups[1:]))
    return []


def _paired_rows(design_a: str, xs: list, design_b: str, ys: list, a: str, b: str) -> dict:
    pairs = [(x, y) for x, y in zip(xs, ys) if x is not None and y is not None]
    test = _safe(paired_t, [p[0] for p in pairs], [p[1] for p in pairs]) if len(pairs) >= 2 else None
    diff = summarize([p[0] - p[1] for p in pairs]).mean if pairs else None
    row = {"design_a": design_a, "metric_a": a, "design_b": design_b, "metric_b": b,
           "n": len(pairs), "mean_difference": diff}
    row.update(_test_fields(test))
    return row


@dataclass
class Report:
    manifest: dict
    participants: list[dict]
    summary: list[dict]
    paired: list[dict]

    def as_dict(self) -> dict:
        return {"manifest": self.manifest, "participants": self.participants,
                "summary": self.summary, "paired": self.paired}


def build_report(results: list[ExperimentResult], extra_manifest: dict | None = None) -> Report:
    if not results:
        raise ReportError("no experiment results to report")
    for res in results:
        if not res.participants:
            raise ReportError(f"{res.design.id}: empty participant set")

    participants = []
    summary = []
    paired = []
    for res in results:
        chances = metric_chances(res.design)
        for p in res.participants:
            row = {"design": res.design.id, "participant": p.index, "seed": p.seed}
            row.update({m: p.scores.get(m) for m in chances})
            participants.append(row)
        for metric, chance in chances.items():
            xs = res.scores(metric)
            row = {"design": res.design.id, "metric": metric, "chance": chance}
            if xs:
                s = summarize(xs)
                row.update({"n": s.n, "mean": s.mean, "sd": s.sd, "se": s.se})
            else:
                row.update({"n": 0, "mean": None, "sd": None, "se": None})
            test = _safe(one_sample_t, xs, chance) if chance is not None and len(xs) >= 2 else None
            row.update(_test_fields(test))
            summary.append(row)
        for a, b in _paired_specs(res):
            xs = [p.scores.get(a) for p in res.participants]
            ys = [p.scores.get(b) for p in res.participants]
            paired.append(_paired_rows(res.design.id, xs, res.design.id, ys, a, b))

    # conditions of one experiment run as separate designs, paired by participant index
    by_id = {r.design.id: r for r in results}
    for first, second in EXP1_PAIRS:
        if first in by_id and second in by_id:
            xs = [p.scores["accuracy"] for p in by_id[first].participants]
            ys = [p.scores["accuracy"] for p in by_id[second].participants]
            paired.append(_paired_rows(first, xs, second, ys, "accuracy", "accuracy"))

    seeds = sorted({r.seed for r in results})
    digests = sorted({r.config.digest() for r in results})
    manifest = {
        "package_version": _version(),
        "designs": [r.design.id for r in results],
        "participants": {r.design.id: len(r.participants) for r in results},
        "seed": seeds[0] if len(seeds) == 1 else seeds,
        "params_digest": digests[0] if len(digests) == 1 else digests,
        "params": results[0].config.as_flat(),
    }
    manifest.update(extra_manifest or {})
    return Report(manifest, participants, summary, paired)


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    fields = list(dict.fromkeys(k for r in rows for k in r))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_fmt(r.get(f)) for f in fields])
    return buf.getvalue()


def _text_table(rows: list[dict]) -> str:
    if not rows:
        return "(none)\n"
    fields = list(dict.fromkeys(k for r in rows for k in r))

    def cell(v):
        if isinstance(v, float):
            return f"{v:.4g}"
        return _fmt(v)

    cells = [[cell(r.get(f)) for f in fields] for r in rows]
    widths = [max(len(f), *(len(c[i]) for c in cells)) for i, f in enumerate(fields)]
    lines = ["  ".join(f.ljust(w) for f, w in zip(fields, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def render(report: Report, fmt: str) -> dict[str, str]:
    """File name to file contents."""
    if fmt == "json":
        return {"report.json": json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"}
    if fmt == "csv":
        manifest = [{"key": k, "value": json.dumps(v, sort_keys=True)} for k, v in sorted(report.manifest.items())]
        return {"participants.csv": _csv(report.participants), "summary.csv": _csv(report.summary),
                "paired.csv": _csv(report.paired), "manifest.csv": _csv(manifest)}
    if fmt == "text":
        parts = ["Run manifest", "============"]
        parts += [f"{k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(report.manifest.items())]
        parts += ["", "Aggregate scores (t-tests against chance)", "", _text_table(report.summary)]
        parts += ["Paired tests", "", _text_table(report.paired)]
        parts += ["Participants", "", _text_table(report.participants)]
        return {"report.txt": "\n".join(parts)}
    raise ReportError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def emit_report(results: list[ExperimentResult], out_dir: str | Path, fmt: str = "csv",
                extra_manifest: dict | None = None) -> list[Path]:
    if fmt not in FORMATS:
        raise ReportError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    report = build_report(results, extra_manifest)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in render(report, fmt).items():
        path = out / name
        with open(path, "w", newline="") as fh:
            fh.write(text)
        paths.append(path)
    return paths


def load_json_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
