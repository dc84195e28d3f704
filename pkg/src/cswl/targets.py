"""Reference values reported for the model and checks of simulated runs against them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .experiments import ExperimentResult, load_designs, run_experiment
from .params import ModelConfig
from .pipeline import Dataset, Representations, build_representations, default_object_names
from .stats import StatsError, TTestResult, one_sample_t, paired_t
from .synthetic import PRESETS, generate_objects

ALPHA = 0.01
CODEBOOK_SEED = 0

EXP1 = {"exp1_2x2": 0.778, "exp1_3x3": 0.700, "exp1_4x4": 0.567}
EXP2 = {"single": 0.372, "either": 0.622, "both": 0.278}
EXP3 = {"single": 0.478, "either": 0.594, "both": 0.367}
EXP4 = {"single": 0.500, "either": 0.650, "both": 0.283}
EXP5_CONDITIONAL = {"after_right": 0.407, "after_wrong": 0.232}
EXP6 = {"3+3": 0.937, "4+2": 0.739, "5+1": 0.5}
CODEBOOK = {"auditory": 28, "visual": 37}
TOL = 0.10
EXP6_TOL = 0.15
CODEBOOK_REL_TOL = 0.5


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.criterion}: {self.name}: {self.detail}"


def _mean(res: ExperimentResult, metric: str) -> float:
    xs = res.scores(metric)
    return float(np.mean(xs)) if xs else float("nan")


def _within(criterion, name, value, target, tol) -> Check:
    ok = bool(abs(value - target) <= tol)
    return Check(criterion, name, ok, f"{value:.3f} vs {target:.3f} +/- {tol:.2f}")


def _test(fn, *args) -> TTestResult | None:
    try:
        return fn(*args)
    except StatsError:
        return None


def _sig_greater(criterion, name, test: TTestResult | None, alpha=ALPHA) -> Check:
    if test is None:
        return Check(criterion, name, False, "t-test undefined (zero variance or too few samples)")
    ok = test.t > 0 and test.p_greater < alpha
    return Check(criterion, name, ok, f"t({test.df})={test.t:.3f}, one-sided p={test.p_greater:.2e}, "
                                      f"alpha={alpha:g}")


def check_exp1(results: dict[str, ExperimentResult]) -> list[Check]:
    out = []
    for key, target in EXP1.items():
        res = results[key]
        out.append(_within(1, f"{key} accuracy", _mean(res, "accuracy"), target, TOL))
        out.append(_sig_greater(1, f"{key} above chance 0.25",
                                _test(one_sample_t, res.scores("accuracy"), 0.25)))
    out.append(_sig_greater(1, "2x2 > 4x4 paired by participant",
                            _test(paired_t, results["exp1_2x2"].scores("accuracy"),
                                  results["exp1_4x4"].scores("accuracy"))))
    return out


def _check_mix(criterion, res, targets, alpha) -> list[Check]:
    out = [_within(criterion, f"{res.design.id} {m}", _mean(res, m), t, TOL) for m, t in targets.items()]
    out.append(_sig_greater(criterion, f"{res.design.id} single > both paired",
                            _test(paired_t, res.scores("single"), res.scores("both")), alpha))
    return out


def check_exp2(res: ExperimentResult) -> list[Check]:
    return _check_mix(2, res, EXP2, 0.001)


def check_exp3(res: ExperimentResult) -> list[Check]:
    return _check_mix(3, res, EXP3, ALPHA)


def check_exp4(res: ExperimentResult) -> list[Check]:
    out = [_within(4, f"exp4 {m}", _mean(res, m), t, TOL) for m, t in EXP4.items()]
    out.append(_sig_greater(4, "exp4 early-first > late-first paired",
                            _test(paired_t, res.scores("early_first"), res.scores("late_first"))))
    return out


def check_exp5(res: ExperimentResult) -> list[Check]:
    last = f"cycle{res.design.cycles}"
    chance = 1 / res.design.alternatives
    out = [_sig_greater(5, f"exp5 {last} accuracy above {chance:g}",
                        _test(one_sample_t, res.scores(last), chance))]
    out += [_within(5, f"exp5 {m}", _mean(res, m), t, TOL) for m, t in EXP5_CONDITIONAL.items()]
    first = _mean(res, "created_cycle1")
    final = _mean(res, f"created_cycle{res.design.cycles}")
    out.append(Check(5, "exp5 created nodes in cycle 1 within [2, 4]", 2 <= first <= 4, f"{first:.3f}"))
    out.append(Check(5, "exp5 created nodes in the last cycle below 1", final < 1, f"{final:.3f}"))
    return out


def check_exp6(res: ExperimentResult) -> list[Check]:
    m = {g: _mean(res, g) for g in EXP6}
    return [
        Check(6, "exp6 3+3 accuracy >= 0.80", m["3+3"] >= 0.80, f"{m['3+3']:.3f}"),
        _within(6, "exp6 4+2 accuracy", m["4+2"], EXP6["4+2"], EXP6_TOL),
        _within(6, "exp6 5+1 accuracy", m["5+1"], EXP6["5+1"], EXP6_TOL),
        Check(6, "exp6 ordering 3+3 > 4+2 > 5+1", m["3+3"] > m["4+2"] > m["5+1"],
              f"{m['3+3']:.3f} > {m['4+2']:.3f} > {m['5+1']:.3f}"),
    ]


def check_codebooks(auditory_size: int, visual_size: int) -> list[Check]:
    out = []
    for name, size in (("auditory", auditory_size), ("visual", visual_size)):
        target = CODEBOOK[name]
        lo, hi = target * (1 - CODEBOOK_REL_TOL), target * (1 + CODEBOOK_REL_TOL)
        out.append(Check(7, f"{name} codebook size", lo <= size <= hi,
                         f"{size} clusters vs {target} (allowed [{lo:g}, {hi:g}])"))
    return out


CHECKERS = {"exp2": check_exp2, "exp3": check_exp3, "exp4": check_exp4,
            "exp5": check_exp5, "exp6": check_exp6}


def check_all(results: dict[str, ExperimentResult]) -> list[Check]:
    out = []
    if all(k in results for k in EXP1):
        out += check_exp1(results)
    for key, fn in CHECKERS.items():
        if key in results:
            out += fn(results[key])
    return out


@dataclass
class Evaluation:
    config: ModelConfig
    seed: int
    preset: str
    reps: Representations
    results: dict[str, ExperimentResult]
    checks: list[Check]

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)


def evaluate(config: ModelConfig | None = None, seed: int = 0, preset: str = "default",
             participants: int | None = None, workers: int = 1) -> Evaluation:
    """Run every shipped design on synthetic data and check it against the targets."""
    config = config or ModelConfig()
    designs = load_designs()
    names = default_object_names(designs.values())
    data = Dataset(generate_objects(names, CODEBOOK_SEED, PRESETS[preset]))
    reps = build_representations(data, config, seed=CODEBOOK_SEED)
    results = {k: run_experiment(d, reps, config, participants, seed, workers) for k, d in designs.items()}
    checks = check_codebooks(reps.auditory_size, reps.visual_size) + check_all(results)
    return Evaluation(config, seed, preset, reps, results, checks)
