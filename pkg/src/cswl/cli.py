"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or invalid
input files), 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import (
    DesignError,
    ScheduleError,
    gen_schedule,
    load_designs,
    run_experiment,
    validate_schedule,
)
from .params import ParamsError, load_config
from .phonemes import UnknownSymbolError, UnknownWordError
from .pipeline import Dataset, DatasetError, build_representations, default_object_names
from .report import FORMATS, ReportError, emit_report
from .representation import DescriptorFormatError, write_descriptors
from .synthetic import generate_objects

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3
CODEBOOK_SEED = 0
GROUPS = {"exp1": ("exp1_2x2", "exp1_3x3", "exp1_4x4")}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cswl", description="Cross-situational word learning simulations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate participants and write a report")
    run.add_argument("--experiment", required=True,
                     help="design id (exp1_2x2 ... exp6), 'exp1' for all three conditions, or 'all'")
    run.add_argument("--participants", type=_positive, help="participants per design (default: design's count)")
    run.add_argument("--seed", type=_seed, default=0)
    run.add_argument("--params", type=Path, help="key=value parameter overrides")
    run.add_argument("--dataset", type=Path,
                     help="directory with descriptors.txt (and optionally lexicon.tsv); default: synthetic")
    run.add_argument("--designs", type=Path, help="design file (default: the shipped designs)")
    run.add_argument("--out", type=Path, required=True)
    run.add_argument("--format", choices=FORMATS, default="csv")
    run.add_argument("--workers", type=_positive, default=1)

    gen = sub.add_parser("gen-descriptors", help="write synthetic keypoint descriptors")
    gen.add_argument("--synthetic", action="store_true", required=True,
                     help="generate synthetic descriptors (the only source supported)")
    gen.add_argument("--objects", type=_positive, required=True,
                     help="number of objects; the first ones take the default object names")
    gen.add_argument("--out", type=Path, required=True)
    gen.add_argument("--seed", type=_seed, default=0)

    val = sub.add_parser("validate-schedule", help="generate a schedule and recount its constraints")
    val.add_argument("--experiment", required=True)
    val.add_argument("--seed", type=_seed, default=0)
    val.add_argument("--designs", type=Path)
    val.add_argument("--show", action="store_true", help="print the trials")
    return p


def _design_ids(designs: dict, name: str) -> list[str]:
    if name == "all":
        return list(designs)
    if name in GROUPS:
        return list(GROUPS[name])
    if name not in designs:
        raise UsageError(f"unknown experiment {name!r}; known: {', '.join(designs)}, exp1, all")
    return [name]


def cmd_run(args) -> int:
    designs = load_designs(args.designs)
    ids = _design_ids(designs, args.experiment)
    config = load_config(args.params)
    if args.dataset is not None:
        dataset = Dataset.load(args.dataset)
        source = str(args.dataset)
    else:
        dataset = Dataset.synthetic(default_object_names(designs.values()), seed=CODEBOOK_SEED)
        source = f"synthetic(seed={CODEBOOK_SEED})"
    for i in ids:
        d = designs[i]
        dataset.check(d.all_words, d.all_referents)
    reps = build_representations(dataset, config, seed=CODEBOOK_SEED)
    results = [run_experiment(designs[i], reps, config, args.participants, args.seed, args.workers)
               for i in ids]
    extra = {"dataset": source, "codebook_sizes": {"auditory": reps.auditory_size,
                                                   "visual": reps.visual_size}}
    for path in emit_report(results, args.out, args.format, extra):
        print(path)
    return EXIT_OK


def cmd_gen_descriptors(args) -> int:
    base = default_object_names(load_designs().values())
    names = base[:args.objects] + [f"object_{k + 1}" for k in range(len(base), args.objects)]
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_descriptors(args.out, generate_objects(names, seed=args.seed))
    print(f"wrote {len(names)} objects to {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    designs = load_designs(args.designs)
    bad = 0
    for i in _design_ids(designs, args.experiment):
        sched = gen_schedule(designs[i], args.seed)
        errors = validate_schedule(designs[i], sched)
        status = "ok" if not errors else f"{len(errors)} violation(s)"
        print(f"{i}: {len(sched.trials)} trials, {len(sched.tests)} test items: {status}")
        for e in errors:
            print(f"  {e}")
        if args.show:
            for t, stim in enumerate(sched.trials):
                print(f"  {t:3d} {' '.join(stim.words)} | {' '.join(stim.referents)}")
        bad += bool(errors)
    return EXIT_RUNTIME if bad else EXIT_OK


COMMANDS = {"run": cmd_run, "gen-descriptors": cmd_gen_descriptors, "validate-schedule": cmd_validate}
DATA_ERRORS = (DatasetError, DescriptorFormatError, ParamsError, DesignError, UnknownWordError,
               UnknownSymbolError, FileNotFoundError, IsADirectoryError, UnicodeDecodeError)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ScheduleError, ReportError, OSError, ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
