"""Run every shipped design on synthetic data and print the acceptance checks.

    python scripts/run_all.py --seed 0 --set pipeline.context_granularity=pair --out results/pair
"""

import argparse
import sys
from pathlib import Path

from cswl.params import apply_overrides, load_config
from cswl.report import emit_report
from cswl.synthetic import PRESETS
from cswl.targets import evaluate


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--params", type=Path, help="key=value parameter file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="extra parameter override (repeatable)")
    p.add_argument("--preset", choices=sorted(PRESETS), default="default", help="synthetic dataset preset")
    p.add_argument("--participants", type=int, help="override every design's participant count")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, help="also write a csv report here")
    args = p.parse_args(argv)

    config = apply_overrides(load_config(args.params), dict(s.split("=", 1) for s in args.set))
    ev = evaluate(config, args.seed, args.preset, args.participants, args.workers)
    print(f"params digest {config.digest()}, seed {args.seed}, preset {args.preset}, "
          f"codebooks {ev.reps.auditory_size} auditory / {ev.reps.visual_size} visual")
    for c in ev.checks:
        print(c.line())
    print(f"{ev.passed}/{len(ev.checks)} checks pass")
    if args.out:
        extra = {"dataset": f"synthetic:{args.preset}",
                 "codebook_sizes": {"auditory": ev.reps.auditory_size, "visual": ev.reps.visual_size}}
        for path in emit_report(list(ev.results.values()), args.out, "csv", extra):
            print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
