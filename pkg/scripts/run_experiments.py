"""Run the default protocol of one or more experiments and print a summary.

    python scripts/run_experiments.py                    # all six presets
    python scripts/run_experiments.py sublinearity --replicates 10 --out runs/
"""

import argparse
import os
import time
from pathlib import Path

from eucfpp.experiments import preset, run_experiment, write_result
from eucfpp.experiments.config import EXPERIMENTS


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("names", nargs="*", help=f"any of {', '.join(EXPERIMENTS)} (default: all)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--replicates", type=int)
    ap.add_argument("--kind", choices=["delaunay", "rng"])
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="runs")
    args = ap.parse_args()
    unknown = set(args.names) - set(EXPERIMENTS)
    if unknown:
        ap.error(f"unknown experiment(s): {', '.join(sorted(unknown))}")

    status = 0
    for name in args.names or EXPERIMENTS:
        over = {"master_seed": args.seed}
        if args.replicates:
            over["replicates"] = args.replicates
        if args.kind:
            over["graph_kind"] = args.kind
        cfg = preset(name, **over)
        t0 = time.perf_counter()
        res = run_experiment(cfg, threads=args.threads)
        write_result(res, Path(args.out) / name)
        print(f"== {name} ({time.perf_counter() - t0:.1f}s)")
        for row in res.rows:
            print(f"   {row.params}  {row.estimate:.4f} +- {row.stderr:.4f}  (n={row.replicates}, "
                  f"excluded={row.excluded})")
        for c in res.checks:
            tag = "ok  " if c.passed else ("FAIL" if c.fatal else "warn")
            print(f"   [{tag}] {c.name} {c.detail}")
        status |= not res.ok
    return int(status)


if __name__ == "__main__":
    raise SystemExit(main())
