#!/usr/bin/env python3
"""Run the committed benchmark and print the strategy comparison table.

Loads tests/data/bench_config.json (network, cases, reference truth, grid
settings), runs every (strategy, case, repetition) cell, and prints mean
error counts per checkpoint with a measured wall-time ratio column.  Pass
--out to also write the deterministic JSON report (cost ratios, no wall
time, byte-stable across machines).

Run from the repository root:  python3 scripts/run_table.py [--out report.json]
"""

import argparse
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from diagbn.bench import load_config, render_table, run_experiment

DEFAULT_CONFIG = os.path.join(
    os.path.dirname(__file__), "..", "tests", "data", "bench_config.json"
)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=DEFAULT_CONFIG)
    parser.add_argument("--out", help="also write the JSON report here")
    args = parser.parse_args()

    config = load_config(args.config)
    report = run_experiment(config)
    sys.stdout.write(render_table(report))
    total = sum(report.seconds.values())
    print(f"\n{len(config.strategies)} strategies x {report.n_cases} cases x "
          f"{report.repetitions} repetitions, {total:.0f}s of chain time")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(json.dumps(report.to_jsonable(), indent=2, sort_keys=True) + "\n")
        print(f"report written to {args.out}")


if __name__ == "__main__":
    main()
