#!/usr/bin/env python3
"""Build the committed benchmark: network, cases, reference truth, config.

The benchmark network (60 model / 30 sensory / 200 links) is far above the
enumeration cap, so ground truth comes from a long merged-chain reference
run and is stored clearly labeled as non-exact.

The reference strategy deliberately does NOT clamp: clamping zeroes a
node's estimate, and baking that approximation into the truth file would
bias every later comparison toward the strategies that share it.  It does
use flow-aware conditioning and swap moves (correctness verified against
enumeration in the test suite; mixing far better than plain single-site),
under the Gibbs rule.

Run from the repository root:  python3 scripts/make_benchmark.py
"""

import json
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from diagbn.generate import GeneratorParams, cases_to_jsonable, generate_cases, generate_network
from diagbn.network import serialize_network
from diagbn.sampler import (
    GIBBS,
    SWAP_SPOUSES_CHILD_TRUE,
    StrategySpec,
    sample_posteriors,
)

NET_SEED = 11
CASES_SEED = 12
TRUTH_SEED = 4242
BENCH_SEED = 20260822
CHAINS = 8
SWEEPS = 500_000
BURN_IN = 2_000

REFERENCE = StrategySpec(
    name="reference-flow-swap",
    clamp=False,
    flow_aware=True,
    move_policy=SWAP_SPOUSES_CHILD_TRUE,
    rule=GIBBS,
)

PARAMS = GeneratorParams(
    n_model=60,
    n_sensory=30,
    n_links=200,
    prior_range=(0.001, 0.03),
    link_range=(0.5, 0.95),
    sensory_leak_range=(0.0005, 0.005),
    layering="layered-causal",
    depth=3,
    competing_fraction=0.7,
    seed=NET_SEED,
)


def main():
    out_dir = os.path.join(os.path.dirname(__file__), "..", "tests", "data")
    os.makedirs(out_dir, exist_ok=True)

    net = generate_network(PARAMS)
    with open(os.path.join(out_dir, "bench_net.json"), "w") as fh:
        fh.write(serialize_network(net))

    cases = generate_cases(net, 5, (4, 20), (2, 9), seed=CASES_SEED)
    with open(os.path.join(out_dir, "bench_cases.json"), "w") as fh:
        fh.write(json.dumps(cases_to_jsonable(cases), indent=2, sort_keys=True) + "\n")
    print("cases:", [(len(c.evidence), c.n_positive) for c in cases], flush=True)

    truths = []
    for idx, case in enumerate(cases):
        t0 = time.time()
        est = sample_posteriors(
            net,
            case.evidence,
            REFERENCE,
            sweeps=SWEEPS,
            seed=TRUTH_SEED + idx,
            burn_in=BURN_IN,
            chains=CHAINS,
        )
        truths.append({nid: round(p, 8) for nid, p in sorted(est.items())})
        print(f"case {idx}: {time.time() - t0:.0f}s", flush=True)

    truth_doc = {
        "exact": False,
        "method": {
            "strategy": "reference-flow-swap: gibbs rule, flow-aware, "
            "swap-spouses-child-true pairing, no clamping",
            "chains": CHAINS,
            "sweeps": SWEEPS,
            "burn_in": BURN_IN,
            "seed_rule": f"per-case seed = {TRUTH_SEED} + case index",
            "note": "long merged-chain reference run, NOT exact enumeration; "
            "the network is far above the enumeration cap",
        },
        "cases": truths,
    }
    with open(os.path.join(out_dir, "bench_truth.json"), "w") as fh:
        fh.write(json.dumps(truth_doc, indent=2, sort_keys=True) + "\n")

    config = {
        "network": "bench_net.json",
        "cases": "bench_cases.json",
        "truth": "bench_truth.json",
        "strategies": [
            "gibbs",
            "gibbs-clamp",
            "gibbs-flow",
            "metropolis",
            "optimized-random",
            "optimized-fwd-bwd",
        ],
        "checkpoints": [5, 500, 1000, 2000],
        "repetitions": 20,
        "seed": BENCH_SEED,
        "epsilon_floor": 0.01,
        "baseline": "gibbs",
    }
    with open(os.path.join(out_dir, "bench_config.json"), "w") as fh:
        fh.write(json.dumps(config, indent=2, sort_keys=True) + "\n")
    print("done", flush=True)


if __name__ == "__main__":
    main()
