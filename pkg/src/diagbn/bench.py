"""Strategy comparison harness: run a grid of (strategy, case, repetition)
chains against ground truth and report mean error counts per checkpoint.

Accuracy is judged per model node with a truth-dependent tolerance band
sqrt(t(1-t))/5, floored so that truths near 0 or 1 do not demand the
impossible of a finite sampler. Timing is reported two ways: a measured
wall-clock ratio for humans, and a deterministic per-move cost ratio that
keeps report files byte-stable across machines.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

from .exact import exact_posteriors
from .generate import cases_from_jsonable
from .network import MODEL, STRICT, parse_network
from .sampler import PRESETS, StrategySpec, derive_seed, run_chain

DEFAULT_EPSILON_FLOOR = 0.01


def error_count(estimates: dict, truths: dict, epsilon_floor: float = DEFAULT_EPSILON_FLOOR) -> int:
    """Count nodes whose estimate misses the truth-dependent accuracy band.

    The band is max(sqrt(t(1-t))/5, epsilon_floor) and the bound is
    inclusive: landing exactly on it is accurate.
    """
    if epsilon_floor < 0:
        raise ValueError("epsilon_floor must be nonnegative")
    if set(estimates) != set(truths):
        only_e = sorted(set(estimates) - set(truths))
        only_t = sorted(set(truths) - set(estimates))
        raise ValueError(f"node mismatch: estimates-only {only_e}, truths-only {only_t}")
    errors = 0
    for nid, truth in truths.items():
        bound = max(math.sqrt(truth * (1.0 - truth)) / 5.0, epsilon_floor)
        if abs(estimates[nid] - truth) > bound:
            errors += 1
    return errors


@dataclass
class ExperimentConfig:
    net: object
    cases: list
    strategies: list
    checkpoints: list
    repetitions: int
    seed: int
    truths: list = None  # one truth map per case; None -> exact enumeration
    epsilon_floor: float = DEFAULT_EPSILON_FLOOR
    baseline: str = "gibbs"
    burn_in: int = 0

    def resolve_strategy(self, name) -> StrategySpec:
        if name not in PRESETS:
            raise ValueError(f"unknown strategy {name!r}; presets: {sorted(PRESETS)}")
        return PRESETS[name]


def load_config(path: str) -> ExperimentConfig:
    """Read a benchmark config JSON; file paths resolve against its directory."""
    with open(path) as fh:
        raw = json.load(fh)
    base = os.path.dirname(os.path.abspath(path))

    def resolve(p):
        return p if os.path.isabs(p) else os.path.join(base, p)

    with open(resolve(raw["network"])) as fh:
        net = parse_network(fh.read(), profile=STRICT)
    with open(resolve(raw["cases"])) as fh:
        cases = cases_from_jsonable(json.load(fh), net)
    truths = None
    if raw.get("truth"):
        with open(resolve(raw["truth"])) as fh:
            tr = json.load(fh)
        truths = [{str(k): float(v) for k, v in per_case.items()} for per_case in tr["cases"]]
        if len(truths) != len(cases):
            raise ValueError(
                f"truth file covers {len(truths)} cases but config lists {len(cases)}"
            )
    cfg = ExperimentConfig(
        net=net,
        cases=cases,
        strategies=list(raw["strategies"]),
        checkpoints=sorted(int(c) for c in raw["checkpoints"]),
        repetitions=int(raw["repetitions"]),
        seed=int(raw["seed"]),
        truths=truths,
        epsilon_floor=float(raw.get("epsilon_floor", DEFAULT_EPSILON_FLOOR)),
        baseline=str(raw.get("baseline", "gibbs")),
        burn_in=int(raw.get("burn_in", 0)),
    )
    for name in cfg.strategies:
        cfg.resolve_strategy(name)
    if cfg.repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    if not cfg.checkpoints:
        raise ValueError("need at least one checkpoint")
    return cfg


@dataclass
class Report:
    strategies: list
    checkpoints: list
    mean_errors: dict  # strategy -> [mean error count per checkpoint]
    cost_ratio: dict  # strategy -> deterministic move-cost ratio vs baseline
    time_ratio: dict  # strategy -> measured wall-clock ratio vs baseline
    seconds: dict  # strategy -> absolute wall seconds (not serialized by default)
    baseline: str
    seed: int
    repetitions: int
    n_cases: int
    epsilon_floor: float
    n_scored_nodes: int

    def to_jsonable(self, include_wall_time: bool = False) -> dict:
        out = {
            "baseline": self.baseline,
            "checkpoints": self.checkpoints,
            "cost_ratio": {k: self.cost_ratio[k] for k in self.strategies},
            "epsilon_floor": self.epsilon_floor,
            "mean_errors": {k: self.mean_errors[k] for k in self.strategies},
            "n_cases": self.n_cases,
            "n_scored_nodes": self.n_scored_nodes,
            "repetitions": self.repetitions,
            "seed": self.seed,
            "seed_rule": "cell seed = derive_seed(seed, strategy, case_index, repetition)",
            "strategies": self.strategies,
        }
        if include_wall_time:
            out["time_ratio"] = {k: self.time_ratio[k] for k in self.strategies}
            out["seconds"] = {k: self.seconds[k] for k in self.strategies}
        return out


def _case_truths(config) -> list:
    if config.truths is not None:
        return config.truths
    return [exact_posteriors(config.net, case.evidence) for case in config.cases]


def run_experiment(config: ExperimentConfig) -> Report:
    """Run the full strategy grid and aggregate error counts.

    Scoring covers model nodes not fixed by evidence in a case. Each cell
    (strategy, case, repetition) gets its own derived seed, so the grid can
    be reordered or parallelized without changing any number.
    """
    net = config.net
    truths = _case_truths(config)
    model_ids = [nid for nid in net.ids if net.kind[net.index[nid]] == MODEL]
    sweeps = max(config.checkpoints)
    errors = {s: [0.0] * len(config.checkpoints) for s in config.strategies}
    seconds = {s: 0.0 for s in config.strategies}
    cost = {s: 0 for s in config.strategies}
    cells = 0
    scored_nodes = 0
    for name in config.strategies:
        strategy = config.resolve_strategy(name)
        for case_idx, case in enumerate(config.cases):
            scored = [nid for nid in model_ids if nid not in case.evidence]
            truth = {nid: truths[case_idx][nid] for nid in scored}
            for rep in range(config.repetitions):
                cell_seed = derive_seed(config.seed, name, case_idx, rep)
                result = run_chain(
                    net,
                    case.evidence,
                    strategy,
                    sweeps=sweeps,
                    seed=cell_seed,
                    burn_in=config.burn_in,
                    checkpoints=config.checkpoints,
                )
                seconds[name] += result.seconds
                cost[name] += result.cost
                for ci, ck in enumerate(config.checkpoints):
                    est = {nid: result.checkpoint_estimates[ck][nid] for nid in scored}
                    errors[name][ci] += error_count(est, truth, config.epsilon_floor)
        cells = len(config.cases) * config.repetitions
        errors[name] = [round(e / cells, 6) for e in errors[name]]
    scored_nodes = len(model_ids)
    base = config.baseline
    if base not in config.strategies:
        base = config.strategies[0]
    time_ratio = {
        s: (seconds[s] / seconds[base]) if seconds[base] > 0 else float("nan")
        for s in config.strategies
    }
    cost_ratio = {s: round(cost[s] / cost[base], 6) for s in config.strategies}
    return Report(
        strategies=list(config.strategies),
        checkpoints=list(config.checkpoints),
        mean_errors=errors,
        cost_ratio=cost_ratio,
        time_ratio=time_ratio,
        seconds=seconds,
        baseline=base,
        seed=config.seed,
        repetitions=config.repetitions,
        n_cases=len(config.cases),
        epsilon_floor=config.epsilon_floor,
        n_scored_nodes=scored_nodes,
    )


def render_table(report: Report, measured_time: bool = True) -> str:
    """Plain-text comparison table: one strategy per row, a time-ratio
    column, then mean error count at each sweep checkpoint."""
    time_col = "Time" if measured_time else "Cost"
    ratios = report.time_ratio if measured_time else report.cost_ratio
    header = ["Strategy", time_col] + [str(c) for c in report.checkpoints]
    rows = []
    for s in report.strategies:
        row = [s, f"{ratios[s]:.2f}"] + [f"{e:.1f}" for e in report.mean_errors[s]]
        rows.append(row)
    widths = [max(len(r[i]) for r in rows + [header]) for i in range(len(header))]
    lines = []
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(header)))
    lines.append("  ".join("-" * widths[i] for i in range(len(header))))
    for row in rows:
        lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)))
    return "\n".join(lines) + "\n"
