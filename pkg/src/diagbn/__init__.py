"""Diagnostic inference for noisy-or Bayesian networks.

MCMC sampling with engineered chains (clamping, evidence-flow-aware
conditioning, pair blocking and swapping under Gibbs or Metropolis rules),
an exact enumeration oracle, and a benchmark harness for comparing
strategies on synthetic fault-diagnosis networks.
"""

from .bench import (
    ExperimentConfig,
    Report,
    error_count,
    load_config,
    render_table,
    run_experiment,
)
from .exact import (
    EnumerationCapError,
    TransitionMatrix,
    d_separated,
    exact_posteriors,
    explicit_transition_matrix,
    prior_marginals_forward,
)
from .flow import (
    CLAMPED,
    DIAGNOSTIC_SAMPLED,
    FORWARD_SAMPLED,
    ClampResult,
    FlowInfo,
    clamp_pass,
    classify_flow,
    evidential_children,
    full_blanket_flow,
    no_clamp,
)
from .generate import (
    GeneratorParams,
    TestCase,
    generate_cases,
    generate_network,
)
from .network import (
    MODEL,
    PERMISSIVE,
    SENSORY,
    STRICT,
    Network,
    NetworkError,
    build_network,
    joint_log_prob,
    markov_blanket,
    noisy_or_prob,
    parse_evidence,
    parse_network,
    serialize_network,
    validate,
)
from .sampler import (
    GIBBS,
    METROPOLIS,
    PRESETS,
    MarginalAccumulator,
    MoveProposal,
    StrategySpec,
    conditional_prob,
    derive_seed,
    estimate_marginals,
    initialize_state,
    metropolis_accept,
    run_chain,
    sample_posteriors,
    transition_distribution,
)

__all__ = [
    "CLAMPED",
    "DIAGNOSTIC_SAMPLED",
    "FORWARD_SAMPLED",
    "GIBBS",
    "METROPOLIS",
    "MODEL",
    "PERMISSIVE",
    "PRESETS",
    "SENSORY",
    "STRICT",
    "ClampResult",
    "EnumerationCapError",
    "ExperimentConfig",
    "FlowInfo",
    "GeneratorParams",
    "MarginalAccumulator",
    "MoveProposal",
    "Network",
    "NetworkError",
    "Report",
    "StrategySpec",
    "TestCase",
    "TransitionMatrix",
    "build_network",
    "clamp_pass",
    "classify_flow",
    "conditional_prob",
    "d_separated",
    "derive_seed",
    "error_count",
    "estimate_marginals",
    "evidential_children",
    "exact_posteriors",
    "explicit_transition_matrix",
    "full_blanket_flow",
    "generate_cases",
    "generate_network",
    "initialize_state",
    "joint_log_prob",
    "load_config",
    "markov_blanket",
    "metropolis_accept",
    "no_clamp",
    "noisy_or_prob",
    "parse_evidence",
    "parse_network",
    "prior_marginals_forward",
    "render_table",
    "run_chain",
    "run_experiment",
    "sample_posteriors",
    "serialize_network",
    "transition_distribution",
    "validate",
]
