"""Competitive influence maximization: cascade simulation, offline seed
oracles, and online bandit policies with a regret-accounting harness."""

from .diffusion import (
    Action,
    CapacityError,
    PropagationOutcome,
    TieRule,
    estimate_spread,
    estimate_trigger_prob,
    exact_spread,
    exact_trigger_probs,
    propagate,
    sample_live_edges,
)
from .graph import (
    Graph,
    assign_weighted_cascade,
    constant_probs,
    dumps_edge_list,
    load_edge_list,
    max_reach,
    reachable_edges_from,
)
from .oracles import (
    OracleResult,
    exhaustive_seed_select,
    greedy_seed_select,
    ofu_auto,
    ofu_bipartite,
    ofu_boundary_enum,
    ofu_general_heuristic,
)
from .bandits import (
    CUCBPolicy,
    EpsilonGreedyPolicy,
    ETCPolicy,
    OFUPolicy,
    OraclePolicy,
    ThompsonSamplingPolicy,
    confidence_radius,
    etc_choose_n,
    etc_schedule,
)
from .harness import (
    CompetitorSpec,
    ExperimentConfig,
    RegretTrace,
    aggregate_traces,
    baseline_opt,
    bayesian_sweep,
    load_config,
    read_trace,
    run_experiment,
    write_trace,
    write_traces,
)

__version__ = "0.1.0"
