"""Decision-network learning simulator: exact inference plus the learner/expert loop."""

from dnlearn._core import (
    DecisionNetwork,
    ExperimentConfig,
    VariableKind,
    barley_initial_model,
    barley_network,
    dn_best_network,
    dn_worst_network,
    expected_utility,
    generate_random_dn,
    load_dn,
    marginal,
    metrics_csv,
    optimal_action,
    run_simulation,
    save_dn,
    validate,
)

__all__ = [
    "DecisionNetwork",
    "ExperimentConfig",
    "VariableKind",
    "barley_initial_model",
    "barley_network",
    "dn_best_network",
    "dn_worst_network",
    "expected_utility",
    "generate_random_dn",
    "load_dn",
    "marginal",
    "metrics_csv",
    "optimal_action",
    "run_simulation",
    "save_dn",
    "validate",
]
