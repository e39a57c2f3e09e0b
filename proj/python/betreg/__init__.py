"""Regression toolkit for [0,1]-valued labels.

Squared-loss and log-loss ERM over finite hypothesis classes, the betting-loss
min-max estimator, explicit-constant generalization bound calculators, and a
seeded synthetic-instance lab. Everything heavy lives in the C++ extension;
this package just re-exports it.
"""

from betreg._core import (  # noqa: F401
    Bernoulli,
    BettingGrid,
    DataPoint,
    Dataset,
    Deterministic,
    FiniteSupport,
    FitReport,
    HypothesisClass,
    InnerMaxResult,
    InnerWitness,
    Linear,
    PopulationQuantities,
    SyntheticInstance,
    Tabulated,
    ThreePoint,
    bernoulli_variance_bound,
    betting_H,
    betting_term,
    build_grid,
    clip,
    conditional_variance,
    evaluate,
    evaluate_on_support,
    first_order_bound,
    fit_betting,
    fit_log,
    fit_squared,
    gap_example,
    inner_max,
    label_mean,
    linear_bound,
    linear_cover,
    linear_cover_capped,
    load_class_file,
    load_dataset_csv,
    load_instance_file,
    log_loss,
    make_instance,
    oracle_inner_max,
    population_quantities,
    replication_seed,
    run_experiment_json,
    run_verify_json,
    sample_dataset,
    save_class_file,
    save_dataset_csv,
    save_instance_file,
    second_order_bound,
    squared_loss,
    support_distribution,
)

__version__ = "0.1.0"
