"""Genetic clustered federated learning simulator (C++ core)."""

from gencfl._core import (  # noqa: F401
    ClusterAssignment,
    ConfigError,
    DataError,
    Dataset,
    DbscanParams,
    EngineError,
    HpBounds,
    HyperParams,
    ModelArch,
    ModelWeights,
    Population,
    TrainReport,
    __version__,
    aggregate,
    clamp,
    dbscan,
    distance,
    distance_lr_only,
    evaluate,
    evolve,
    example_config_text,
    init_weights,
    load_idx,
    mutate,
    partition_non_iid,
    run_experiment,
    sample_hp,
    train,
)
