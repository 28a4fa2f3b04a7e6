"""Moran's I and Phi autocorrelation tests on networks, with the simulation studies built on them."""

from ._core import (
    DegenerateData,
    Error,
    InvalidInput,
    IoError,
    WeightMatrix,
    binary_equivalence,
    categorize,
    correlated_error,
    default_config,
    join_counts,
    joincount_tests,
    moran_moments,
    moran_test,
    morans_i,
    neighbor_matrix,
    network,
    phi,
    phi_moments,
    phi_test,
    run_experiment,
    sar,
    transmit_categorical,
    transmit_continuous,
)

__all__ = [
    "DegenerateData",
    "Error",
    "InvalidInput",
    "IoError",
    "WeightMatrix",
    "binary_equivalence",
    "categorize",
    "correlated_error",
    "default_config",
    "join_counts",
    "joincount_tests",
    "moran_moments",
    "moran_test",
    "morans_i",
    "neighbor_matrix",
    "network",
    "phi",
    "phi_moments",
    "phi_test",
    "run_experiment",
    "sar",
    "transmit_categorical",
    "transmit_continuous",
]
