"""Estimation of Markov chain transition matrices from ensembles of sample
paths, with spectral/mixing diagnostics, nonasymptotic error-bound
evaluators, a seeded ensemble simulator, and an experiment harness."""

__version__ = "0.1.0"

from .core import (
    DimensionError,
    DomainError,
    Trajectories,
    as_distribution,
    as_stochastic_matrix,
    is_irreducible,
    is_irreducible_aperiodic,
    normalized_distribution,
    normalized_stochastic_matrix,
    sup_norm_matrix,
    sup_norm_vector,
)
from .estimate import MarkovEnsembleEstimator

__all__ = [
    "DimensionError",
    "DomainError",
    "MarkovEnsembleEstimator",
    "Trajectories",
    "as_distribution",
    "as_stochastic_matrix",
    "is_irreducible",
    "is_irreducible_aperiodic",
    "normalized_distribution",
    "normalized_stochastic_matrix",
    "sup_norm_matrix",
    "sup_norm_vector",
    "__version__",
]
