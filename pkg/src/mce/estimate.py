"""Empirical estimators for ensembles of sample paths.

The counting layer aggregates state and transition counts over all chains
and time steps; the estimators divide counts, with unvisited states mapped
to the uniform row.  A scikit-learn compatible estimator class wraps the
same core so the fit surface composes with the wider ecosystem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .core import (
    DimensionError,
    DomainError,
    Trajectories,
    as_distribution,
    as_stochastic_matrix,
)


@dataclass(frozen=True)
class CountTables:
    """State and transition counts of a data matrix.

    ``state_counts[i]`` is the number of departures from state ``i``
    (time steps ``0 .. horizon-1``), ``transition_counts[i, j]`` the number
    of observed ``i -> j`` transitions, and ``per_chain_state[m, i]`` the
    per-chain departure counts.  All counters are 64-bit: total counts up
    to ``n_chains * horizon ~ 1e10`` stay exact.
    """

    state_counts: np.ndarray
    transition_counts: np.ndarray
    per_chain_state: np.ndarray
    n_chains: int
    horizon: int

    @property
    def n_states(self) -> int:
        return self.state_counts.shape[0]

    @property
    def total(self) -> int:
        return self.n_chains * self.horizon


def count(data: Trajectories) -> CountTables:
    """Aggregate counts over every chain and time step."""
    n = data.n_states
    m = data.n_chains
    t = data.horizon
    src = data.states[:, :-1]
    dst = data.states[:, 1:]
    transition = np.bincount(
        (src * n + dst).ravel(), minlength=n * n
    ).reshape(n, n).astype(np.int64)
    chain_index = np.repeat(np.arange(m, dtype=np.int64), t)
    per_chain = np.bincount(
        chain_index * n + src.ravel(), minlength=m * n
    ).reshape(m, n).astype(np.int64)
    return CountTables(per_chain.sum(axis=0), transition, per_chain, m, t)


def merge_counts(a: CountTables, b: CountTables) -> CountTables:
    """Counts of the row-wise concatenation of two batches (equal horizons)."""
    if a.n_states != b.n_states or a.horizon != b.horizon:
        raise DimensionError("batches must share state space and horizon")
    return CountTables(
        a.state_counts + b.state_counts,
        a.transition_counts + b.transition_counts,
        np.vstack([a.per_chain_state, b.per_chain_state]),
        a.n_chains + b.n_chains,
        a.horizon,
    )


def per_chain_transition_counts(data: Trajectories) -> np.ndarray:
    """Per-chain transition counts, shape (n_chains, n, n).

    Materialized on request only; the (n_chains, n^2) footprint is the
    reason this is not part of :class:`CountTables`.
    """
    n = data.n_states
    m = data.n_chains
    src = data.states[:, :-1]
    dst = data.states[:, 1:]
    chain_index = np.repeat(np.arange(m, dtype=np.int64), data.horizon)
    flat = chain_index * n * n + (src * n + dst).ravel()
    return np.bincount(flat, minlength=m * n * n).reshape(m, n, n).astype(np.int64)


def empirical_transition_matrix(counts: CountTables) -> np.ndarray:
    """Transition-count ratios; rows of unvisited states are uniform."""
    n = counts.n_states
    visited = counts.state_counts > 0
    p_hat = np.full((n, n), 1.0 / n)
    p_hat[visited] = (
        counts.transition_counts[visited] / counts.state_counts[visited, None]
    )
    return as_stochastic_matrix(p_hat)


def empirical_distribution(counts: CountTables) -> np.ndarray:
    """Occupancy frequencies ``state_counts / (n_chains * horizon)``."""
    return as_distribution(counts.state_counts / counts.total)


def mean_transition_matrix(counts: CountTables, chain_matrices) -> np.ndarray:
    """Visit-weighted mixture of the per-chain transition rows.

    Row ``i`` is ``sum_m (N_{m,i} / N_i) P_m[i, :]`` when state ``i`` was
    visited, and uniform otherwise.  This is the centering object around
    which the empirical transition matrix concentrates when chains are
    heterogeneous.
    """
    mats = [as_stochastic_matrix(p) for p in chain_matrices]
    if len(mats) != counts.n_chains:
        raise DimensionError("need one matrix per chain")
    n = counts.n_states
    if any(p.shape[0] != n for p in mats):
        raise DimensionError("chain matrices must match the state space")
    acc = np.zeros((n, n))
    for m, p in enumerate(mats):
        acc += counts.per_chain_state[m][:, None] * p
    visited = counts.state_counts > 0
    out = np.full((n, n), 1.0 / n)
    out[visited] = acc[visited] / counts.state_counts[visited, None]
    return as_stochastic_matrix(out)


@dataclass(frozen=True)
class SplitEstimates:
    """Estimates from the full data and from the uncorrupted rows only."""

    p_hat: np.ndarray
    pi_hat: np.ndarray
    p_hat_clean: np.ndarray
    pi_hat_clean: np.ndarray
    counts: CountTables
    counts_clean: CountTables | None


def split_estimate(data: Trajectories, corrupted_indices) -> SplitEstimates:
    """Full-data estimators alongside oracle estimators that exclude the
    given corrupted rows.

    With every row corrupted the clean tables are empty, so the clean
    transition matrix is all-uniform and the clean occupancy estimate
    falls back to uniform as well.
    """
    corrupted = np.asarray(corrupted_indices, dtype=np.int64).reshape(-1)
    if corrupted.size and (
        corrupted.min() < 0 or corrupted.max() >= data.n_chains
    ):
        raise DomainError("corrupted index out of range")
    if np.unique(corrupted).size != corrupted.size:
        raise DomainError("corrupted indices must be distinct")
    full = count(data)
    p_hat = empirical_transition_matrix(full)
    pi_hat = empirical_distribution(full)
    mask = np.ones(data.n_chains, dtype=bool)
    mask[corrupted] = False
    n = data.n_states
    if mask.any():
        clean = count(Trajectories(data.states[mask], n))
        p0 = empirical_transition_matrix(clean)
        pi0 = empirical_distribution(clean)
    else:
        clean = None
        p0 = as_stochastic_matrix(np.full((n, n), 1.0 / n))
        pi0 = as_distribution(np.full(n, 1.0 / n))
    return SplitEstimates(p_hat, pi_hat, p0, pi0, full, clean)


def _validate_paths(X, n_states: int | None) -> Trajectories:
    if isinstance(X, Trajectories):
        if n_states is not None and n_states != X.n_states:
            raise DomainError("n_states disagrees with the input data")
        return X
    arr = np.asarray(X)
    if n_states is None:
        if arr.size == 0:
            raise DomainError("cannot infer n_states from empty data")
        n_states = int(arr.max()) + 1
    return Trajectories(arr, n_states)


class MarkovEnsembleEstimator(BaseEstimator):
    """Empirical transition-matrix estimator with a scikit-learn interface.

    Parameters
    ----------
    n_states : int or None, default=None
        Size of the state space.  When None it is inferred from the fitted
        data as ``max(X) + 1``.

    Attributes
    ----------
    n_states_ : int
    counts_ : CountTables
    transition_matrix_ : ndarray of shape (n_states, n_states)
        Empirical transition matrix (uniform rows for unvisited states).
    stationary_dist_ : ndarray of shape (n_states,)
        Empirical occupancy distribution, the plug-in estimate of the
        stationary law.

    Examples
    --------
    >>> import numpy as np
    >>> est = MarkovEnsembleEstimator().fit(np.array([[0, 1, 0, 1, 0]]))
    >>> est.transition_matrix_
    array([[0., 1.],
           [1., 0.]])
    """

    def __init__(self, n_states: int | None = None):
        self.n_states = n_states

    def fit(self, X, y=None):
        """Fit from a data matrix of shape (n_chains, horizon + 1)."""
        data = _validate_paths(X, self.n_states)
        self.n_states_ = data.n_states
        self.counts_ = count(data)
        self.transition_matrix_ = empirical_transition_matrix(self.counts_)
        self.stationary_dist_ = empirical_distribution(self.counts_)
        return self

    def score(self, X, y=None) -> float:
        """Mean log-likelihood per transition under the fitted matrix.

        Returns ``-inf`` when ``X`` contains a transition the fitted matrix
        assigns probability zero.
        """
        data = _validate_paths(X, getattr(self, "n_states_", self.n_states))
        probs = self.transition_matrix_[data.states[:, :-1], data.states[:, 1:]]
        if np.any(probs <= 0):
            return float("-inf")
        return float(np.log(probs).mean())
