"""Seeded, reproducible generation of Markov chain ensembles.

Every chain draws its randomness from a child stream spawned off the
ensemble's master seed with the chain index as the spawn key (a splittable
counter-based scheme: Philox generators keyed by ``SeedSequence``), so the
simulated data matrix is bit-identical no matter how rows are scheduled.
Each transition consumes exactly one uniform draw, inverted through the
row's cumulative distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DomainError,
    Trajectories,
    as_distribution,
    as_stochastic_matrix,
)

CORRUPTION_MODES = ("constant", "adversarial-cycle", "iid-uniform")


@dataclass(frozen=True)
class ChainSpec:
    """One chain: a transition matrix and an initial distribution."""

    transition: np.ndarray
    initial: np.ndarray

    def __post_init__(self):
        p = as_stochastic_matrix(self.transition)
        mu = as_distribution(self.initial)
        if mu.shape[0] != p.shape[0]:
            raise DomainError("initial distribution does not match matrix size")
        object.__setattr__(self, "transition", p)
        object.__setattr__(self, "initial", mu)


@dataclass(frozen=True)
class EnsembleSpec:
    """A simulation request: chains, a shared horizon, and a master seed."""

    chains: tuple[ChainSpec, ...]
    horizon: int
    master_seed: int

    def __post_init__(self):
        chains = tuple(self.chains)
        if not chains:
            raise DomainError("ensemble needs at least one chain")
        n = chains[0].transition.shape[0]
        if any(c.transition.shape[0] != n for c in chains):
            raise DomainError("all chains must share one state space")
        if self.horizon < 1:
            raise DomainError("horizon must be >= 1")
        object.__setattr__(self, "chains", chains)

    @property
    def n_states(self) -> int:
        return self.chains[0].transition.shape[0]

    @property
    def n_chains(self) -> int:
        return len(self.chains)

    @classmethod
    def homogeneous(cls, transition, initial, n_chains, horizon, master_seed):
        """All chains identical; the shared arrays are stored once."""
        spec = ChainSpec(transition, initial)
        return cls((spec,) * int(n_chains), horizon, master_seed)


def lazy_cycle(size: int, gamma: float) -> np.ndarray:
    """Lazy random walk on a cycle: stay with probability ``1 - gamma``,
    move to either neighbour with probability ``gamma / 2``.

    For ``size == 2`` both neighbour moves land on the other vertex, giving
    the two-state chain with flip probability ``gamma``.
    """
    if size < 2:
        raise DomainError("cycle needs at least 2 vertices")
    if not 0.0 < gamma < 1.0:
        raise DomainError("gamma must lie in (0, 1)")
    p = np.zeros((size, size))
    idx = np.arange(size)
    p[idx, idx] = 1.0 - gamma
    np.add.at(p, (idx, (idx + 1) % size), gamma / 2.0)
    np.add.at(p, (idx, (idx - 1) % size), gamma / 2.0)
    return as_stochastic_matrix(p)


def complete_graph_pair(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric random walks on the complete graph with ``n`` vertices.

    Returns ``(P, P_m)`` where ``P`` allows self-loops (every entry 1/n)
    and ``P_m`` forbids them (off-diagonal entries 1/(n-1)).  Both have the
    uniform stationary distribution and ``||P_m - P||_inf == 2/n``.
    """
    if n < 3:
        raise DomainError("complete-graph pair needs n >= 3")
    p = np.full((n, n), 1.0 / n)
    pm = (np.ones((n, n)) - np.eye(n)) / (n - 1)
    return as_stochastic_matrix(p), as_stochastic_matrix(pm)


def perturb_uniform(P, eps: float, seed) -> np.ndarray:
    """Add i.i.d. uniform noise in ``(-eps, eps)`` to every entry, truncate
    negatives to zero, and renormalize rows.

    Noise is drawn entry by entry in row-major order from the given seed,
    so outputs are reproducible.  A row whose truncated sum is zero (only
    possible for large ``eps``) falls back to the uniform row, mirroring
    the unvisited-state convention of the empirical estimator.
    """
    P = as_stochastic_matrix(P)
    if eps < 0:
        raise DomainError("eps must be >= 0")
    if eps == 0:
        return P
    rng = np.random.default_rng(seed)
    noisy = np.clip(P + rng.uniform(-eps, eps, size=P.shape), 0.0, None)
    sums = noisy.sum(axis=1)
    dead = sums <= 0
    if np.any(dead):
        noisy[dead] = 1.0
        sums[dead] = P.shape[0]
    return as_stochastic_matrix(noisy / sums[:, None])


def _chain_rng(master_seed: int, row: int) -> np.random.Generator:
    seq = np.random.SeedSequence(master_seed, spawn_key=(row,))
    return np.random.Generator(np.random.Philox(seq))


def _invert_cdf_scalar(cdf_row: np.ndarray, u: float, n: int) -> int:
    # Number of cdf entries <= u, clipped to a valid state index.
    return min(int(np.searchsorted(cdf_row, u, side="right")), n - 1)


def _simulate_rows_individually(spec: EnsembleSpec, uniforms: np.ndarray) -> np.ndarray:
    n = spec.n_states
    t = spec.horizon
    states = np.empty((spec.n_chains, t + 1), dtype=np.int64)
    for m, chain in enumerate(spec.chains):
        cdf = np.cumsum(chain.transition, axis=1)
        mu_cdf = np.cumsum(chain.initial)
        u = uniforms[m]
        x = _invert_cdf_scalar(mu_cdf, u[0], n)
        states[m, 0] = x
        for step in range(1, t + 1):
            x = _invert_cdf_scalar(cdf[x], u[step], n)
            states[m, step] = x
    return states


def _simulate_rows_lockstep(spec: EnsembleSpec, uniforms: np.ndarray) -> np.ndarray:
    # All chains share one transition matrix: advance the whole ensemble one
    # time step at a time.  Consumes exactly the same per-row uniforms as the
    # row-by-row path, so both strategies produce identical output.
    n = spec.n_states
    t = spec.horizon
    m = spec.n_chains
    cdf = np.cumsum(spec.chains[0].transition, axis=1)
    states = np.empty((m, t + 1), dtype=np.int64)
    for row, chain in enumerate(spec.chains):
        mu_cdf = np.cumsum(chain.initial)
        states[row, 0] = _invert_cdf_scalar(mu_cdf, uniforms[row, 0], n)
    x = states[:, 0].copy()
    for step in range(1, t + 1):
        counts = (cdf[x] <= uniforms[:, step, None]).sum(axis=1)
        x = np.minimum(counts, n - 1)
        states[:, step] = x
    return states


def simulate_ensemble(spec: EnsembleSpec) -> Trajectories:
    """Sample the data matrix: row ``m`` starts from ``initial`` and then
    follows ``transition`` of chain ``m``; rows are mutually independent.

    Output is a deterministic function of the spec alone.  When every chain
    shares the same transition-matrix object, rows advance in lockstep
    (vectorised over chains); otherwise rows are simulated one at a time.
    Both paths draw identical per-row uniform streams and therefore agree
    bit for bit.
    """
    uniforms = np.empty((spec.n_chains, spec.horizon + 1))
    for m in range(spec.n_chains):
        uniforms[m] = _chain_rng(spec.master_seed, m).random(spec.horizon + 1)
    first = spec.chains[0].transition
    shared = all(c.transition is first for c in spec.chains)
    if shared and spec.n_chains >= 2:
        states = _simulate_rows_lockstep(spec, uniforms)
    else:
        states = _simulate_rows_individually(spec, uniforms)
    return Trajectories(states, spec.n_states)


def inject_corrupted_rows(
    data: Trajectories,
    m1: int,
    mode: str,
    seed,
    constant_state: int = 0,
) -> tuple[Trajectories, np.ndarray]:
    """Replace ``m1`` rows (chosen by a seeded draw without replacement)
    with non-Markov content.

    Modes: ``constant`` fills rows with ``constant_state``;
    ``adversarial-cycle`` sweeps 0, 1, 2, ... modulo the state count;
    ``iid-uniform`` draws states independently and uniformly.

    Returns the modified data and the sorted array of corrupted row indices.
    """
    if mode not in CORRUPTION_MODES:
        raise DomainError(f"unknown corruption mode {mode!r}")
    if not 0 <= m1 <= data.n_chains:
        raise DomainError("corrupted row count must lie in [0, n_chains]")
    if not 0 <= constant_state < data.n_states:
        raise DomainError("constant_state out of range")
    if m1 == 0:
        return data, np.zeros(0, dtype=np.int64)
    rng = np.random.default_rng(seed)
    rows = np.sort(rng.choice(data.n_chains, size=m1, replace=False)).astype(np.int64)
    states = data.states.copy()
    width = data.horizon + 1
    if mode == "constant":
        states[rows] = constant_state
    elif mode == "adversarial-cycle":
        states[rows] = np.arange(width, dtype=np.int64) % data.n_states
    else:
        states[rows] = rng.integers(0, data.n_states, size=(m1, width), dtype=np.int64)
    return Trajectories(states, data.n_states), rows
