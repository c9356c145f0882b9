"""Heterogeneity metrics, Renyi divergences, and nonasymptotic bound
evaluators for ensemble estimation of a Markov chain transition matrix.

Three layers live here:

* tail bounds for ensemble-time averages, state visit frequencies, and
  rowwise transition frequencies (Bernstein-type, with the explicit
  constants of the underlying concentration results);
* high-probability error bounds for the empirical transition matrix and
  occupancy distribution, including the variant that tolerates fully
  corrupted rows;
* margin-based consistency condition checkers for large-scale regimes.

All logarithms are natural.  Probability bounds are clamped to [0, 1] on
output and carry the raw exponent, since the unclamped expressions can
exceed 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    DimensionError,
    DomainError,
    as_distribution,
    as_stochastic_matrix,
    sup_norm_matrix,
    sup_norm_vector,
)
from .spectral import effective_time, pseudo_spectral_gap, stationary_distribution

# L1 residual allowed when validating a supplied stationary vector.
_STATIONARITY_ATOL = 1e-8


@dataclass(frozen=True)
class BoundConstants:
    """Admissible constants of the error bounds, named by role.

    ``moment`` scales the sampling (square-root) term, ``bias`` the
    heterogeneity term, ``corruption`` the corrupted-row term, ``sample``
    the effective-sample-size conditions, and ``stationary`` the occupancy
    bound.  Defaults are the explicit admissible values: (7, 2, 144) for
    the transition bound, sqrt(56) for the occupancy bound, and
    (7, 2, 4, 144) for the corrupted-row bound.
    """

    moment: float = 7.0
    bias: float = 2.0
    corruption: float = 4.0
    sample: float = 144.0
    stationary: float = math.sqrt(56.0)

    def __post_init__(self):
        for name in ("moment", "bias", "corruption", "sample", "stationary"):
            if getattr(self, name) <= 0:
                raise DomainError(f"constant {name!r} must be positive")


DEFAULT_CONSTANTS = BoundConstants()


@dataclass(frozen=True)
class ChainInfo:
    """Describes one chain of an ensemble for metric computation.

    ``stationary`` and ``gamma`` (the pseudo-spectral gap) are computed
    from ``transition`` when omitted.  ``initial=None`` declares a
    stationary start, whose divergence contribution is exactly zero.
    """

    transition: np.ndarray
    stationary: np.ndarray | None = None
    initial: np.ndarray | None = None
    gamma: float | None = None


@dataclass(frozen=True)
class HeterogeneityMetrics:
    """Deviation and mixing summary of an ensemble against a target matrix."""

    delta1: float
    delta_inf: float
    pi_bar: np.ndarray
    pi_bar_min: float
    eta: float
    gamma_min: float
    t_prime: float


def renyi_divergence(p, q, alpha: float) -> float:
    """Renyi divergence of order ``alpha > 1``:
    ``(alpha - 1)^-1 log sum_i p_i^alpha q_i^(1 - alpha)``.

    Returns ``inf`` when ``p`` puts mass where ``q`` does not.
    """
    if alpha <= 1:
        raise DomainError("Renyi order must satisfy alpha > 1")
    p = as_distribution(p)
    q = as_distribution(q)
    if p.shape != q.shape:
        raise DimensionError("distributions must have equal length")
    support = p > 0
    if np.any(q[support] == 0):
        return float("inf")
    total = float(np.sum(p[support] ** alpha * q[support] ** (1.0 - alpha)))
    return math.log(total) / (alpha - 1.0)


def heterogeneity_metrics(
    target, chains: Sequence[ChainInfo], horizon: int
) -> HeterogeneityMetrics:
    """Compute the deviation metrics of an ensemble from a target matrix.

    ``delta1``/``delta_inf`` are the mean and max sup-norm distances of the
    chain matrices from ``target``; ``pi_bar`` is the average of the chain
    stationary laws; ``eta`` the average order-2 Renyi divergence of the
    initial laws from the stationary laws; ``gamma_min`` the smallest
    pseudo-spectral gap; and ``t_prime`` the effective horizon.

    Raises
    ------
    DomainError
        If a supplied stationary vector fails ``||pi P - pi||_1 <= 1e-8``.
    """
    target = as_stochastic_matrix(target)
    n = target.shape[0]
    if not chains:
        raise DomainError("need at least one chain")
    deviations = []
    stationaries = []
    etas = []
    gammas = []
    for info in chains:
        p_m = as_stochastic_matrix(info.transition)
        if p_m.shape[0] != n:
            raise DimensionError("chain matrix does not match the target size")
        if info.stationary is None:
            pi_m = stationary_distribution(p_m)
        else:
            pi_m = as_distribution(info.stationary)
            if float(np.abs(pi_m @ p_m - pi_m).sum()) > _STATIONARITY_ATOL:
                raise DomainError("supplied vector is not stationary for its chain")
        deviations.append(sup_norm_matrix(p_m, target))
        stationaries.append(pi_m)
        if info.initial is None or np.array_equal(info.initial, pi_m):
            etas.append(0.0)
        else:
            etas.append(renyi_divergence(info.initial, pi_m, 2.0))
        if info.gamma is None:
            gammas.append(pseudo_spectral_gap(p_m)[0])
        else:
            if not 0.0 < info.gamma <= 1.0:
                raise DomainError("gamma must lie in (0, 1]")
            gammas.append(float(info.gamma))
    pi_bar = as_distribution(np.mean(stationaries, axis=0))
    gamma_min = float(min(gammas))
    return HeterogeneityMetrics(
        delta1=float(np.mean(deviations)),
        delta_inf=float(np.max(deviations)),
        pi_bar=pi_bar,
        pi_bar_min=float(pi_bar.min()),
        eta=float(np.mean(etas)),
        gamma_min=gamma_min,
        t_prime=effective_time(gamma_min, horizon),
    )


def clean_metrics(target, n_chains: int, horizon: int, gamma: float | None = None) -> HeterogeneityMetrics:
    """Metrics of a homogeneous stationary-start ensemble: the deviation
    terms vanish and the average stationary law is the target's own."""
    info = ChainInfo(target, gamma=gamma)
    return heterogeneity_metrics(target, [info] * int(n_chains), horizon)


@dataclass(frozen=True)
class TailBound:
    """A clamped probability bound together with its raw exponent."""

    probability: float
    exponent: float


def _bernstein_exponent(
    s: float, n_chains: int, horizon: int, gamma_min: float,
    variance: float, spread: float, eta: float,
) -> float:
    if s <= 0:
        raise DomainError("deviation s must be positive")
    if not 0.0 < gamma_min <= 1.0:
        raise DomainError("gamma_min must lie in (0, 1]")
    if variance < 0 or spread < 0 or eta < 0:
        raise DomainError("variance, spread, and eta must be nonnegative")
    if n_chains < 1 or horizon < 1:
        raise DomainError("need n_chains >= 1 and horizon >= 1")
    denom = 16.0 * (1.0 + 1.0 / (gamma_min * horizon)) * variance + 40.0 * spread * s
    if denom == 0.0:
        return float("-inf")
    rate = gamma_min * n_chains * horizon * s * s / denom
    return -rate + 0.5 * n_chains * eta


def ensemble_bernstein_tail(
    s: float,
    n_chains: int,
    horizon: int,
    gamma_min: float,
    variance: float,
    spread: float,
    eta: float = 0.0,
) -> TailBound:
    """One-sided tail bound for a centered ensemble-time average.

    ``variance`` is the chain-averaged stationary variance of the summands
    and ``spread`` their largest centered absolute value.  The bound is
    ``exp(-g M T s^2 / (16 (1 + 1/(g T)) V + 40 D s) + M eta / 2)`` with
    ``g = gamma_min``, clamped to 1; with ``V = D = 0`` the average is
    deterministic and the bound collapses to 0 (exponent ``-inf``).
    """
    exponent = _bernstein_exponent(s, n_chains, horizon, gamma_min, variance, spread, eta)
    return TailBound(min(1.0, math.exp(exponent)) if exponent > -math.inf else 0.0, exponent)


def state_frequency_tail(
    s: float,
    pi_bar_i: float,
    n_chains: int,
    horizon: int,
    gamma_min: float,
    eta: float = 0.0,
) -> TailBound:
    """Two-sided tail bound for the visit frequency of one state around its
    ensemble-average stationary probability ``pi_bar_i``.

    Specializes the ensemble Bernstein bound to indicator summands
    (variance at most ``pi_bar_i``, spread at most 1) and doubles it for
    the two-sided event.
    """
    if not 0.0 <= pi_bar_i <= 1.0:
        raise DomainError("pi_bar_i must lie in [0, 1]")
    exponent = _bernstein_exponent(s, n_chains, horizon, gamma_min, pi_bar_i, 1.0, eta)
    return TailBound(min(1.0, 2.0 * math.exp(exponent)), exponent)


def transition_frequency_tail(
    eps: float, s1: float, s2: float, n_states: int
) -> TailBound:
    """Tail bound for the L1 deviation of one empirical transition row from
    the visit-weighted mean row, on the event that the state's visit count
    lies in ``[s1, s2]``.

    The bound is ``(1 + n) exp(-3 eps^2 s1 / (6 sqrt(2) n s2/s1
    + 2 sqrt(2) sqrt(n) eps))``, clamped to 1.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    if s1 <= 0 or s1 > s2:
        raise DomainError("need 0 < s1 <= s2")
    if n_states < 1:
        raise DomainError("n_states must be >= 1")
    root2 = math.sqrt(2.0)
    denom = 6.0 * root2 * n_states * (s2 / s1) + 2.0 * root2 * math.sqrt(n_states) * eps
    exponent = -3.0 * eps * eps * s1 / denom
    return TailBound(min(1.0, (1.0 + n_states) * math.exp(exponent)), exponent)


@dataclass(frozen=True)
class ConditionedBound:
    """An error bound plus the effective-sample-size condition it needs."""

    bound: float
    condition_met: bool
    condition_lhs: float
    condition_rhs: float


def _check_conf(eps_conf: float) -> None:
    if not 0.0 < eps_conf <= 1.0:
        raise DomainError("confidence level eps must lie in (0, 1]")


def thm_transition_bound(
    metrics: HeterogeneityMetrics,
    n_chains: int,
    horizon: int,
    n_states: int,
    eps_conf: float,
    consts: BoundConstants = DEFAULT_CONSTANTS,
) -> ConditionedBound:
    """High-probability sup-norm error bound for the empirical transition
    matrix of a heterogeneous ensemble.

    With probability at least ``1 - eps_conf`` (when the reported condition
    holds) the error is at most
    ``C1 sqrt(n log(4n/eps) / (pi_bar_min M T))
    + C2 min(delta1 / pi_bar_min, delta_inf)``;
    the condition is ``M T' >= C3 (log(4n/eps) + M eta) / pi_bar_min``.
    """
    _check_conf(eps_conf)
    if metrics.pi_bar_min <= 0:
        raise DomainError("pi_bar_min must be positive")
    log_term = math.log(4.0 * n_states / eps_conf)
    sampling = consts.moment * math.sqrt(
        n_states * log_term / (metrics.pi_bar_min * n_chains * horizon)
    )
    bias = consts.bias * min(metrics.delta1 / metrics.pi_bar_min, metrics.delta_inf)
    lhs = n_chains * metrics.t_prime
    rhs = consts.sample * (log_term + n_chains * metrics.eta) / metrics.pi_bar_min
    return ConditionedBound(sampling + bias, lhs >= rhs, lhs, rhs)


def thm_stationary_bound(
    metrics: HeterogeneityMetrics,
    n_chains: int,
    n_states: int,
    eps_conf: float,
    consts: BoundConstants = DEFAULT_CONSTANTS,
    target_stationary=None,
) -> float:
    """High-probability sup-norm error bound for the occupancy estimate
    around the ensemble-average stationary law:
    ``C sqrt((log(2n/eps) + M eta) / (M T'))`` with ``C = sqrt(56)``.

    When ``target_stationary`` is given, the triangle-inequality extension
    toward that target adds ``||pi_bar - target||_inf``.  Values above 1
    are vacuous (sup-norm distances of distributions never exceed 1) and
    are returned unclamped.
    """
    _check_conf(eps_conf)
    log_term = math.log(2.0 * n_states / eps_conf)
    value = consts.stationary * math.sqrt(
        (log_term + n_chains * metrics.eta) / (n_chains * metrics.t_prime)
    )
    if target_stationary is not None:
        value += sup_norm_vector(metrics.pi_bar, as_distribution(target_stationary))
    return value


@dataclass(frozen=True)
class CorruptionProfile:
    """Ensemble with ``m0`` genuine rows and ``m1`` fully corrupted rows;
    ``metrics0`` summarizes the genuine rows only."""

    m0: int
    m1: int
    metrics0: HeterogeneityMetrics

    def __post_init__(self):
        if self.m0 < 0 or self.m1 < 0:
            raise DomainError("row counts must be nonnegative")

    @property
    def n_chains(self) -> int:
        return self.m0 + self.m1


def thm_corrupted_bound(
    profile: CorruptionProfile,
    horizon: int,
    n_states: int,
    eps_conf: float,
    consts: BoundConstants = DEFAULT_CONSTANTS,
) -> ConditionedBound:
    """Transition-matrix error bound when ``m1`` of the rows are arbitrary.

    Adds the corruption term ``C3 (m1/M) / pi_bar_min^(0)`` to the clean
    bound evaluated with ``log(8n/eps)`` over the ``m0`` genuine rows; the
    condition strengthens to ``m0 T' >= C4 (log(8n/eps) + m0 eta^(0))
    / (pi_bar_min^(0))^2``.
    """
    _check_conf(eps_conf)
    if profile.m0 < 1:
        raise DomainError("need at least one uncorrupted row")
    metrics = profile.metrics0
    if metrics.pi_bar_min <= 0:
        raise DomainError("pi_bar_min must be positive")
    log_term = math.log(8.0 * n_states / eps_conf)
    sampling = consts.moment * math.sqrt(
        n_states * log_term / (metrics.pi_bar_min * profile.m0 * horizon)
    )
    bias = consts.bias * min(metrics.delta1 / metrics.pi_bar_min, metrics.delta_inf)
    corruption = (
        consts.corruption * (profile.m1 / profile.n_chains) / metrics.pi_bar_min
    )
    lhs = profile.m0 * metrics.t_prime
    rhs = (
        consts.sample
        * (log_term + profile.m0 * metrics.eta)
        / metrics.pi_bar_min**2
    )
    return ConditionedBound(sampling + bias + corruption, lhs >= rhs, lhs, rhs)


@dataclass(frozen=True)
class ConditionCheck:
    """One margin-operationalized asymptotic condition.

    For "much larger" conditions ``value`` is the ratio lhs/rhs and passes
    when it is at least ``threshold``; for "much smaller" conditions
    ``value`` is the small quantity itself and passes when it is at most
    ``threshold``.
    """

    name: str
    value: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class ConsistencyReport:
    checks: tuple[ConditionCheck, ...]

    @property
    def transition_consistent(self) -> bool:
        return all(c.passed for c in self.checks if c.name.startswith("transition"))

    @property
    def stationary_consistent(self) -> bool:
        return all(c.passed for c in self.checks if c.name.startswith("occupancy"))


def consistency_check(
    metrics: HeterogeneityMetrics,
    n_chains: int,
    n_states: int,
    margin: float = 10.0,
    target_stationary=None,
) -> ConsistencyReport:
    """Margin-based reading of the consistency conditions.

    An asymptotic "a much larger than b" is interpreted as ``a/b >= margin``
    and "much smaller than 1" as ``<= 1/margin``.  Reports the three
    transition-consistency ratios and the two occupancy-consistency ratios;
    passing ``target_stationary`` appends the bias condition
    ``||pi_bar - target||_inf`` small.  No probability claim is attached.
    """
    if margin <= 1:
        raise DomainError("margin must exceed 1")
    mtp = n_chains * metrics.t_prime
    small = 1.0 / margin

    def much_larger(name, lhs, rhs):
        value = float("inf") if rhs == 0 else lhs / rhs
        return ConditionCheck(name, value, margin, value >= margin)

    def much_smaller(name, value):
        return ConditionCheck(name, value, small, value <= small)

    checks = [
        much_larger(
            "transition sample size",
            mtp,
            n_states * math.log(n_states) / metrics.pi_bar_min,
        ),
        much_larger(
            "transition start bias",
            metrics.t_prime,
            metrics.eta / metrics.pi_bar_min,
        ),
        much_smaller(
            "transition heterogeneity",
            min(metrics.delta1 / metrics.pi_bar_min, metrics.delta_inf),
        ),
        much_larger("occupancy sample size", mtp, math.log(n_states)),
        much_larger("occupancy start bias", metrics.t_prime, metrics.eta),
    ]
    if target_stationary is not None:
        bias = sup_norm_vector(metrics.pi_bar, as_distribution(target_stationary))
        checks.append(much_smaller("occupancy target bias", bias))
    return ConsistencyReport(tuple(checks))


def spectral_norm_lemma_bound(u) -> float:
    """Upper bound ``sum_i u_i^2 (1 - 2 u_i + ||u||^2)`` on the squared
    spectral norm of ``diag(u) - u u^T``; a test-oracle utility."""
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1:
        raise DimensionError("expected a vector")
    norm_sq = float(u @ u)
    return float(np.sum(u * u * (1.0 - 2.0 * u + norm_sq)))
