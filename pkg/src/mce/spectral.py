"""Stationary distributions, time reversal, spectral gaps, and the
effective (mixing-discounted) horizon.

The pseudo-spectral gap extends the reversible spectral gap to
nonreversible chains as ``sup_k gamma_rev(P*^k P^k) / k``; because each
``P*^k P^k`` is reversible with respect to the stationary law and has
spectrum in [0, 1], the supremum can be truncated exactly (see
:func:`pseudo_spectral_gap`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DomainError,
    as_distribution,
    as_stochastic_matrix,
    is_irreducible,
    is_irreducible_aperiodic,
)

# Detailed-balance tolerance when deciding reversibility.
REVERSIBILITY_ATOL = 1e-10
# Residual allowed on ||pi P - pi||_1 for a computed stationary vector.
STATIONARY_RESIDUAL_ATOL = 1e-10
# Largest acceptable asymmetry of the similarity transform after averaging.
_SYMMETRY_ATOL = 1e-8


def stationary_distribution(P) -> np.ndarray:
    """Unique stationary distribution of an irreducible stochastic matrix.

    Solves the overdetermined linear system ``(P^T - I) pi = 0`` with the
    normalization ``sum(pi) = 1`` appended, via least squares.  This direct
    solve is preferred over power iteration because the matrices handled
    here are small enough for dense linear algebra and the result is
    accurate regardless of mixing speed.

    Raises
    ------
    DomainError
        If ``P`` is not irreducible (no unique stationary vector), or the
        solution fails the residual check ``||pi P - pi||_1 <= 1e-10``.
    """
    P = as_stochastic_matrix(P)
    n = P.shape[0]
    if not is_irreducible(P):
        raise DomainError("no unique stationary vector: matrix is not irreducible")
    a = np.vstack([P.T - np.eye(n), np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    pi = pi / pi.sum()
    if float(np.abs(pi @ P - pi).sum()) > STATIONARY_RESIDUAL_ATOL:
        raise DomainError("stationary solve did not converge to tolerance")
    return as_distribution(pi)


def time_reversal(P, pi) -> np.ndarray:
    """Time reversal ``P*[i, j] = pi[j] P[j, i] / pi[i]``.

    ``pi`` must be the stationary distribution of ``P`` with strictly
    positive entries; otherwise the reversed rows do not sum to 1 and
    validation fails.
    """
    P = as_stochastic_matrix(P)
    pi = as_distribution(pi)
    if pi.shape[0] != P.shape[0]:
        raise DomainError("dimension mismatch between matrix and distribution")
    if np.any(pi <= 0):
        raise DomainError("time reversal requires a strictly positive stationary vector")
    return as_stochastic_matrix(pi[None, :] * P.T / pi[:, None])


def is_reversible(P, pi, atol: float = REVERSIBILITY_ATOL) -> bool:
    """Check detailed balance ``pi[i] P[i, j] == pi[j] P[j, i]`` within atol."""
    P = np.asarray(P, dtype=np.float64)
    pi = np.asarray(pi, dtype=np.float64)
    flux = pi[:, None] * P
    return bool(np.abs(flux - flux.T).max() <= atol)


def _symmetrized(P: np.ndarray, pi: np.ndarray) -> np.ndarray:
    # D^{1/2} P D^{-1/2} is symmetric for reversible P; average away the
    # floating-point asymmetry and refuse anything larger.
    root = np.sqrt(pi)
    s = root[:, None] * P / root[None, :]
    asym = float(np.abs(s - s.T).max())
    if asym > _SYMMETRY_ATOL:
        raise DomainError(
            f"similarity transform asymmetric by {asym:.3e}; matrix not reversible"
        )
    return 0.5 * (s + s.T)


def gamma_rev(P, pi) -> float:
    """Spectral gap ``1 - lambda_2`` of a reversible stochastic matrix.

    Eigenvalues are taken from the symmetric similarity transform
    ``D^{1/2} P D^{-1/2}`` with ``D = diag(pi)`` via a full symmetric
    eigendecomposition (no power-method shortcuts).
    """
    P = as_stochastic_matrix(P)
    pi = as_distribution(pi)
    if P.shape[0] < 2:
        raise DomainError("spectral gap needs at least two states")
    if np.any(pi <= 0):
        raise DomainError("stationary vector must be strictly positive")
    if not is_reversible(P, pi):
        raise DomainError("matrix is not reversible w.r.t. the given distribution")
    eigs = np.linalg.eigvalsh(_symmetrized(P, pi))
    return float(1.0 - eigs[-2])


def gamma_abs(P, pi) -> float:
    """Absolute spectral gap ``1 - max(|lambda| : lambda != lambda_1)``.

    Defined here for reversible matrices only, matching how it is used for
    the lazy cycle walk model.
    """
    P = as_stochastic_matrix(P)
    pi = as_distribution(pi)
    if P.shape[0] < 2:
        raise DomainError("spectral gap needs at least two states")
    if not is_reversible(P, pi):
        raise DomainError("absolute spectral gap defined for reversible matrices only")
    eigs = np.linalg.eigvalsh(_symmetrized(P, pi))
    return float(1.0 - max(abs(eigs[0]), abs(eigs[-2])))


def pseudo_spectral_gap(P, max_k: int = 100_000) -> tuple[float, int]:
    """Pseudo-spectral gap ``sup_{k>=1} gamma_rev(P*^k P^k) / k`` and its argmax.

    Each ``P*^k P^k`` is reversible with respect to the stationary law of
    ``P`` and has eigenvalues in [0, 1], so every term with index ``k`` is
    at most ``1/k``.  The scan therefore stops at the first ``k`` with
    ``1/k <= best``, at which point the truncated maximum equals the true
    supremum; this is an exact termination rule, not an approximation.

    Returns
    -------
    (gamma_ps, k_star)
        The gap value and the ``k`` attaining it.
    """
    P = as_stochastic_matrix(P)
    if not is_irreducible_aperiodic(P):
        raise DomainError("pseudo-spectral gap requires an irreducible aperiodic matrix")
    pi = stationary_distribution(P)
    # With A = D^{1/2} P D^{-1/2}, the similarity transform of P*^k P^k is
    # (A^k)^T A^k: symmetric PSD with spectrum in [0, 1].  Accumulating A^k
    # and forming the Gram matrix avoids the row-sum drift that explicit
    # products of P* and P powers build up over long scans.
    root = np.sqrt(pi)
    a = root[:, None] * P / root[None, :]
    a_k = a.copy()
    best = 0.0
    k_star = 0
    k = 1
    while True:
        eigs = np.linalg.eigvalsh(a_k.T @ a_k)
        term = max(0.0, 1.0 - float(eigs[-2])) / k
        if term > best:
            best = term
            k_star = k
        if 1.0 / k <= best:
            return best, k_star
        if k >= max_k:
            raise DomainError(f"pseudo-spectral gap scan exceeded max_k={max_k}")
        a_k = a_k @ a
        k += 1


def effective_time(gamma_min: float, horizon: int) -> float:
    """Mixing-discounted horizon ``g*T / (1 + 1/(g*T))`` for ``g = gamma_min``.

    Always at most ``min(T, g*T)``; ``M * effective_time`` plays the role of
    the number of well-mixed samples in the error bounds.
    """
    if not 0.0 < gamma_min <= 1.0:
        raise DomainError("gamma_min must lie in (0, 1]")
    if horizon < 1:
        raise DomainError("horizon must be >= 1")
    gt = gamma_min * horizon
    return gt / (1.0 + 1.0 / gt)


@dataclass(frozen=True)
class SpectralSummary:
    """Mixing summary of one transition matrix.

    ``gamma_rev``/``gamma_abs`` are None for nonreversible matrices.
    """

    stationary: np.ndarray
    gamma_rev: float | None
    gamma_abs: float | None
    gamma_ps: float
    k_star: int


def spectral_summary(P) -> SpectralSummary:
    P = as_stochastic_matrix(P)
    pi = stationary_distribution(P)
    if is_reversible(P, pi):
        g_rev: float | None = gamma_rev(P, pi)
        g_abs: float | None = gamma_abs(P, pi)
    else:
        g_rev = None
        g_abs = None
    g_ps, k_star = pseudo_spectral_gap(P)
    return SpectralSummary(pi, g_rev, g_abs, g_ps, k_star)
