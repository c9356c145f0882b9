"""Core types and norms for finite-state Markov chain ensembles.

States are dense integer indices ``0 .. n_states-1``.  Stochastic vectors
and matrices are plain float64 numpy arrays, validated on construction and
returned read-only; trajectory ensembles are int64 arrays of shape
``(n_chains, horizon + 1)`` so that column ``t`` holds the states at time
``t``.  All operations here are pure functions on immutable inputs and are
safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Absolute tolerance on row/vector sums when validating stochasticity.
# Constructors never renormalize silently; use the normalized_* helpers
# when renormalization is intended.
STOCHASTIC_ATOL = 1e-12


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class DimensionError(DomainError):
    """Operands have incompatible shapes or sizes."""


def _as_float_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr


def as_distribution(weights) -> np.ndarray:
    """Validate and freeze a stochastic vector.

    Parameters
    ----------
    weights : array_like, shape (n,)
        Nonnegative entries summing to 1 within ``STOCHASTIC_ATOL``.

    Returns
    -------
    ndarray
        Read-only float64 copy.

    Raises
    ------
    DomainError
        If any entry is negative or the sum deviates from 1 by more
        than the tolerance.
    """
    arr = _as_float_array(weights, "distribution")
    if arr.ndim != 1 or arr.size < 1:
        raise DimensionError("distribution must be a nonempty 1-d array")
    if np.any(arr < 0):
        raise DomainError("distribution has negative entries")
    total = float(arr.sum())
    if abs(total - 1.0) > STOCHASTIC_ATOL:
        raise DomainError(
            f"distribution sums to {total!r}, outside tolerance {STOCHASTIC_ATOL}"
        )
    out = arr.copy()
    out.setflags(write=False)
    return out


def normalized_distribution(weights) -> np.ndarray:
    """Explicitly renormalize nonnegative weights into a distribution."""
    arr = _as_float_array(weights, "weights")
    if arr.ndim != 1 or arr.size < 1:
        raise DimensionError("weights must be a nonempty 1-d array")
    if np.any(arr < 0):
        raise DomainError("weights have negative entries")
    total = float(arr.sum())
    if total <= 0:
        raise DomainError("weights sum to zero; cannot normalize")
    return as_distribution(arr / total)


def as_stochastic_matrix(rows) -> np.ndarray:
    """Validate and freeze a row-stochastic square matrix.

    Every entry must be nonnegative and every row must sum to 1 within
    ``STOCHASTIC_ATOL``.  Returns a read-only float64 copy.
    """
    arr = _as_float_array(rows, "matrix")
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if np.any(arr < 0):
        raise DomainError("matrix has negative entries")
    sums = arr.sum(axis=1)
    bad = np.abs(sums - 1.0) > STOCHASTIC_ATOL
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DomainError(
            f"row {i} sums to {sums[i]!r}, outside tolerance {STOCHASTIC_ATOL}"
        )
    out = arr.copy()
    out.setflags(write=False)
    return out


def normalized_stochastic_matrix(rows) -> np.ndarray:
    """Explicitly renormalize nonnegative rows into a stochastic matrix."""
    arr = _as_float_array(rows, "rows")
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if np.any(arr < 0):
        raise DomainError("rows have negative entries")
    sums = arr.sum(axis=1)
    if np.any(sums <= 0):
        raise DomainError("a row sums to zero; cannot normalize")
    return as_stochastic_matrix(arr / sums[:, None])


@dataclass(frozen=True)
class Trajectories:
    """An ensemble of sample paths.

    ``states[m, t]`` is the state of chain ``m`` at time ``t`` for
    ``t = 0 .. horizon``.  Entries must lie in ``[0, n_states)``.
    """

    states: np.ndarray
    n_states: int

    def __post_init__(self):
        arr = np.asarray(self.states)
        if arr.ndim != 2:
            raise DimensionError("states must be a 2-d array")
        if arr.shape[0] < 1 or arr.shape[1] < 2:
            raise DimensionError(
                "need at least one chain and one transition (horizon >= 1)"
            )
        if not np.issubdtype(arr.dtype, np.integer):
            raise DomainError("states must be integers")
        if int(self.n_states) < 1:
            raise DomainError("n_states must be >= 1")
        if arr.size and (arr.min() < 0 or arr.max() >= self.n_states):
            raise DomainError("state index out of range [0, n_states)")
        arr = np.ascontiguousarray(arr, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "states", arr)
        object.__setattr__(self, "n_states", int(self.n_states))

    @property
    def n_chains(self) -> int:
        return self.states.shape[0]

    @property
    def horizon(self) -> int:
        return self.states.shape[1] - 1


def sup_norm_matrix(a, b=None) -> float:
    """Maximum row-sum norm of ``a - b`` (or of ``a`` when ``b`` is None).

    For stochastic matrices this equals twice the largest rowwise total
    variation distance, hence lies in [0, 2].
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionError("expected 2-d arrays")
    if b is not None:
        b = np.asarray(b, dtype=np.float64)
        if a.shape != b.shape:
            raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
        a = a - b
    return float(np.abs(a).sum(axis=1).max())


def sup_norm_vector(a, b=None) -> float:
    """Largest absolute component of ``a - b`` (or of ``a`` when ``b`` is None)."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1:
        raise DimensionError("expected 1-d arrays")
    if b is not None:
        b = np.asarray(b, dtype=np.float64)
        if a.shape != b.shape:
            raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
        a = a - b
    return float(np.abs(a).max())


def _bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Boolean semiring product via float matmul (BLAS) then thresholding.
    return (a.astype(np.float64) @ b.astype(np.float64)) > 0


def is_irreducible(P) -> bool:
    """True iff the support graph of ``P`` is strongly connected."""
    P = np.asarray(P, dtype=np.float64)
    n = P.shape[0]
    if n == 1:
        return True
    # Reachability closure by repeated squaring of (I | support).
    reach = (P > 0) | np.eye(n, dtype=bool)
    steps = 1
    while steps < n:
        reach = _bool_matmul(reach, reach)
        steps *= 2
    return bool(reach.all())


def is_irreducible_aperiodic(P) -> bool:
    """True iff the chain with transition matrix ``P`` is irreducible and aperiodic.

    Uses the primitivity criterion: a stochastic matrix is irreducible and
    aperiodic exactly when some power has all entries positive, and the
    Wielandt exponent ``(n-1)^2 + 1`` bounds the power that must be checked.
    The support of ``P^k`` is advanced by repeated squaring in the boolean
    semiring, and positivity of powers of a stochastic matrix persists once
    attained, so reaching a power at least the Wielandt exponent makes the
    shortcut exact rather than heuristic.
    """
    P = np.asarray(P, dtype=np.float64)
    n = P.shape[0]
    if n == 1:
        return True
    wielandt = (n - 1) ** 2 + 1
    support = P > 0
    k = 1
    while True:
        if support.all():
            return True
        if k >= wielandt:
            return False
        support = _bool_matmul(support, support)
        k *= 2


# ---------------------------------------------------------------------------
# File formats.
#
# Trajectory files: first line "M T S" (chains, horizon, state count), then
# M lines of T+1 space-separated integer states.
#
# Matrix/distribution files: first line "S", then rows of space-separated
# decimals printed with 17 significant digits (lossless float64 round trip).
# ---------------------------------------------------------------------------

_FLOAT_FMT = "{:.17e}"


def write_trajectory_file(path, traj: Trajectories) -> None:
    with open(path, "w") as fh:
        fh.write(f"{traj.n_chains} {traj.horizon} {traj.n_states}\n")
        for row in traj.states:
            fh.write(" ".join(str(int(x)) for x in row) + "\n")


def read_trajectory_file(path) -> Trajectories:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise DomainError("trajectory file must start with 'M T S'")
        m, t, s = (int(x) for x in header)
        rows = []
        for _ in range(m):
            parts = fh.readline().split()
            if len(parts) != t + 1:
                raise DomainError(f"expected {t + 1} states per line")
            rows.append([int(x) for x in parts])
    return Trajectories(np.array(rows, dtype=np.int64), s)


def _write_rows(path, rows: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write(f"{rows.shape[-1]}\n")
        for row in np.atleast_2d(rows):
            fh.write(" ".join(_FLOAT_FMT.format(float(x)) for x in row) + "\n")


def _read_rows(path, expect_rows: int | None) -> np.ndarray:
    with open(path) as fh:
        first = fh.readline().split()
        if len(first) != 1:
            raise DomainError("matrix/distribution file must start with 'S'")
        n = int(first[0])
        count = n if expect_rows is None else expect_rows
        rows = []
        for _ in range(count):
            parts = fh.readline().split()
            if len(parts) != n:
                raise DomainError(f"expected {n} entries per row")
            rows.append([float(x) for x in parts])
    return np.array(rows, dtype=np.float64)


def write_matrix_file(path, rows) -> None:
    write = as_stochastic_matrix(rows)
    _write_rows(path, write)


def read_matrix_file(path) -> np.ndarray:
    return as_stochastic_matrix(_read_rows(path, None))


def write_distribution_file(path, weights) -> None:
    _write_rows(path, as_distribution(weights))


def read_distribution_file(path) -> np.ndarray:
    return as_distribution(_read_rows(path, 1)[0])
