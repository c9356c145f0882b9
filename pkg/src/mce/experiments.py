"""Experiment harness: Monte Carlo studies of the ensemble estimator,
emitting deterministic CSV files.

Four studies are provided: the chain-count/horizon trade-off at a fixed
observation budget, the effect of the state count, the sweep of the
cycle-walk jump rate, and the corrupted-row study with its error-bound
overlay.  Every run is a pure function of the config (including the master
seed), rows are emitted in sorted grid order, and floats are printed with
repr-level precision, so reruns are byte-identical.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import CorruptionProfile, clean_metrics, thm_corrupted_bound
from .core import DomainError, Trajectories, sup_norm_matrix, sup_norm_vector
from .estimate import count, empirical_distribution, empirical_transition_matrix
from .simulate import (
    CORRUPTION_MODES,
    ChainSpec,
    EnsembleSpec,
    inject_corrupted_rows,
    lazy_cycle,
    perturb_uniform,
    simulate_ensemble,
)
from .spectral import pseudo_spectral_gap, stationary_distribution

EXPERIMENTS = ("tradeoff", "statecount", "gamma-sweep", "corruption")


@dataclass
class ExperimentConfig:
    """Knobs of one experiment run; all fields have working defaults.

    ``budget`` (total observations M*T) and ``m_grid`` drive the trade-off
    study; ``omega_grid`` the state-count study; ``gamma_grid`` the jump
    rate sweep; ``corrupt_fracs``/``corrupt_mode``/``conf_eps`` the
    corruption study.  ``init`` is one of ``stationary``, ``uniform``, or
    ``point:<i>``.
    """

    experiment: str = "tradeoff"
    budget: int = 10_000
    m_grid: tuple[int, ...] = (2, 10, 100, 1000)
    n_chains: int = 50
    horizon: int = 50
    omega: int = 10
    omega_grid: tuple[int, ...] = (2, 5, 10, 25, 50, 100, 250, 500, 1000, 2500)
    gamma: float = 0.1
    gamma_grid: tuple[float, ...] = (0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9)
    eps_levels: tuple[float, ...] = (0.0, 0.05)
    trials: int = 50
    master_seed: int = 20260122
    init: str = "stationary"
    corrupt_fracs: tuple[float, ...] = (0.0, 0.02, 0.05, 0.1, 0.2)
    corrupt_mode: str = "constant"
    conf_eps: float = 0.1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise DomainError(f"unknown experiment {self.experiment!r}")
        for grid in (self.m_grid, self.omega_grid, self.gamma_grid, self.eps_levels):
            if len(grid) == 0:
                raise DomainError("grids must be nonempty")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.corrupt_mode not in CORRUPTION_MODES:
            raise DomainError(f"unknown corruption mode {self.corrupt_mode!r}")


def default_config(experiment: str, **overrides) -> ExperimentConfig:
    """Per-experiment defaults matching the published study settings."""
    presets = {
        "tradeoff": {},
        # Exact per-chain stationary solves are impractical at the largest
        # state counts, and uniform equals the stationary law exactly in the
        # noiseless column, so the state-count study starts uniform.
        "statecount": {"n_chains": 50, "horizon": 50, "init": "uniform"},
        "gamma-sweep": {
            "n_chains": 200,
            "horizon": 200,
            "eps_levels": (0.0, 0.03),
        },
        "corruption": {
            "n_chains": 300,
            "horizon": 10_000,
            "eps_levels": (0.0,),
        },
    }
    if experiment not in presets:
        raise DomainError(f"unknown experiment {experiment!r}")
    params = dict(presets[experiment])
    params.update(overrides)
    return ExperimentConfig(experiment=experiment, **params)


def _parse_value(raw: str, type_name: str):
    # Field annotations arrive as strings ("int", "tuple[float, ...]", ...).
    raw = raw.strip()
    if type_name == "int":
        return int(raw)
    if type_name == "float":
        return float(raw)
    if type_name == "str":
        return raw
    # Remaining fields are tuples of ints or floats, comma separated.
    parts = [p for p in (x.strip() for x in raw.split(",")) if p]
    element = float if "float" in type_name else int
    return tuple(element(p) for p in parts)


def parse_config(text: str, experiment: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` config format.

    Unknown keys are rejected; omitted keys take the experiment's
    defaults.  Lines starting with ``#`` and blank lines are ignored.
    """
    field_types = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise DomainError(f"config line {lineno}: expected 'key = value'")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key == "experiment":
            continue  # the experiment is chosen on the command line
        if key not in field_types:
            raise DomainError(f"config line {lineno}: unknown key {key!r}")
        overrides[key] = _parse_value(raw, field_types[key])
    return default_config(experiment, **overrides)


def _config_comment(config: ExperimentConfig) -> str:
    parts = []
    for f in dataclasses.fields(ExperimentConfig):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            rendered = ",".join(_fmt(v) for v in value)
        else:
            rendered = _fmt(value)
        parts.append(f"{f.name}={rendered}")
    parts.append(f"version={__version__}")
    return "# config: " + " ".join(parts)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)  # shortest float64 round trip, deterministic
    return str(value)


def _write_csv(path: Path, config: ExperimentConfig, header: list[str], rows) -> Path:
    lines = [_config_comment(config), ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def _seeds(master: int, *key: int, n: int = 3) -> tuple[int, ...]:
    state = np.random.SeedSequence(master, spawn_key=tuple(key)).generate_state(
        n, dtype=np.uint64
    )
    return tuple(int(x) for x in state)


def _init_distribution(transition: np.ndarray, policy: str) -> np.ndarray:
    n = transition.shape[0]
    if policy == "uniform":
        return np.full(n, 1.0 / n)
    if policy == "stationary":
        # Doubly stochastic matrices (all the unperturbed models here) have
        # the uniform stationary law; detect that to skip the solve.
        if np.abs(np.asarray(transition).sum(axis=0) - 1.0).max() <= 1e-12:
            return np.full(n, 1.0 / n)
        return stationary_distribution(transition)
    if policy.startswith("point:"):
        state = int(policy.split(":", 1)[1])
        if not 0 <= state < n:
            raise DomainError(f"init state {state} out of range")
        mu = np.zeros(n)
        mu[state] = 1.0
        return mu
    raise DomainError(f"unknown init policy {policy!r}")


def _simulate_clean(p, n_chains: int, horizon: int, init: str, seed: int) -> Trajectories:
    mu = _init_distribution(p, init)
    return simulate_ensemble(EnsembleSpec.homogeneous(p, mu, n_chains, horizon, seed))


def _simulate_perturbed(
    p, eps: float, n_chains: int, horizon: int, init: str, sim_seed: int, pert_seed: int
) -> Trajectories:
    # One chain at a time: only one perturbed matrix is alive at once, which
    # keeps the memory footprint O(n^2) even for large state spaces.
    rows = np.empty((n_chains, horizon + 1), dtype=np.int64)
    n = p.shape[0]
    for m in range(n_chains):
        p_m = perturb_uniform(p, eps, np.random.SeedSequence(pert_seed, spawn_key=(m,)))
        mu = _init_distribution(p_m, init)
        row_seed = _seeds(sim_seed, m, n=1)[0]
        spec = EnsembleSpec((ChainSpec(p_m, mu),), horizon, row_seed)
        rows[m] = simulate_ensemble(spec).states[0]
    return Trajectories(rows, n)


def _simulate(p, eps, n_chains, horizon, init, sim_seed, pert_seed) -> Trajectories:
    if eps == 0.0:
        return _simulate_clean(p, n_chains, horizon, init, sim_seed)
    return _simulate_perturbed(p, eps, n_chains, horizon, init, sim_seed, pert_seed)


def _mean_std(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values)
    # Error bars are the sample standard deviation across trials.
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), std


def run_tradeoff(config: ExperimentConfig, out_dir) -> Path:
    """Vary the chain count at a fixed total observation budget and record
    the transition-matrix estimation error per noise level."""
    p = lazy_cycle(config.omega, config.gamma)
    rows = []
    for gi, m in enumerate(sorted(config.m_grid)):
        t = config.budget // m
        if m * t != config.budget or t < 1:
            for eps in config.eps_levels:
                rows.append((m, t, eps, "nan", "nan", "skipped: budget not divisible"))
            continue
        for ei, eps in enumerate(config.eps_levels):
            errors = []
            for trial in range(config.trials):
                sim_seed, pert_seed, _ = _seeds(config.master_seed, gi, ei, trial)
                data = _simulate(p, eps, m, t, config.init, sim_seed, pert_seed)
                p_hat = empirical_transition_matrix(count(data))
                errors.append(sup_norm_matrix(p_hat, p))
            mean, std = _mean_std(errors)
            rows.append((m, t, eps, mean, std, ""))
    return _write_csv(
        Path(out_dir) / "tradeoff.csv",
        config,
        ["m", "t", "eps", "mean", "std", "note"],
        rows,
    )


def run_statecount(config: ExperimentConfig, out_dir) -> Path:
    """Vary the state count at fixed M and T; the error saturates at the
    stochastic-matrix diameter 2 once most states go unvisited."""
    rows = []
    for gi, n in enumerate(sorted(config.omega_grid)):
        p = lazy_cycle(n, config.gamma)
        for ei, eps in enumerate(config.eps_levels):
            errors = []
            for trial in range(config.trials):
                sim_seed, pert_seed, _ = _seeds(config.master_seed, gi, ei, trial)
                data = _simulate(
                    p, eps, config.n_chains, config.horizon, config.init,
                    sim_seed, pert_seed,
                )
                p_hat = empirical_transition_matrix(count(data))
                errors.append(sup_norm_matrix(p_hat, p))
            mean, std = _mean_std(errors)
            assert mean <= 2.0 + 1e-12
            rows.append((n, eps, mean, std))
    return _write_csv(
        Path(out_dir) / "statecount.csv",
        config,
        ["n_states", "eps", "mean", "std"],
        rows,
    )


def run_gamma_sweep(config: ExperimentConfig, out_dir) -> Path:
    """Sweep the cycle-walk jump rate and record both the occupancy and the
    transition-matrix estimation errors."""
    uniform = np.full(config.omega, 1.0 / config.omega)
    rows = []
    for gi, gamma in enumerate(sorted(config.gamma_grid)):
        p = lazy_cycle(config.omega, gamma)
        for ei, eps in enumerate(config.eps_levels):
            pi_errors = []
            p_errors = []
            for trial in range(config.trials):
                sim_seed, pert_seed, _ = _seeds(config.master_seed, gi, ei, trial)
                data = _simulate(
                    p, eps, config.n_chains, config.horizon, config.init,
                    sim_seed, pert_seed,
                )
                tables = count(data)
                pi_errors.append(
                    sup_norm_vector(empirical_distribution(tables), uniform)
                )
                p_errors.append(
                    sup_norm_matrix(empirical_transition_matrix(tables), p)
                )
            for target, errs in (("pi", pi_errors), ("P", p_errors)):
                mean, std = _mean_std(errs)
                rows.append((gamma, eps, target, mean, std))
    return _write_csv(
        Path(out_dir) / "gamma_sweep.csv",
        config,
        ["gamma", "eps", "target", "mean", "std"],
        rows,
    )


def run_corruption(config: ExperimentConfig, out_dir) -> Path:
    """Corrupt a growing fraction of rows and overlay the corrupted-row
    error bound (evaluated where its sample-size condition holds)."""
    p = lazy_cycle(config.omega, config.gamma)
    gamma_ps, _ = pseudo_spectral_gap(p)
    metrics0 = clean_metrics(p, 1, config.horizon, gamma=gamma_ps)
    m = config.n_chains
    rows = []
    for gi, frac in enumerate(sorted(config.corrupt_fracs)):
        m1 = round(frac * m)
        errors = []
        for trial in range(config.trials):
            sim_seed, _, corrupt_seed = _seeds(config.master_seed, gi, trial)
            data = _simulate_clean(p, m, config.horizon, config.init, sim_seed)
            data, _ = inject_corrupted_rows(
                data, m1, config.corrupt_mode, corrupt_seed
            )
            p_hat = empirical_transition_matrix(count(data))
            errors.append(sup_norm_matrix(p_hat, p))
        mean, std = _mean_std(errors)
        profile = CorruptionProfile(m - m1, m1, metrics0)
        overlay = thm_corrupted_bound(
            profile, config.horizon, config.omega, config.conf_eps
        )
        rows.append(
            (frac, m1, config.corrupt_mode, mean, std, overlay.bound,
             overlay.condition_met)
        )
    return _write_csv(
        Path(out_dir) / "corruption.csv",
        config,
        ["m1_fraction", "m1", "mode", "mean", "std", "bound", "condition_met"],
        rows,
    )


_RUNNERS = {
    "tradeoff": run_tradeoff,
    "statecount": run_statecount,
    "gamma-sweep": run_gamma_sweep,
    "corruption": run_corruption,
}


def run_experiment(config: ExperimentConfig, out_dir) -> Path:
    """Dispatch to the runner named by ``config.experiment``."""
    return _RUNNERS[config.experiment](config, out_dir)
