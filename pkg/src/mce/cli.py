"""Command-line interface: simulate ensembles, estimate from trajectory
files, inspect spectral quantities, evaluate error bounds, and run the
experiment harness.

Exit codes: 0 on success, 1 on usage errors, 2 on domain errors (invalid
mathematical inputs, missing or malformed files).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from .bounds import (
    ChainInfo,
    CorruptionProfile,
    consistency_check,
    heterogeneity_metrics,
    thm_corrupted_bound,
    thm_stationary_bound,
    thm_transition_bound,
)
from .core import (
    DomainError,
    read_distribution_file,
    read_matrix_file,
    read_trajectory_file,
    write_distribution_file,
    write_matrix_file,
    write_trajectory_file,
)
from .estimate import count, empirical_distribution, empirical_transition_matrix, split_estimate
from .experiments import (
    EXPERIMENTS,
    default_config,
    parse_config,
    run_experiment,
)
from .simulate import (
    CORRUPTION_MODES,
    ChainSpec,
    EnsembleSpec,
    complete_graph_pair,
    inject_corrupted_rows,
    lazy_cycle,
    perturb_uniform,
    simulate_ensemble,
)
from .spectral import spectral_summary
from .experiments import _init_distribution, _seeds


@click.group(name="mce")
def cli():
    """Markov chain ensemble estimation toolkit."""


@cli.command()
@click.option("--model", type=click.Choice(["lazy-cycle", "complete-graph", "file"]),
              default="lazy-cycle", show_default=True)
@click.option("--size", type=int, default=10, show_default=True,
              help="State count for the built-in models.")
@click.option("--gamma", type=float, default=0.1, show_default=True,
              help="Jump rate of the lazy cycle walk.")
@click.option("--eps", type=float, default=0.0, show_default=True,
              help="Per-chain uniform perturbation amplitude.")
@click.option("--chains", "-M", "n_chains", type=int, default=10, show_default=True)
@click.option("--horizon", "-T", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--init", default="stationary", show_default=True,
              help="Initial law: uniform|stationary|point:<i>.")
@click.option("--corrupt-count", type=int, default=0, show_default=True)
@click.option("--corrupt-mode", type=click.Choice(CORRUPTION_MODES),
              default="constant", show_default=True)
@click.option("--matrix-file", type=click.Path(), default=None,
              help="Transition matrix file for --model file.")
@click.option("--out", type=click.Path(), default="trajectories.txt",
              show_default=True)
def simulate(model, size, gamma, eps, n_chains, horizon, seed, init,
             corrupt_count, corrupt_mode, matrix_file, out):
    """Simulate an ensemble and write it in the trajectory file format.

    The complete-graph model simulates the walk without self-loops (the
    heterogeneous chains of that example); lazy-cycle and file models
    simulate the given matrix directly.
    """
    if model == "lazy-cycle":
        p = lazy_cycle(size, gamma)
    elif model == "complete-graph":
        p = complete_graph_pair(size)[1]
    else:
        if matrix_file is None:
            raise click.UsageError("--model file requires --matrix-file")
        p = read_matrix_file(matrix_file)
    sim_seed, pert_seed, corrupt_seed = _seeds(seed, 0)
    if eps > 0:
        chains = []
        for m in range(n_chains):
            p_m = perturb_uniform(p, eps, np.random.SeedSequence(pert_seed, spawn_key=(m,)))
            chains.append(ChainSpec(p_m, _init_distribution(p_m, init)))
        spec = EnsembleSpec(tuple(chains), horizon, sim_seed)
    else:
        spec = EnsembleSpec.homogeneous(
            p, _init_distribution(p, init), n_chains, horizon, sim_seed
        )
    data = simulate_ensemble(spec)
    data, corrupted = inject_corrupted_rows(data, corrupt_count, corrupt_mode, corrupt_seed)
    write_trajectory_file(out, data)
    click.echo(f"wrote {data.n_chains} chains x {data.horizon} steps to {out}")
    if corrupted.size:
        click.echo("corrupted rows: " + " ".join(str(i) for i in corrupted))


@cli.command()
@click.argument("trajectory_file", type=click.Path())
@click.option("--out", type=click.Path(), default=".", show_default=True,
              help="Directory for the estimate files.")
@click.option("--split-file", type=click.Path(), default=None,
              help="File with corrupted row indices (one integer per line); "
                   "also writes estimates over the remaining rows.")
def estimate(trajectory_file, out, split_file):
    """Estimate the transition matrix and occupancy law from a trajectory file."""
    data = read_trajectory_file(trajectory_file)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if split_file is None:
        tables = count(data)
        write_matrix_file(out_dir / "p_hat.txt", empirical_transition_matrix(tables))
        write_distribution_file(out_dir / "pi_hat.txt", empirical_distribution(tables))
        click.echo(f"wrote {out_dir / 'p_hat.txt'} and {out_dir / 'pi_hat.txt'}")
        return
    indices = [int(line) for line in Path(split_file).read_text().split()]
    split = split_estimate(data, indices)
    write_matrix_file(out_dir / "p_hat.txt", split.p_hat)
    write_distribution_file(out_dir / "pi_hat.txt", split.pi_hat)
    write_matrix_file(out_dir / "p_hat_clean.txt", split.p_hat_clean)
    write_distribution_file(out_dir / "pi_hat_clean.txt", split.pi_hat_clean)
    click.echo(f"wrote full and clean-row estimates to {out_dir}")


@cli.command()
@click.argument("matrix_file", type=click.Path())
def spectral(matrix_file):
    """Print spectral/mixing quantities of a transition matrix."""
    summary = spectral_summary(read_matrix_file(matrix_file))
    fmt = lambda v: "n/a (not reversible)" if v is None else format(v, ".12g")
    click.echo(f"gamma_rev: {fmt(summary.gamma_rev)}")
    click.echo(f"gamma_abs: {fmt(summary.gamma_abs)}")
    click.echo(f"gamma_ps:  {format(summary.gamma_ps, '.12g')}")
    click.echo(f"k_star:    {summary.k_star}")
    click.echo("stationary: " + " ".join(format(x, ".12g") for x in summary.stationary))


def _load_model_description(path: Path):
    """Parse a model description file.

    Lines: ``target = <matrix file>`` (required), ``clean = <count>``
    (chains identical to the target, stationary start), and
    ``chain = <count> <matrix file> [<initial distribution file>]``.
    Paths are resolved relative to the description file.
    """
    base = path.parent
    target = None
    chains: list[ChainInfo] = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise DomainError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in stripped.split("=", 1))
        if key == "target":
            target = read_matrix_file(base / raw)
        elif key == "clean":
            if target is None:
                raise DomainError(f"{path}:{lineno}: 'target' must come first")
            chains.extend([ChainInfo(target)] * int(raw))
        elif key == "chain":
            parts = raw.split()
            if len(parts) not in (2, 3):
                raise DomainError(
                    f"{path}:{lineno}: chain lines are '<count> <matrix> [<init>]'"
                )
            matrix = read_matrix_file(base / parts[1])
            initial = None
            if len(parts) == 3:
                initial = read_distribution_file(base / parts[2])
            chains.extend([ChainInfo(matrix, initial=initial)] * int(parts[0]))
        else:
            raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
    if target is None:
        raise DomainError(f"{path}: missing 'target' line")
    if not chains:
        raise DomainError(f"{path}: no chains declared")
    return target, chains


@cli.command()
@click.argument("model_file", type=click.Path())
@click.option("--horizon", "-T", type=int, required=True)
@click.option("--conf-eps", type=float, default=0.1, show_default=True,
              help="Confidence level of the bounds.")
@click.option("--corrupt-count", type=int, default=0, show_default=True,
              help="Number of additional fully corrupted rows.")
@click.option("--margin", type=float, default=10.0, show_default=True,
              help="Margin interpreting the asymptotic conditions.")
@click.option("--csv", "as_csv", is_flag=True, help="Emit name,value CSV rows.")
def bounds(model_file, horizon, conf_eps, corrupt_count, margin, as_csv):
    """Evaluate heterogeneity metrics and every error bound for a model.

    The model description file lists the target matrix and the ensemble
    members (see the README for the format).  Declared chains are treated
    as the uncorrupted rows; --corrupt-count appends arbitrary rows for
    the corrupted-row bound.
    """
    target, chains = _load_model_description(Path(model_file))
    m0 = len(chains)
    m = m0 + corrupt_count
    n = target.shape[0]
    metrics = heterogeneity_metrics(target, chains, horizon)
    transition = thm_transition_bound(metrics, m0, horizon, n, conf_eps)
    stationary = thm_stationary_bound(metrics, m0, n, conf_eps)
    profile = CorruptionProfile(m0, corrupt_count, metrics)
    corrupted = thm_corrupted_bound(profile, horizon, n, conf_eps)
    report = consistency_check(metrics, m0, n, margin=margin)
    pairs = [
        ("delta1", metrics.delta1),
        ("delta_inf", metrics.delta_inf),
        ("pi_bar_min", metrics.pi_bar_min),
        ("eta", metrics.eta),
        ("gamma_min", metrics.gamma_min),
        ("t_prime", metrics.t_prime),
        ("transition_bound", transition.bound),
        ("transition_condition_lhs", transition.condition_lhs),
        ("transition_condition_rhs", transition.condition_rhs),
        ("transition_condition_met", transition.condition_met),
        ("stationary_bound", stationary),
        ("corrupted_bound", corrupted.bound),
        ("corrupted_condition_lhs", corrupted.condition_lhs),
        ("corrupted_condition_rhs", corrupted.condition_rhs),
        ("corrupted_condition_met", corrupted.condition_met),
    ]
    for check in report.checks:
        pairs.append((f"consistency[{check.name}]", f"{check.value:.6g} "
                      f"({'pass' if check.passed else 'fail'})"))
    if as_csv:
        click.echo("name,value")
        for name, value in pairs:
            click.echo(f"{name},{_render(value)}")
    else:
        width = max(len(name) for name, _ in pairs)
        for name, value in pairs:
            click.echo(f"{name:<{width}}  {_render(value)}")


def _render(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


@cli.command()
@click.argument("name", type=click.Choice(EXPERIMENTS))
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Flat key = value config file; omitted keys use defaults.")
@click.option("--out", type=click.Path(), default=".", show_default=True)
@click.option("--seed", type=int, default=None, help="Override the master seed.")
def experiment(name, config_path, out, seed):
    """Run one experiment of the harness and write its CSV."""
    if config_path is None:
        config = default_config(name)
    else:
        config = parse_config(Path(config_path).read_text(), name)
    if seed is not None:
        config.master_seed = seed
    path = run_experiment(config, out)
    click.echo(f"wrote {path}")


def main(argv=None) -> int:
    """Entry point with the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.Abort:
        return 1
    except (DomainError, OSError) as exc:
        click.echo(f"domain error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
