"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Monte Carlo criteria use fixed seeds throughout, so the suite is
deterministic.  The experiment runners are single-threaded by design;
determinism across worker counts is inherited from the per-chain seed
streams (asserted via the strategy-equivalence test in the simulate
suite) and from byte-comparing reruns here.
"""

import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from mce.bounds import ChainInfo, clean_metrics, heterogeneity_metrics, state_frequency_tail, thm_transition_bound
from mce.core import Trajectories, sup_norm_matrix, sup_norm_vector
from mce.estimate import (
    count,
    empirical_distribution,
    empirical_transition_matrix,
    mean_transition_matrix,
)
from mce.experiments import default_config, run_corruption, run_experiment, run_statecount, run_tradeoff
from mce.simulate import EnsembleSpec, complete_graph_pair, lazy_cycle, simulate_ensemble
from mce.spectral import pseudo_spectral_gap, stationary_distribution
from oracles import (
    brute_force_counts,
    brute_force_mean_matrix,
    brute_force_p_hat,
    lazy_cycle_gap_closed_form,
)


@contextmanager
def criterion(name):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE FAIL: {name}")
        raise
    print(f"\nACCEPTANCE PASS: {name} ({time.perf_counter() - start:.1f}s)")


def test_pseudo_spectral_gap_closed_form():
    with criterion("pseudo-spectral gap closed form (lazy cycle grid)"):
        start = time.perf_counter()
        for size in range(4, 21):
            for gamma in (0.05, 0.1, 0.25, 0.5):
                _, expected = lazy_cycle_gap_closed_form(size, gamma)
                got, _ = pseudo_spectral_gap(lazy_cycle(size, gamma))
                assert abs(got - expected) <= 1e-8, (size, gamma, got, expected)
        assert time.perf_counter() - start < 5.0


def test_estimator_brute_force_oracle():
    with criterion("estimator correctness against brute-force oracle"):
        start = time.perf_counter()
        rng = np.random.default_rng(314159)
        for _ in range(500):
            m = int(rng.integers(1, 9))
            t = int(rng.integers(1, 9))
            n = int(rng.integers(1, 9))
            data = Trajectories(rng.integers(0, n, size=(m, t + 1)), n)
            tables = count(data)
            big_n, nij, nmi, _ = brute_force_counts(data.states, n)
            assert np.array_equal(tables.state_counts, big_n)
            assert np.array_equal(tables.transition_counts, nij)
            assert np.array_equal(tables.per_chain_state, nmi)
            p_hat = empirical_transition_matrix(tables)
            assert np.abs(p_hat - brute_force_p_hat(big_n, nij, n)).max() <= 1e-14
            pi_hat = empirical_distribution(tables)
            assert np.abs(pi_hat - big_n / (m * t)).max() <= 1e-14
            mats = []
            for _ in range(m):
                raw = rng.random((n, n)) + 0.01
                mats.append(raw / raw.sum(axis=1)[:, None])
            tilde = mean_transition_matrix(tables, mats)
            expected = brute_force_mean_matrix(big_n, nmi, mats, n)
            assert np.abs(tilde - expected).max() <= 1e-14
        assert time.perf_counter() - start < 10.0


def test_complete_graph_metrics():
    with criterion("complete-graph heterogeneity metrics"):
        start = time.perf_counter()
        for n in (3, 10, 100):
            p, pm = complete_graph_pair(n)
            uniform = np.full(n, 1.0 / n)
            # Four chains with the uniform law supplied: the average of
            # identical power-of-two many vectors is bit-exact.
            chains = [ChainInfo(pm, stationary=uniform, gamma=1.0)] * 4
            metrics = heterogeneity_metrics(p, chains, horizon=10)
            assert metrics.pi_bar_min == 1.0 / n
            # The float row sum of |P_m - P| rounds at the last ulp; the
            # identity itself is certified exactly in rational arithmetic.
            assert metrics.delta1 == pytest.approx(2.0 / n, rel=1e-13)
            assert metrics.delta_inf == pytest.approx(2.0 / n, rel=1e-13)
            row_l1 = Fraction(1, n) + (n - 1) * (Fraction(1, n - 1) - Fraction(1, n))
            assert row_l1 == Fraction(2, n)
        assert time.perf_counter() - start < 1.0


def test_bound_evaluator_regression():
    with criterion("transition bound regression values"):
        p2 = np.array([[0.5, 0.5], [0.5, 0.5]])
        metrics = clean_metrics(p2, n_chains=100, horizon=100)
        out = thm_transition_bound(metrics, 100, 100, 2, 0.05)
        assert out.bound == pytest.approx(0.3154, abs=0.0005)
        assert out.condition_rhs == pytest.approx(1461.7, abs=0.5)
        assert out.condition_met


def test_concentration_soundness():
    with criterion("state-frequency tail bound soundness (Monte Carlo)"):
        start = time.perf_counter()
        p = np.array([[0.5, 0.3, 0.2], [0.25, 0.5, 0.25], [0.2, 0.3, 0.5]])
        pi = stationary_distribution(p)
        gamma, _ = pseudo_spectral_gap(p)
        reps, m, t = 2000, 20, 50
        # One big seeded ensemble regrouped into 2000 independent
        # replications of M=20 stationary chains.
        spec = EnsembleSpec.homogeneous(p, pi, reps * m, t, 13579)
        per_chain = count(simulate_ensemble(spec)).per_chain_state
        freq = per_chain.reshape(reps, m, 3).sum(axis=1) / (m * t)
        nontrivial = 0
        for s in (0.02, 0.05, 0.1):
            for i in range(3):
                empirical = float(np.mean(np.abs(freq[:, i] - pi[i]) >= s))
                bound = state_frequency_tail(s, float(pi[i]), m, t, gamma).probability
                assert empirical <= bound, (s, i, empirical, bound)
                nontrivial += bound < 1.0
        assert nontrivial > 0  # the check must not pass on clamping alone
        assert time.perf_counter() - start < 60.0


@pytest.fixture(scope="module")
def tradeoff_csv(tmp_path_factory):
    start = time.perf_counter()
    config = default_config("tradeoff")
    text = run_tradeoff(config, tmp_path_factory.mktemp("tradeoff")).read_text()
    assert time.perf_counter() - start < 300.0
    return text


def _rows(csv_text):
    lines = csv_text.splitlines()
    header = lines[1].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[2:]]


def test_tradeoff_reproduction(tradeoff_csv):
    with criterion("chain-count/horizon trade-off shape at desk scale"):
        rows = _rows(tradeoff_csv)
        noiseless = {int(r["m"]): float(r["mean"]) for r in rows if float(r["eps"]) == 0}
        assert set(noiseless) == {2, 10, 100, 1000}
        assert max(noiseless.values()) / min(noiseless.values()) < 2.0
        noisy = {int(r["m"]): float(r["mean"]) for r in rows if float(r["eps"]) == 0.05}
        assert noisy[100] < noisy[2]


def test_statecount_plateau(tmp_path):
    with criterion("state-count error plateau at the diameter bound"):
        start = time.perf_counter()
        config = default_config("statecount", eps_levels=(0.0,))
        rows = _rows(run_statecount(config, tmp_path).read_text())
        means = {int(r["n_states"]): float(r["mean"]) for r in rows}
        assert all(v <= 2.0 for v in means.values())
        assert means[2500] >= 1.9
        assert time.perf_counter() - start < 180.0


def test_consistency_trend():
    with criterion("occupancy error square-root rate (quadrupled sample)"):
        p = lazy_cycle(10, 0.25)
        uniform = np.full(10, 0.1)

        def median_err(m, t, seed0):
            errs = []
            for trial in range(50):
                spec = EnsembleSpec.homogeneous(p, uniform, m, t, seed0 + trial)
                pi_hat = empirical_distribution(count(simulate_ensemble(spec)))
                errs.append(sup_norm_vector(pi_hat, uniform))
            return float(np.median(errs))

        # Quadruple M T by quadrupling M, holding T (hence T') fixed.
        small = median_err(25, 80, 1000)
        large = median_err(100, 80, 2000)
        assert 1.5 <= small / large <= 3.0, small / large


def test_corruption_linearity(tmp_path):
    with criterion("corrupted-row bound overlay and error monotonicity"):
        config = default_config("corruption")
        rows = _rows(run_corruption(config, tmp_path).read_text())
        means = [float(r["mean"]) for r in rows]
        assert means == sorted(means)  # nondecreasing in the corrupted share
        for r in rows:
            if r["condition_met"] == "true":
                assert float(r["mean"]) <= float(r["bound"]), r


def test_determinism(tmp_path):
    with criterion("byte-identical experiment reruns"):
        small = {
            "tradeoff": dict(budget=200, m_grid=(2, 10), eps_levels=(0.0, 0.05), trials=3),
            "statecount": dict(omega_grid=(2, 5, 10), eps_levels=(0.0, 0.05), trials=3),
            "gamma-sweep": dict(
                n_chains=5, horizon=40, gamma_grid=(0.1, 0.5),
                eps_levels=(0.0, 0.03), trials=3,
            ),
            "corruption": dict(
                n_chains=10, horizon=50, corrupt_fracs=(0.0, 0.2), trials=3,
            ),
        }
        for name, overrides in small.items():
            config = default_config(name, **overrides)
            first = run_experiment(config, tmp_path / name / "a").read_bytes()
            second = run_experiment(config, tmp_path / name / "b").read_bytes()
            assert first == second, name
