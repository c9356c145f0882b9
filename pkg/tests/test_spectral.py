import numpy as np
import pytest

from mce.core import DomainError, normalized_stochastic_matrix
from mce.simulate import lazy_cycle
from mce.spectral import (
    SpectralSummary,
    effective_time,
    gamma_abs,
    gamma_rev,
    is_reversible,
    pseudo_spectral_gap,
    spectral_summary,
    stationary_distribution,
    time_reversal,
)


def lazy_cycle_gap_closed_form(size: int, gamma: float) -> tuple[float, float]:
    """Oracle: absolute and pseudo-spectral gap of the lazy cycle walk,
    valid for gamma <= 1/2 where the walk's spectrum is nonnegative."""
    g_abs = gamma * (1.0 - np.cos(2.0 * np.pi / size))
    return g_abs, 1.0 - (1.0 - g_abs) ** 2


def random_reversible(rng, n):
    """Random reversible chain from a symmetric positive flux matrix."""
    flux = rng.random((n, n))
    flux = flux + flux.T
    return normalized_stochastic_matrix(flux)


class TestStationary:
    def test_doubly_stochastic_gives_uniform(self):
        p = np.array([[0.5, 0.3, 0.2], [0.2, 0.5, 0.3], [0.3, 0.2, 0.5]])
        np.testing.assert_allclose(stationary_distribution(p), np.full(3, 1 / 3), atol=1e-12)

    def test_lazy_cycle_uniform(self):
        for gamma in (0.05, 0.25, 0.5):
            pi = stationary_distribution(lazy_cycle(10, gamma))
            np.testing.assert_allclose(pi, np.full(10, 0.1), atol=1e-12)

    def test_two_state_hand_oracle(self):
        # Balance equation 0.1 * pi0 = 0.2 * pi1 gives pi = (2/3, 1/3).
        p = np.array([[0.9, 0.1], [0.2, 0.8]])
        np.testing.assert_allclose(stationary_distribution(p), [2 / 3, 1 / 3], atol=1e-12)

    def test_reducible_rejected(self):
        with pytest.raises(DomainError, match="irreducible"):
            stationary_distribution(np.eye(2))

    def test_fixed_point_on_random_chains(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            n = int(rng.integers(2, 9))
            p = normalized_stochastic_matrix(rng.random((n, n)) + 0.01)
            pi = stationary_distribution(p)
            assert np.abs(pi @ p - pi).sum() <= 1e-10


class TestTimeReversal:
    def test_reversible_fixed_point(self):
        p = lazy_cycle(8, 0.3)
        pi = stationary_distribution(p)
        np.testing.assert_allclose(time_reversal(p, pi), p, atol=1e-14)

    def test_rotation_with_holding(self):
        # Clockwise rotation with holding reverses into the counterclockwise
        # one: P*(i, i) = 1/2 and P*(i, i-1) = 1/2 under the uniform law.
        n = 3
        p = np.zeros((n, n))
        for i in range(n):
            p[i, i] = 0.5
            p[i, (i + 1) % n] = 0.5
        pi = np.full(n, 1 / n)
        expected = np.zeros((n, n))
        for i in range(n):
            expected[i, i] = 0.5
            expected[i, (i - 1) % n] = 0.5
        np.testing.assert_allclose(time_reversal(p, pi), expected, atol=1e-15)

    def test_involution(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            n = int(rng.integers(2, 8))
            p = normalized_stochastic_matrix(rng.random((n, n)) + 0.02)
            pi = stationary_distribution(p)
            np.testing.assert_allclose(
                time_reversal(time_reversal(p, pi), pi), p, atol=1e-12
            )

    def test_zero_entry_rejected(self):
        p = np.array([[0.5, 0.5], [0.5, 0.5]])
        with pytest.raises(DomainError):
            time_reversal(p, np.array([1.0, 0.0]))


class TestGammaRev:
    def test_rank_one_chain(self):
        p = np.array([[0.5, 0.5], [0.5, 0.5]])
        assert gamma_rev(p, np.array([0.5, 0.5])) == pytest.approx(1.0)

    def test_two_state_closed_form(self):
        # Eigenvalues of [[1-p, p], [q, 1-q]] are 1 and 1-p-q.
        p = np.array([[0.9, 0.1], [0.1, 0.9]])
        assert gamma_rev(p, np.array([0.5, 0.5])) == pytest.approx(0.2, abs=1e-12)

    def test_nonreversible_rejected(self):
        p = np.zeros((3, 3))
        for i in range(3):
            p[i, i] = 0.5
            p[i, (i + 1) % 3] = 0.5
        with pytest.raises(DomainError):
            gamma_rev(p, np.full(3, 1 / 3))

    def test_matches_dense_eigensolver_oracle(self):
        # Oracle: second-largest eigenvalue from the general (nonsymmetric)
        # dense eigensolver, on reversible matrices up to 8x8.
        rng = np.random.default_rng(21)
        for _ in range(30):
            n = int(rng.integers(2, 9))
            p = random_reversible(rng, n)
            pi = stationary_distribution(p)
            eigs = np.sort(np.linalg.eigvals(p).real)
            assert gamma_rev(p, pi) == pytest.approx(1.0 - eigs[-2], abs=1e-9)


class TestPseudoSpectralGap:
    def test_rank_one_chain(self):
        p = np.array([[0.5, 0.5], [0.5, 0.5]])
        assert pseudo_spectral_gap(p) == (pytest.approx(1.0), 1)

    def test_lazy_cycle_closed_form_value(self):
        _, expected = lazy_cycle_gap_closed_form(10, 0.1)
        got, _ = pseudo_spectral_gap(lazy_cycle(10, 0.1))
        assert got == pytest.approx(expected, abs=1e-8)
        assert got == pytest.approx(0.037832, abs=5e-7)

    def test_closed_form_grid(self):
        for size in range(4, 21, 4):
            for gamma in (0.05, 0.1, 0.25, 0.5):
                _, expected = lazy_cycle_gap_closed_form(size, gamma)
                got, _ = pseudo_spectral_gap(lazy_cycle(size, gamma))
                assert got == pytest.approx(expected, abs=1e-8)

    def test_dominates_first_term(self):
        rng = np.random.default_rng(33)
        for _ in range(10):
            n = int(rng.integers(2, 6))
            p = normalized_stochastic_matrix(rng.random((n, n)) + 0.05)
            pi = stationary_distribution(p)
            p_star = time_reversal(p, pi)
            g_ps, _ = pseudo_spectral_gap(p)
            assert g_ps >= gamma_rev(p_star @ p, pi) - 1e-12

    def test_truncation_matches_brute_force(self):
        # Oracle: explicit maximum of gamma_rev(P*^k P^k) / k over k <= 1000.
        rng = np.random.default_rng(14)
        for _ in range(6):
            n = int(rng.integers(3, 6))
            p = normalized_stochastic_matrix(rng.random((n, n)) + 0.01)
            pi = stationary_distribution(p)
            p_star = time_reversal(p, pi)
            root = np.sqrt(pi)
            a = root[:, None] * p / root[None, :]
            best = 0.0
            a_k = a.copy()
            for k in range(1, 1001):
                lam2 = np.linalg.eigvalsh(a_k.T @ a_k)[-2]
                best = max(best, (1.0 - lam2) / k)
                a_k = a_k @ a
            got, _ = pseudo_spectral_gap(p)
            assert got == pytest.approx(best, abs=1e-10)
            del p_star

    def test_periodic_rejected(self):
        flip = np.array([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(DomainError):
            pseudo_spectral_gap(flip)


class TestGammaAbs:
    def test_lazy_cycle_matches_closed_form(self):
        for size in (5, 10, 16):
            for gamma in (0.1, 0.5):
                p = lazy_cycle(size, gamma)
                pi = stationary_distribution(p)
                expected, _ = lazy_cycle_gap_closed_form(size, gamma)
                assert gamma_abs(p, pi) == pytest.approx(expected, abs=1e-10)

    def test_negative_eigenvalue_counts(self):
        # Flip-heavy chain: eigenvalues 1 and -0.8, so the absolute gap is 0.2
        # even though 1 - lambda_2 = 1.8.
        p = np.array([[0.1, 0.9], [0.9, 0.1]])
        pi = np.array([0.5, 0.5])
        assert gamma_abs(p, pi) == pytest.approx(0.2, abs=1e-12)
        assert gamma_rev(p, pi) == pytest.approx(1.8, abs=1e-12)


class TestEffectiveTime:
    def test_unit_product(self):
        assert effective_time(0.1, 10) == pytest.approx(0.5)

    def test_half_gamma(self):
        assert effective_time(0.5, 4) == pytest.approx(4 / 3)

    def test_long_horizon_limit(self):
        t = 10**6
        assert effective_time(1.0, t) / t == pytest.approx(1.0, abs=1e-5)

    def test_bounded_by_min(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            g = float(rng.uniform(1e-3, 1.0))
            t = int(rng.integers(1, 10**6))
            val = effective_time(g, t)
            assert val <= min(t, g * t) + 1e-12

    def test_monotone(self):
        assert effective_time(0.2, 50) < effective_time(0.3, 50)
        assert effective_time(0.2, 50) < effective_time(0.2, 51)

    def test_domain(self):
        with pytest.raises(DomainError):
            effective_time(0.0, 10)
        with pytest.raises(DomainError):
            effective_time(-0.2, 10)


class TestSummary:
    def test_reversible_summary(self):
        p = lazy_cycle(6, 0.25)
        summary = spectral_summary(p)
        assert isinstance(summary, SpectralSummary)
        np.testing.assert_allclose(summary.stationary, np.full(6, 1 / 6), atol=1e-12)
        assert summary.gamma_rev is not None and summary.gamma_abs is not None
        assert summary.k_star >= 1
        # gamma_ps >= gamma_rev(P* P) holds by definition of the supremum.
        pi = summary.stationary
        assert summary.gamma_ps >= gamma_rev(time_reversal(p, pi) @ p, pi) - 1e-12

    def test_nonreversible_summary(self):
        p = np.zeros((3, 3))
        for i in range(3):
            p[i, i] = 0.4
            p[i, (i + 1) % 3] = 0.5
            p[i, (i + 2) % 3] = 0.1
        summary = spectral_summary(p)
        assert summary.gamma_rev is None and summary.gamma_abs is None
        assert 0 < summary.gamma_ps <= 1
        assert not is_reversible(p, summary.stationary)
