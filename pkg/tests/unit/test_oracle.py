"""Tests for exact enumeration and Monte Carlo oracles."""

import itertools

import numpy as np
import pytest
from scipy.special import logsumexp

from shared.domain.errors import StateSpaceTooLargeError
from shared.domain.models import Instance, frozen_array
from simulation.services.instances import generate_instance
from simulation.services.oracle import (
    exact_posterior,
    finite_size_mmse_curve,
    mc_free_entropy,
    mc_mmse,
    nishimori_check,
)
from theory.services.potential import matrix_mmse
from theory.services.prior import bernoulli_prior, dirac_prior, free_entropy, make_prior, mmse


def _brute_force(instance: Instance, prior) -> tuple:
    """Posterior mean and log partition summed term by term."""
    n, w = instance.n, instance.w_matrix
    log_terms, states = [], []
    for indices in itertools.product(range(prior.size), repeat=n):
        x = prior.support[list(indices)]
        total = sum(np.log(prior.weights[k]) for k in indices)
        for i in range(n):
            for j in range(i, n):
                total += (w[i, j] * x[i] * x[j] / np.sqrt(n) - x[i] ** 2 * x[j] ** 2 / (2 * n)) / instance.delta
        log_terms.append(total)
        states.append(x)
    log_terms, states = np.array(log_terms), np.array(states)
    log_norm = logsumexp(log_terms)
    return np.exp(log_terms - log_norm) @ states, log_norm


class TestExactPosterior:
    """Tests for posterior enumeration."""

    def test_two_variables_by_hand(self):
        """Test n = 2 with a three-point prior against a direct sum."""
        prior = make_prior([-1.0, 0.0, 2.0], [0.3, 0.5, 0.2])
        w = np.array([[0.4, -1.1], [-1.1, 2.0]])
        instance = Instance(n=2, w_matrix=frozen_array(w), signal=frozen_array([2.0, 0.0]), delta=0.7)
        result = exact_posterior(instance, prior)
        mean, log_norm = _brute_force(instance, prior)
        assert result.states == 9
        assert result.posterior_mean == pytest.approx(mean, abs=1e-12)
        assert result.log_partition == pytest.approx(log_norm, abs=1e-12)

    def test_larger_instance_matches_brute_force(self, rademacher):
        """Test n = 6 on a generated Rademacher instance."""
        instance = generate_instance(rademacher, 6, 0.8, rng_seed=3)
        result = exact_posterior(instance, rademacher)
        mean, log_norm = _brute_force(instance, rademacher)
        assert result.posterior_mean == pytest.approx(mean, abs=1e-12)
        assert result.log_partition == pytest.approx(log_norm, rel=1e-12)

    def test_pairwise_mean_is_symmetric_psd(self, sparse_prior):
        """Test E[X X^T | W] structure and errors."""
        instance = generate_instance(sparse_prior, 8, 0.01, rng_seed=4)
        result = exact_posterior(instance, sparse_prior)
        pairwise = result.pairwise_mean
        assert np.allclose(pairwise, pairwise.T)
        assert np.linalg.eigvalsh(pairwise).min() > -1e-12
        assert result.vector_error >= 0
        assert result.matrix_error >= 0

    def test_state_space_cap(self, rademacher):
        """Test that 2^20 states exceed the default cap."""
        instance = generate_instance(rademacher, 20, 1.0, rng_seed=0)
        with pytest.raises(StateSpaceTooLargeError) as excinfo:
            exact_posterior(instance, rademacher)
        assert excinfo.value.states == 2**20

    def test_noiseless_instance_raises(self, rademacher):
        """Test the positive delta check."""
        instance = generate_instance(rademacher, 3, 0.0, rng_seed=0)
        with pytest.raises(ValueError, match="positive delta"):
            exact_posterior(instance, rademacher)


class TestMonteCarlo:
    """Tests for the scalar-channel Monte Carlo oracles."""

    def test_mc_mmse_agrees_with_quadrature(self, quad):
        """Test quadrature mmse against Monte Carlo at 20 random (prior, snr) points.

        At most one point may leave the 3 sigma band, none the 4 sigma band, and
        the z-scores must not lean to one side.
        """
        rng = np.random.default_rng(2024)
        grid = np.linspace(-2.0, 2.0, 17)
        scores = []
        for k in range(20):
            support = np.sort(rng.choice(grid, size=rng.integers(2, 5), replace=False))
            prior = make_prior(support, rng.dirichlet(np.ones(support.size)) + 0.05)
            snr = float(10.0 ** rng.uniform(-1.0, 1.0))
            estimate = mc_mmse(prior, snr, 200000, rng_seed=100 + k)
            gap = estimate.estimate - mmse(prior, snr, quad)
            scores.append(gap / max(estimate.stderr, 1e-12))
            assert abs(gap) < 4 * estimate.stderr + 1e-9
        scores = np.array(scores)
        assert np.sum(np.abs(scores) > 3.0) <= 1
        assert abs(scores.sum()) / np.sqrt(scores.size) < 3.0

    def test_mc_mmse_at_zero_snr_is_variance(self, sparse_prior):
        """Test that snr = 0 gives the sample variance of the prior."""
        estimate = mc_mmse(sparse_prior, 0.0, 20000, rng_seed=2)
        assert estimate.estimate == pytest.approx(0.02 * 0.98, abs=5 * estimate.stderr)

    def test_mc_free_entropy_agrees_with_quadrature(self, rademacher, quad):
        """Test the free entropy against its Monte Carlo estimate."""
        estimate = mc_free_entropy(rademacher, 1.0, 50000, rng_seed=3)
        assert abs(estimate.estimate - free_entropy(rademacher, 1.0, quad)) < 4 * estimate.stderr

    def test_too_few_samples_raise(self, rademacher):
        """Test the sample minimum."""
        with pytest.raises(ValueError, match="at least 1000"):
            mc_mmse(rademacher, 1.0, 999, rng_seed=0)

    def test_reproducible(self, rademacher):
        """Test that the seed fixes the estimate."""
        assert mc_mmse(rademacher, 2.0, 2000, rng_seed=5) == mc_mmse(rademacher, 2.0, 2000, rng_seed=5)


class TestFiniteSize:
    """Tests for instance-averaged oracle quantities."""

    def test_nishimori_identity(self):
        """Test E[S_i S_j <X_i X_j>] = E[<X_i X_j>^2] within three standard errors."""
        result = nishimori_check(bernoulli_prior(0.5), 8, 1.0, 2000, rng_seed=6)
        assert abs(result.lhs - result.rhs) <= 3 * result.stderr

    def test_nishimori_identity_point_mass(self):
        """Test that a known signal gives a^4 on both sides."""
        result = nishimori_check(dirac_prior(1.5), 4, 1.0, 5, rng_seed=6)
        assert result.lhs == pytest.approx(1.5**4, rel=1e-12)
        assert result.rhs == pytest.approx(1.5**4, rel=1e-12)

    @pytest.mark.parametrize("delta", [0.1, 0.3, 1.0])
    def test_matrix_error_bounded_by_vector_error(self, delta):
        """Test Mmmse <= E[(|S|^2 / n)^2] - (v - Vmmse)^2 on finite instances.

        E[(|S|^2 / n)^2] = v^2 + Var(S^2) / n is the finite-n form of v^2.
        """
        prior, n = bernoulli_prior(0.5), 8
        v = prior.second_moment
        fourth = float(np.sum(prior.weights * prior.support**4))
        point = finite_size_mmse_curve(prior, n, [delta], 200, rng_seed=11)[0]
        bound = v**2 + (fourth - v**2) / n - (v - point.vector_mmse) ** 2
        slack = 3 * (point.matrix_stderr + 2 * v * point.vector_stderr)
        assert point.matrix_mmse <= bound + slack

    @pytest.mark.slow
    @pytest.mark.parametrize("delta", [0.1, 0.25, 0.5])
    def test_matrix_error_approaches_replica_value(self, delta, quad):
        """Test that the matrix error falls toward the asymptotic value over n = 6, 9, 12."""
        prior = bernoulli_prior(0.5)
        replica = matrix_mmse(prior, delta, quad)
        points = [finite_size_mmse_curve(prior, n, [delta], 200, rng_seed=12 + n)[0] for n in (6, 9, 12)]
        for smaller, larger in zip(points, points[1:]):
            slack = 3 * (smaller.matrix_stderr + larger.matrix_stderr)
            assert larger.matrix_mmse <= smaller.matrix_mmse + slack
        slack = 3 * (points[0].matrix_stderr + points[-1].matrix_stderr)
        assert abs(points[-1].matrix_mmse - replica) <= abs(points[0].matrix_mmse - replica) + slack

    def test_mmse_curve_decreases_with_signal(self, rademacher):
        """Test one point per delta and lower matrix error at lower noise."""
        points = finite_size_mmse_curve(rademacher, 4, [0.1, 10.0], 30, rng_seed=7)
        assert [p.delta for p in points] == [0.1, 10.0]
        assert points[0].matrix_mmse < points[1].matrix_mmse
        assert all(p.matrix_stderr >= 0 for p in points)

    def test_single_instance_raises(self, rademacher):
        """Test the instance count check."""
        with pytest.raises(ValueError):
            nishimori_check(rademacher, 3, 1.0, 1, rng_seed=0)
        with pytest.raises(ValueError):
            finite_size_mmse_curve(rademacher, 3, [1.0], 1, rng_seed=0)
