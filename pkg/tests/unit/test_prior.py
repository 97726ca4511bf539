"""Tests for discrete priors, quadrature and scalar-channel quantities."""

import math

import numpy as np
import pytest
from scipy import integrate

from theory.services.prior import (
    bernoulli_prior,
    bias_zero_mean,
    dirac_prior,
    free_entropy,
    gauss_hermite,
    make_prior,
    mmse,
    overlap,
    posterior_mean,
    posterior_variance,
    rademacher_prior,
)


def _rademacher_mmse(snr: float) -> float:
    """1 - E tanh(snr + sqrt(snr) Z) by adaptive integration."""
    def integrand(z):
        return math.tanh(snr + math.sqrt(snr) * z) * math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    value, _ = integrate.quad(integrand, -12, 12, epsabs=1e-13, epsrel=1e-13, limit=200)
    return 1.0 - value


class TestMakePrior:
    """Tests for prior construction and moments."""

    def test_moments_of_bernoulli(self):
        """Test mean, second moment and variance of Bernoulli(0.3)."""
        prior = bernoulli_prior(0.3)
        assert prior.mean == pytest.approx(0.3)
        assert prior.second_moment == pytest.approx(0.3)
        assert prior.variance == pytest.approx(0.21)
        assert prior.v == prior.second_moment

    def test_weights_are_normalised(self):
        """Test that weights summing to something else are rescaled."""
        prior = make_prior([-1.0, 2.0], [2.0, 6.0])
        assert prior.weights.tolist() == pytest.approx([0.25, 0.75])
        assert prior.weights.sum() == pytest.approx(1.0, abs=1e-15)

    def test_entropy_of_uniform_pair(self):
        """Test that a fair two-point prior has entropy log 2."""
        assert rademacher_prior().entropy == pytest.approx(math.log(2))

    def test_arrays_are_read_only(self):
        """Test that the support cannot be mutated in place."""
        prior = bernoulli_prior(0.1)
        with pytest.raises(ValueError):
            prior.support[0] = 5.0

    @pytest.mark.parametrize(
        "support, weights, match",
        [
            ([], [], "empty"),
            ([0.0, 1.0], [1.0], "differ in length"),
            ([0.0, 1.0], [1.0, 0.0], "positive"),
            ([0.0, 1.0], [1.0, -0.5], "positive"),
            ([1.0, 1.0], [0.5, 0.5], "Duplicate"),
            ([0.0, math.inf], [0.5, 0.5], "finite"),
        ],
    )
    def test_invalid_priors_raise(self, support, weights, match):
        """Test that malformed alphabets are rejected with a clear message."""
        with pytest.raises(ValueError, match=match):
            make_prior(support, weights)

    @pytest.mark.parametrize("rho", [0.0, 1.0, -0.1, 1.5])
    def test_bernoulli_rejects_rho_outside_unit_interval(self, rho):
        """Test Bernoulli density validation."""
        with pytest.raises(ValueError, match="rho"):
            bernoulli_prior(rho)

    def test_zero_mean_detection(self):
        """Test is_zero_mean for symmetric and sparse priors."""
        assert rademacher_prior().is_zero_mean
        assert not bernoulli_prior(0.1).is_zero_mean

    def test_bias_shifts_mean_by_epsilon_sqrt_v(self):
        """Test that the bias moves every support point by eps * sqrt(v)."""
        biased = bias_zero_mean(rademacher_prior(), 1e-3)
        assert biased.mean == pytest.approx(1e-3)
        assert not biased.is_zero_mean


class TestQuadrature:
    """Tests for the Gauss-Hermite rule."""

    def test_gaussian_moments(self):
        """Test E[Z^2] = 1 and E[Z^4] = 3."""
        quad = gauss_hermite(20)
        assert quad.expect(quad.nodes**2) == pytest.approx(1.0, rel=1e-13)
        assert quad.expect(quad.nodes**4) == pytest.approx(3.0, rel=1e-13)
        assert quad.expect(quad.nodes) == pytest.approx(0.0, abs=1e-14)

    def test_weights_sum_to_one(self):
        """Test normalisation of the weights."""
        assert gauss_hermite(61).weights.sum() == pytest.approx(1.0, abs=1e-14)

    def test_rule_is_cached(self):
        """Test that the same order returns the same object."""
        assert gauss_hermite(33) is gauss_hermite(33)

    def test_non_positive_order_raises(self):
        """Test order validation."""
        with pytest.raises(ValueError, match="order"):
            gauss_hermite(0)


class TestPosterior:
    """Tests for posterior mean and variance of the scalar channel."""

    def test_rademacher_posterior_mean_is_tanh(self, rademacher):
        """Test E[X | y] = tanh(y / sigma2) for the symmetric binary prior."""
        y = np.linspace(-3, 3, 13)
        assert posterior_mean(rademacher, y, 0.7) == pytest.approx(np.tanh(y / 0.7), abs=1e-14)

    def test_rademacher_posterior_variance(self, rademacher):
        """Test Var[X | y] = 1 - tanh^2(y / sigma2)."""
        y = np.array([-1.0, 0.0, 0.4])
        expected = 1.0 - np.tanh(y / 0.5) ** 2
        assert posterior_variance(rademacher, y, 0.5) == pytest.approx(expected, abs=1e-14)

    def test_infinite_noise_returns_prior_mean(self, sparse_prior):
        """Test that sigma2 = inf gives the prior mean and variance."""
        assert posterior_mean(sparse_prior, 3.0, math.inf) == pytest.approx(0.02)
        assert posterior_variance(sparse_prior, 3.0, math.inf) == pytest.approx(0.02 * 0.98)

    def test_extreme_field_does_not_overflow(self, sparse_prior):
        """Test that a huge signal-to-noise ratio still yields a finite estimate."""
        value = posterior_mean(sparse_prior, 1.0, 1e-12)
        assert value == pytest.approx(1.0)

    def test_scalar_input_returns_float(self, sparse_prior):
        """Test that scalar arguments give a plain float."""
        assert isinstance(posterior_mean(sparse_prior, 0.5, 0.1), float)

    def test_matches_direct_summation(self):
        """Test E[X | y] and Var[X | y] against the weighted sum over the support."""
        support, weights = np.array([-1.0, 0.0, 2.0]), np.array([0.3, 0.5, 0.2])
        prior = make_prior(support, weights)
        y, sigma2 = np.linspace(-2.0, 3.0, 11), 0.6
        likelihood = weights * np.exp(-((y[:, None] - support) ** 2) / (2 * sigma2))
        posterior = likelihood / likelihood.sum(axis=1, keepdims=True)
        mean = posterior @ support
        variance = posterior @ support**2 - mean**2
        assert posterior_mean(prior, y, sigma2) == pytest.approx(mean, abs=1e-13)
        assert posterior_variance(prior, y, sigma2) == pytest.approx(variance, abs=1e-13)

    def test_invalid_sigma2_raises(self, sparse_prior):
        """Test that non-positive noise variance is rejected."""
        with pytest.raises(ValueError, match="sigma2"):
            posterior_mean(sparse_prior, 0.0, 0.0)


class TestScalarChannel:
    """Tests for mmse, overlap and free entropy."""

    def test_mmse_at_zero_snr_is_variance(self, sparse_prior, quad):
        """Test mmse(0) = Var(S) exactly."""
        assert mmse(sparse_prior, 0.0, quad) == sparse_prior.variance

    def test_rademacher_mmse_matches_integral(self, rademacher, quad):
        """Test the quadrature mmse against direct numerical integration."""
        for snr in (0.3, 1.0, 2.5):
            assert mmse(rademacher, snr, quad) == pytest.approx(_rademacher_mmse(snr), abs=1e-8)

    @pytest.mark.parametrize("prior", [
        bernoulli_prior(0.02),
        rademacher_prior(),
        make_prior([-1.0, 0.0, 2.0], [0.3, 0.5, 0.2]),
    ])
    def test_mmse_is_non_increasing(self, prior, quad):
        """Test that more signal never increases the error."""
        values = mmse(prior, np.geomspace(1e-2, 10.0, 100), quad)
        assert np.all(np.diff(values) <= 1e-12)
        assert values[0] <= prior.variance

    def test_mmse_vanishes_at_high_snr(self, rademacher, quad):
        """Test the noiseless limit."""
        assert mmse(rademacher, 400.0, quad) < 1e-12

    def test_dirac_prior_has_zero_mmse(self, point_mass, quad):
        """Test that a known signal is estimated perfectly."""
        assert mmse(point_mass, np.array([0.0, 1.0, 10.0]), quad).tolist() == [0.0, 0.0, 0.0]

    def test_overlap_complements_mmse(self, sparse_prior, quad):
        """Test overlap + mmse = v."""
        snr = np.array([0.0, 0.5, 3000.0])
        total = overlap(sparse_prior, snr, quad) + mmse(sparse_prior, snr, quad)
        assert total == pytest.approx(np.full(3, sparse_prior.v), abs=1e-10)

    def test_overlap_at_zero_snr_is_squared_mean(self, sparse_prior, quad):
        """Test overlap(0) = m^2."""
        assert overlap(sparse_prior, 0.0, quad) == pytest.approx(0.02**2, abs=1e-18)

    def test_free_entropy_derivative_is_half_overlap(self, rademacher, quad):
        """Test d F / d snr = (v - mmse) / 2 by central differences."""
        snr, h = 2.0, 1e-4
        derivative = (free_entropy(rademacher, snr + h, quad) - free_entropy(rademacher, snr - h, quad)) / (2 * h)
        assert derivative == pytest.approx((1.0 - mmse(rademacher, snr, quad)) / 2, rel=1e-6)

    def test_free_entropy_vanishes_at_zero_snr(self, sparse_prior, quad):
        """Test F(0) = 0."""
        assert free_entropy(sparse_prior, 0.0, quad) == 0.0

    def test_vectorised_shape(self, sparse_prior, quad):
        """Test that array snr keeps its shape, including beyond one chunk."""
        snr = np.linspace(0.0, 5.0, 1100).reshape(2, 550)
        assert mmse(sparse_prior, snr, quad).shape == (2, 550)

    def test_negative_snr_raises(self, sparse_prior, quad):
        """Test snr validation."""
        with pytest.raises(ValueError, match="snr"):
            mmse(sparse_prior, -1.0, quad)
