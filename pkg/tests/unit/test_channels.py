"""Tests for output channels and their effective noise."""

import math

import numpy as np
import pytest

from shared.domain.consts import ChannelName, FisherMethod
from shared.factories.channel_factory import CHANNELS, create_channel
from shared.factories.rng_factory import create_rng
from shared.implementations.channels import (
    BernoulliEdgeChannel,
    GaussianChannel,
    ScaledGaussianChannel,
)
from theory.services.channels import (
    NON_INFORMATIVE_NOTE,
    community_detection_prior,
    effective_noise,
)


class TestChannelFactory:
    """Tests for the channel registry."""

    def test_create_known_channels(self):
        """Test building every registered channel by enum member and by value."""
        assert isinstance(create_channel(ChannelName.GAUSSIAN, variance=2.0), GaussianChannel)
        assert isinstance(create_channel("bernoulli_edge", p=0.5, mu=0.1), BernoulliEdgeChannel)
        assert isinstance(create_channel(ChannelName.SCALED_GAUSSIAN.value), ScaledGaussianChannel)
        assert set(CHANNELS) == set(ChannelName)

    def test_unknown_channel_raises(self):
        """Test that an unknown name raises ValueError."""
        with pytest.raises(ValueError, match="Unknown channel"):
            create_channel("poisson")

    def test_invalid_parameters_raise(self):
        """Test constructor validation."""
        with pytest.raises(ValueError):
            GaussianChannel(variance=0.0)
        with pytest.raises(ValueError):
            BernoulliEdgeChannel(p=1.0, mu=0.1)


class TestChannels:
    """Tests for likelihoods and sampling."""

    def test_gaussian_log_likelihood(self):
        """Test the Gaussian density at one point."""
        channel = GaussianChannel(variance=0.5)
        value = channel.log_likelihood(np.array([1.0]), np.array([0.0]))[0]
        assert value == pytest.approx(-1.0 - 0.5 * math.log(math.pi))

    def test_bernoulli_edge_sampling_frequency(self):
        """Test that sampled edges follow p + mu y."""
        channel = BernoulliEdgeChannel(p=0.3, mu=0.2)
        outputs = channel.sample(np.full(200000, 0.5), create_rng(3))
        assert set(np.unique(outputs)) <= {0.0, 1.0}
        assert outputs.mean() == pytest.approx(0.4, abs=0.005)

    def test_link_probability_outside_unit_interval_raises(self):
        """Test that p + mu y >= 1 is rejected."""
        channel = BernoulliEdgeChannel(p=0.5, mu=1.0)
        with pytest.raises(ValueError, match="Link probability"):
            channel.log_likelihood(np.array([1.0]), np.array([0.6]))

    def test_describe(self):
        """Test the parameter record."""
        assert BernoulliEdgeChannel(0.5, 0.1).describe() == {"name": "bernoulli_edge", "p": 0.5, "mu": 0.1}


class TestEffectiveNoise:
    """Tests for the inverse Fisher information at y = 0."""

    def test_gaussian_is_its_variance(self):
        """Test the closed form for additive Gaussian noise."""
        result = effective_noise(GaussianChannel(variance=0.7))
        assert result.value == pytest.approx(0.7)
        assert result.method == FisherMethod.ANALYTIC
        assert result.stderr == 0.0

    def test_bernoulli_edge_closed_form(self):
        """Test Delta = p (1 - p) / mu^2."""
        result = effective_noise(BernoulliEdgeChannel(p=0.2, mu=0.05))
        assert result.value == pytest.approx(0.2 * 0.8 / 0.05**2)

    def test_monte_carlo_matches_scaled_gaussian(self):
        """Test the Monte Carlo estimator against variance / scale^2."""
        result = effective_noise(ScaledGaussianChannel(scale=2.0, variance=0.5), samples=100000, seed=11)
        assert result.method == FisherMethod.MONTE_CARLO
        assert result.stderr > 0
        assert result.value == pytest.approx(0.125, rel=0.03)

    def test_forced_monte_carlo_agrees_with_closed_form(self):
        """Test both estimators on the Bernoulli edge channel."""
        channel = BernoulliEdgeChannel(p=0.3, mu=0.1)
        exact = effective_noise(channel)
        estimate = effective_noise(channel, samples=200000, seed=5, force_monte_carlo=True)
        assert estimate.value == pytest.approx(exact.value, rel=0.03)

    def test_monte_carlo_is_reproducible(self):
        """Test that the same seed gives the same estimate."""
        channel = ScaledGaussianChannel(scale=1.5)
        first = effective_noise(channel, samples=5000, seed=2)
        second = effective_noise(channel, samples=5000, seed=2)
        assert first.value == second.value

    def test_non_informative_channel(self):
        """Test that zero Fisher information gives an infinite noise and a note."""
        result = effective_noise(ScaledGaussianChannel(scale=0.0), samples=1000)
        assert math.isinf(result.value)
        assert result.note == NON_INFORMATIVE_NOTE

    def test_too_few_samples_raise(self):
        """Test the sample count check."""
        with pytest.raises(ValueError, match="at least 2"):
            effective_noise(ScaledGaussianChannel(), samples=1)


class TestCommunityPrior:
    """Tests for the two-community prior."""

    @pytest.mark.parametrize("rho", [0.05, 0.3, 0.5])
    def test_zero_mean_unit_variance(self, rho):
        """Test mean 0 and v = 1 for every density."""
        prior = community_detection_prior(rho)
        assert prior.mean == pytest.approx(0.0, abs=1e-15)
        assert prior.v == pytest.approx(1.0)

    @pytest.mark.parametrize("rho", [0.0, 1.0])
    def test_density_out_of_range_raises(self, rho):
        """Test the (0, 1) check."""
        with pytest.raises(ValueError):
            community_detection_prior(rho)
