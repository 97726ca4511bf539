"""Tests for prior and random stream factories."""

import numpy as np
import pytest

from shared.domain.consts import PriorPreset
from shared.domain.payloads import PriorSpec
from shared.factories.prior_factory import PRIORS, create_prior, prior_builder, prior_from_spec
from shared.factories.rng_factory import create_rng


class TestPriorFactory:
    """Tests for named priors."""

    def test_create_bernoulli(self):
        """Test the Bernoulli preset moments."""
        prior = create_prior(PriorPreset.BERNOULLI, 0.1)
        assert prior.mean == pytest.approx(0.1)
        assert prior.v == pytest.approx(0.1)

    def test_rademacher_ignores_rho(self):
        """Test that the parameter-free preset builds without rho."""
        prior = create_prior("rademacher")
        assert prior.support.tolist() == [-1.0, 1.0]

    def test_missing_rho_raises(self):
        """Test that density presets need rho."""
        with pytest.raises(ValueError, match="requires rho"):
            create_prior(PriorPreset.COMMUNITY)

    def test_unknown_preset_raises(self):
        """Test that an unknown preset raises ValueError."""
        with pytest.raises(ValueError, match="Unknown prior preset"):
            create_prior("gaussian", 0.1)
        with pytest.raises(ValueError, match="Unknown prior preset"):
            prior_builder("custom")

    def test_custom_prior_from_spec(self):
        """Test a three-point custom alphabet."""
        spec = PriorSpec(preset="custom", support=[-1.0, 0.0, 2.0], weights=[0.25, 0.5, 0.25])
        prior = prior_from_spec(spec)
        assert prior.size == 3
        assert prior.mean == pytest.approx(0.25)

    def test_sweep_rho_overrides_spec(self):
        """Test that an explicit rho beats the spec value."""
        spec = PriorSpec(preset="bernoulli", rho=0.02)
        assert prior_from_spec(spec).v == pytest.approx(0.02)
        assert prior_from_spec(spec, rho=0.3).v == pytest.approx(0.3)

    def test_builder(self):
        """Test the one-argument builder used by boundary searches."""
        build = prior_builder(PriorPreset.BERNOULLI)
        assert build(0.2).mean == pytest.approx(0.2)
        assert PriorPreset.CUSTOM not in PRIORS


class TestRngFactory:
    """Tests for seeded random streams."""

    def test_same_seed_and_counter_reproduce(self):
        """Test reproducibility."""
        assert np.array_equal(create_rng(7, 1).random(5), create_rng(7, 1).random(5))

    def test_counters_give_distinct_streams(self):
        """Test that streams of one seed differ."""
        assert not np.array_equal(create_rng(7, 0).random(5), create_rng(7, 1).random(5))
        assert not np.array_equal(create_rng(7, 0).random(5), create_rng(8, 0).random(5))

    def test_negative_seed_raises(self):
        """Test seed validation."""
        with pytest.raises(ValueError, match="non-negative"):
            create_rng(-1)
        with pytest.raises(ValueError, match="non-negative"):
            create_rng(0, -3)
