"""Tests for the spectral baseline."""

import numpy as np
import pytest

from shared.domain.status import RunStatus
from shared.factories.rng_factory import create_rng
from simulation.services.instances import generate_instance
from simulation.services.spectral import power_iteration, spectral_estimate


class TestPowerIteration:
    """Tests for the dominant eigenpair."""

    def test_diagonal_matrix(self):
        """Test the largest eigenvalue of diag(3, 1, 0.5)."""
        eigenvalue, vector, _, converged = power_iteration(
            np.diag([3.0, 1.0, 0.5]), create_rng(0), 1e-10, 1000
        )
        assert converged
        assert eigenvalue == pytest.approx(3.0)
        assert abs(vector[0]) == pytest.approx(1.0)

    def test_iteration_cap(self):
        """Test that nearly degenerate eigenvalues hit the cap."""
        _, _, iterations, converged = power_iteration(
            np.diag([1.0, 0.999999]), create_rng(1), 1e-14, 5
        )
        assert not converged
        assert iterations == 5


class TestSpectralEstimate:
    """Tests for the top-eigenvector estimate."""

    def test_below_threshold_recovers_signal(self, rademacher):
        """Test overlap^2 near 1 - delta and eigenvalue near 1 + delta for delta < v^2."""
        instance = generate_instance(rademacher, 1000, 0.25, rng_seed=3)
        result = spectral_estimate(instance, rademacher, rng_seed=3)
        assert result.status == RunStatus.CONVERGED
        assert result.overlap**2 == pytest.approx(0.75, abs=0.05)
        assert result.eigenvalue == pytest.approx(1.25, abs=0.05)
        assert np.sum(result.estimate**2) == pytest.approx(1000.0)

    def test_above_threshold_has_small_overlap(self, rademacher):
        """Test that the eigenvector decorrelates from the signal for delta > v^2."""
        instance = generate_instance(rademacher, 1000, 2.0, rng_seed=4)
        result = spectral_estimate(instance, rademacher, rng_seed=4, max_iter=20000, tol=1e-6)
        assert result.overlap < 0.3
