"""Pytest configuration and fixtures."""

import pytest

from shared.config.config import config
from theory.services.prior import bernoulli_prior, dirac_prior, gauss_hermite, rademacher_prior
from theory.services.channels import community_detection_prior


@pytest.fixture(autouse=True)
def sequential_sweeps(monkeypatch):
    """
    Run sweeps on one worker unless a test asks for the pool.

    Keeps log output and timing deterministic; tests of the parallel path
    patch config.WORKERS themselves.
    """
    monkeypatch.setattr(config, "WORKERS", 1)
    monkeypatch.delenv("RANK1_PHASE_WORKERS", raising=False)
    yield


@pytest.fixture
def sparse_prior():
    """Bernoulli(0.02): first-order transition between 0.0008 and 0.00125."""
    return bernoulli_prior(0.02)


@pytest.fixture
def rademacher():
    return rademacher_prior()


@pytest.fixture
def community_prior():
    return community_detection_prior(0.1)


@pytest.fixture
def point_mass():
    return dirac_prior(1.0)


@pytest.fixture(scope="session")
def quad():
    return gauss_hermite(61)
