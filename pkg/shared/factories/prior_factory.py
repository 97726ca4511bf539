"""Factory for building priors from presets and experiment configs."""

from typing import Callable, Optional

from shared.domain.consts import PriorPreset
from shared.domain.models import DiscretePrior
from shared.domain.payloads import PriorSpec
from theory.services.channels import community_detection_prior
from theory.services.prior import bernoulli_prior, make_prior, rademacher_prior


PRIORS: dict[str, Callable[[Optional[float]], DiscretePrior]] = {
    PriorPreset.BERNOULLI: lambda rho: bernoulli_prior(rho),
    PriorPreset.COMMUNITY: lambda rho: community_detection_prior(rho),
    PriorPreset.RADEMACHER: lambda rho: rademacher_prior(),
}


def create_prior(preset: str, rho: Optional[float] = None) -> DiscretePrior:
    """Build a named one-parameter prior.

    Raises:
        ValueError: If the preset is unknown or needs a rho that is missing
    """
    try:
        builder = PRIORS[preset]
    except KeyError:
        raise ValueError(f"Unknown prior preset: {preset}")
    if rho is None and preset in (PriorPreset.BERNOULLI, PriorPreset.COMMUNITY):
        raise ValueError(f"Prior preset {preset} requires rho")
    return builder(rho)


def prior_from_spec(spec: PriorSpec, rho: Optional[float] = None) -> DiscretePrior:
    """Prior described by a config section; ``rho`` overrides spec.rho in sweeps."""
    if spec.preset == PriorPreset.CUSTOM:
        return make_prior(spec.support, spec.weights)
    return create_prior(spec.preset, rho if rho is not None else spec.rho)


def prior_builder(preset: str) -> Callable[[float], DiscretePrior]:
    """One-argument builder rho -> prior, for sweeps and boundary searches."""
    if preset not in PRIORS:
        raise ValueError(f"Unknown prior preset: {preset}")
    return lambda rho: create_prior(preset, rho)
