"""Validated configuration and JSON summary payloads."""

import math
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from shared.domain.consts import (
    EffectiveNoiseMode,
    OracleTask,
    PriorPreset,
    TransitionOrder,
)


class PriorSpec(BaseModel):
    """Prior section of an experiment config."""
    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={"example": {"preset": "bernoulli", "rho": 0.02}},
    )

    preset: PriorPreset = Field(PriorPreset.BERNOULLI, description="Named prior family")
    rho: Optional[float] = Field(None, gt=0, lt=1, description="Density for bernoulli/community")
    support: Optional[List[float]] = Field(None, description="Support points for custom priors")
    weights: Optional[List[float]] = Field(None, description="Weights for custom priors")

    @model_validator(mode="after")
    def validate_preset_fields(self) -> "PriorSpec":
        """Check that each preset gets the parameters it needs."""
        if self.preset in (PriorPreset.BERNOULLI, PriorPreset.COMMUNITY) and self.rho is None:
            raise ValueError(f"preset {self.preset.value} requires rho")
        if self.preset == PriorPreset.CUSTOM:
            if not self.support or not self.weights:
                raise ValueError("preset custom requires support and weights")
            if len(self.support) != len(self.weights):
                raise ValueError(
                    f"support ({len(self.support)}) and weights ({len(self.weights)}) differ in length"
                )
        return self


class ExperimentConfig(BaseModel):
    """One experiment: prior, noise levels, geometry, seeds and tolerances."""
    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "prior": {"preset": "bernoulli", "rho": 0.02},
                "delta_grid": [0.0008, 0.0012, 0.00125, 0.0015],
                "seed": 7,
            }
        },
    )

    prior: PriorSpec = Field(..., description="Prior family and parameters")
    delta: Optional[float] = Field(None, gt=0, description="Single noise variance")
    delta_grid: List[float] = Field(default_factory=list, description="Noise variances to sweep")
    rho_grid: List[float] = Field(default_factory=list, description="Densities to sweep")
    snr_grid: List[float] = Field(default_factory=list, description="Scalar-channel snr values")
    n: int = Field(1000, ge=2, description="Problem dimension (per block when coupled)")
    ring_length: int = Field(0, ge=0, description="Coupled ring parameter L (blocks 0..L)")
    window: int = Field(0, ge=0, description="Coupling window w")
    seed: int = Field(0, ge=0, description="Master random seed")
    num_seeds: int = Field(1, ge=1, description="Independent instances per point")
    num_instances: int = Field(100, ge=1, description="Instances for oracle averages")
    samples: int = Field(100000, ge=1000, description="Monte Carlo samples")
    tol: Optional[float] = Field(None, gt=0, description="Convergence tolerance")
    max_iter: Optional[int] = Field(None, ge=1, description="Iteration cap")
    quad_order: Optional[int] = Field(None, ge=1, description="Gauss-Hermite order")
    damping: float = Field(0.0, ge=0, lt=1, description="AMP damping")
    noise_mode: EffectiveNoiseMode = Field(EffectiveNoiseMode.EMPIRICAL)
    p: float = Field(0.5, gt=0, lt=1, description="Community base link probability")
    mu: Optional[float] = Field(None, gt=0, description="Community signal slope")
    curve_points: int = Field(201, ge=2, description="E grid size for potential curves")
    small_rho_probe: bool = Field(False, description="Also probe Delta_Opt at small rho")
    saturation: bool = Field(False, description="Run the threshold-saturation experiment")
    oracle_task: OracleTask = Field(OracleTask.NISHIMORI)
    dump_instances: bool = Field(False, description="Write each generated instance as an npz dump")
    output_dir: Optional[str] = Field(None, description="Output directory")

    @model_validator(mode="after")
    def validate_grids(self) -> "ExperimentConfig":
        """Grids must be positive; densities must lie in (0, 1); geometry must fit the ring."""
        for name in ("delta_grid", "snr_grid"):
            values = getattr(self, name)
            if any(not math.isfinite(x) or x <= 0 for x in values):
                raise ValueError(f"{name} must contain positive finite values")
        if any(not 0 < x < 1 for x in self.rho_grid):
            raise ValueError("rho_grid values must lie in (0, 1)")
        if self.ring_length % 2 != 0:
            raise ValueError(f"ring_length ({self.ring_length}) must be even")
        if self.ring_length and 2 * self.window > self.ring_length:
            raise ValueError(
                f"window ({self.window}) must be <= ring_length/2 ({self.ring_length // 2})"
            )
        return self

    def deltas(self) -> List[float]:
        """Noise levels requested by this config."""
        if self.delta_grid:
            return list(self.delta_grid)
        if self.delta is not None:
            return [self.delta]
        raise ValueError("config needs delta or delta_grid")

    def rhos(self) -> List[float]:
        if self.rho_grid:
            return list(self.rho_grid)
        if self.prior.rho is not None:
            return [self.prior.rho]
        raise ValueError("config needs rho_grid or prior.rho")


class Thresholds(BaseModel):
    """Algorithmic and information-theoretic noise thresholds of a prior."""
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    delta_amp: float = Field(..., gt=0, description="Sup of delta with a unique SE fixed point")
    delta_rs: float = Field(..., gt=0, description="Non-analyticity point of min i_RS")
    delta_opt: float = Field(..., gt=0, description="Equal to delta_rs")
    delta_spectral: float = Field(..., gt=0, description="v^2")
    delta_spinodal: float = Field(..., gt=0, description="Upper edge of the coexistence region")
    transition_order: TransitionOrder = Field(...)
    bias_extrapolated: bool = Field(False, description="Zero-mean bias removed by extrapolation")
    note: Optional[str] = Field(None)

    @model_validator(mode="after")
    def validate_ordering(self) -> "Thresholds":
        """delta_amp <= delta_rs and delta_opt == delta_rs."""
        slack = 1e-9 * max(1.0, self.delta_amp if math.isfinite(self.delta_amp) else 1.0)
        if self.delta_amp > self.delta_rs + slack:
            raise ValueError(f"delta_amp ({self.delta_amp}) must be <= delta_rs ({self.delta_rs})")
        if self.delta_opt != self.delta_rs:
            raise ValueError("delta_opt must equal delta_rs")
        return self


class RunMetadata(BaseModel):
    """Provenance written at the top of every output file."""
    command: str
    seed: int
    config_hash: str
    version: str

    def comment_lines(self) -> List[str]:
        return [f"# {key}={value}" for key, value in self.model_dump().items()]
