"""Domain models and entities."""

from shared.domain.models import (
    AmpState,
    BlockStructure,
    CommunityGraph,
    CoupledProfile,
    CoupledRun,
    CouplingMatrix,
    DiscretePrior,
    EffectiveNoise,
    EnumerationResult,
    FiniteSizeMmsePoint,
    Instance,
    MonteCarloEstimate,
    MutualInformation,
    NishimoriResult,
    PotentialCurve,
    QuadratureRule,
    SaturationPoint,
    SaturationResult,
    SETrajectory,
    ShiftDiagnostic,
    SpectralResult,
    StationaryCurve,
    StationaryPoint,
    StationaryPoints,
    SweepPoint,
    VectorMmse,
)
from shared.domain.payloads import ExperimentConfig, PriorSpec, RunMetadata, Thresholds
from shared.domain.status import PointStatus, RunStatus
from shared.domain.consts import (
    BranchLabel,
    ChannelName,
    CommandName,
    EffectiveNoiseMode,
    FisherMethod,
    MmseValidity,
    Numerics,
    OracleTask,
    OutputFiles,
    PriorPreset,
    StationaryKind,
    TransitionOrder,
    TransitionOrderLiteral,
)

__all__ = [
    "AmpState",
    "BlockStructure",
    "CommunityGraph",
    "CoupledProfile",
    "CoupledRun",
    "CouplingMatrix",
    "DiscretePrior",
    "EffectiveNoise",
    "EnumerationResult",
    "FiniteSizeMmsePoint",
    "Instance",
    "MonteCarloEstimate",
    "MutualInformation",
    "NishimoriResult",
    "PotentialCurve",
    "QuadratureRule",
    "SaturationPoint",
    "SaturationResult",
    "SETrajectory",
    "ShiftDiagnostic",
    "SpectralResult",
    "StationaryCurve",
    "StationaryPoint",
    "StationaryPoints",
    "SweepPoint",
    "VectorMmse",
    "ExperimentConfig",
    "PriorSpec",
    "RunMetadata",
    "Thresholds",
    "PointStatus",
    "RunStatus",
    "BranchLabel",
    "ChannelName",
    "CommandName",
    "EffectiveNoiseMode",
    "FisherMethod",
    "MmseValidity",
    "Numerics",
    "OracleTask",
    "OutputFiles",
    "PriorPreset",
    "StationaryKind",
    "TransitionOrder",
    "TransitionOrderLiteral",
]
