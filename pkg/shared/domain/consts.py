"""Constants to avoid string typos and magic numbers."""

from enum import Enum
from typing import Literal


class PriorPreset(str, Enum):
    """Named prior presets accepted by experiment configs."""
    BERNOULLI = "bernoulli"
    COMMUNITY = "community"
    RADEMACHER = "rademacher"
    CUSTOM = "custom"


class ChannelName(str, Enum):
    """Output channel names."""
    GAUSSIAN = "gaussian"
    BERNOULLI_EDGE = "bernoulli_edge"
    SCALED_GAUSSIAN = "scaled_gaussian"


class StationaryKind(str, Enum):
    """Nature of a stationary point of the replica potential."""
    MINIMUM = "minimum"
    MAXIMUM = "maximum"
    INFLEXION = "inflexion"


class BranchLabel(str, Enum):
    """Branch labels used when three stationary points coexist."""
    GOOD = "good"
    UNSTABLE = "unstable"
    BAD = "bad"


class TransitionOrder(str, Enum):
    """Order of the phase transition of min i_RS."""
    FIRST = "first"
    CONTINUOUS = "continuous"
    NONE = "none"


TransitionOrderLiteral = Literal["first", "continuous", "none"]


class MmseValidity(str, Enum):
    """Whether an asymptotic vector-MMSE value is proven or only conjectured."""
    PROVEN = "proven"
    CONJECTURED = "conjectured"


class EffectiveNoiseMode(str, Enum):
    """How AMP sets the effective noise of its denoiser."""
    EMPIRICAL = "empirical"
    SE_SCHEDULE = "se_schedule"


class FisherMethod(str, Enum):
    """How a channel's Fisher information was obtained."""
    ANALYTIC = "analytic"
    MONTE_CARLO = "monte_carlo"


class OracleTask(str, Enum):
    """Tasks of the oracle subcommand."""
    NISHIMORI = "nishimori"
    MMSE_CURVE = "mmse_curve"
    MC_MMSE = "mc_mmse"


class CommandName(str, Enum):
    """CLI subcommands."""
    POTENTIAL = "potential"
    THRESHOLDS = "thresholds"
    PHASE_DIAGRAM = "phase-diagram"
    SE = "se"
    COUPLED_SE = "coupled-se"
    AMP = "amp"
    SPECTRAL = "spectral"
    COMMUNITY = "community"
    ORACLE = "oracle"


class Numerics:
    """Numerical guard constants."""
    EXP_CLIP = 700.0  # exponent arguments are clipped to [-700, 0] after shifting
    ZERO_MEAN_ATOL = 1e-12  # |m| below this times sqrt(v) counts as zero mean
    SUM_TOL = 1e-12  # prior weights must sum to 1 within this after normalisation
    LOG_SNR_SPAN = 10.0  # stationary curve spans snr in 10^[-span, span] / v


class OutputFiles:
    """File names written by the CLI."""
    POTENTIAL = "potential.csv"
    THRESHOLDS = "thresholds.json"
    PHASE_DIAGRAM = "phase_diagram.csv"
    PHASE_SUMMARY = "phase_diagram.json"
    SMALL_RHO = "small_rho_probe.csv"
    SE_TRAJECTORY = "se_trajectory.csv"
    SE_SUMMARY = "se.json"
    COUPLED_PROFILE = "coupled_profile.csv"
    SATURATION = "threshold_saturation.csv"
    COUPLED_SUMMARY = "coupled_se.json"
    AMP_TRACE = "amp_trace.csv"
    AMP_SUMMARY = "amp.json"
    SPECTRAL = "spectral.csv"
    COMMUNITY_EDGES = "community_edges.txt"
    COMMUNITY_SUMMARY = "community.json"
    ORACLE = "oracle.csv"
    ERRORS = "errors.json"
