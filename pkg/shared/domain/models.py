"""Domain models for priors, potentials, state evolution and experiments."""

from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from shared.domain.consts import (
    BranchLabel,
    FisherMethod,
    MmseValidity,
    Numerics,
    StationaryKind,
)
from shared.domain.status import PointStatus, RunStatus


def frozen_array(values, dtype=float) -> np.ndarray:
    """Copy values into a read-only numpy array."""
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DiscretePrior:
    """Finite-alphabet prior P0(s) = sum_a p_a delta(s - a_a).

    Built through ``theory.services.prior.make_prior`` which validates the
    alphabet and caches the moments below.
    """
    support: np.ndarray
    weights: np.ndarray
    mean: float
    second_moment: float  # v = E[S^2]
    variance: float
    entropy: float  # nats

    @property
    def size(self) -> int:
        return int(self.support.size)

    @property
    def v(self) -> float:
        return self.second_moment

    @property
    def is_zero_mean(self) -> bool:
        """True when E=v is a stationary point of state evolution."""
        scale = max(float(np.sqrt(self.second_moment)), 1.0)
        return abs(self.mean) <= Numerics.ZERO_MEAN_ATOL * scale

    def to_record(self) -> dict:
        return {"support": self.support.tolist(), "weights": self.weights.tolist()}


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes/weights for expectations over Z ~ N(0, 1)."""
    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def expect(self, values: np.ndarray) -> np.ndarray:
        """Contract the last axis of ``values`` (one entry per node) with the weights."""
        return np.asarray(values) @ self.weights


@dataclass(frozen=True, eq=False)
class PotentialCurve:
    """Replica potential i_RS(E; delta) sampled on an increasing E grid."""
    delta: float
    energies: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class StationaryPoint:
    energy: float
    potential: float
    kind: StationaryKind
    branch: Optional[BranchLabel] = None


@dataclass(frozen=True)
class StationaryPoints:
    """Roots of E = mmse((v - E)/delta) on [0, v], sorted by energy."""
    delta: float
    points: Tuple[StationaryPoint, ...]

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def energies(self) -> List[float]:
        return [p.energy for p in self.points]

    @property
    def minima(self) -> List[StationaryPoint]:
        return [p for p in self.points if p.kind == StationaryKind.MINIMUM]

    def branch(self, label: BranchLabel) -> Optional[StationaryPoint]:
        for point in self.points:
            if point.branch == label:
                return point
        return None


@dataclass(frozen=True, eq=False)
class StationaryCurve:
    """All stationary points for all noise levels, parametrised by snr.

    Each snr s gives the stationary point E = mmse(s) of i_RS(.; delta) with
    delta = (v - mmse(s)) / s. ``snr`` is increasing, so ``energies`` is
    non-increasing.
    """
    snr: np.ndarray
    energies: np.ndarray
    deltas: np.ndarray


@dataclass(frozen=True)
class MutualInformation:
    """min over E of i_RS(E; delta) and its minimiser(s)."""
    delta: float
    value: float
    argmin: float
    minimizers: Tuple[float, ...] = ()


@dataclass(frozen=True)
class VectorMmse:
    delta: float
    value: float
    validity: MmseValidity


@dataclass(frozen=True, eq=False)
class SETrajectory:
    """Scalar state evolution E^0 = v, E^{t+1} = mmse((v - E^t)/delta)."""
    delta: float
    iterates: np.ndarray
    converged: bool
    fixed_point: float
    status: RunStatus


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """Circulant doubly stochastic (L+1)x(L+1) coupling kernel."""
    matrix: np.ndarray
    window: int

    @property
    def size(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def length(self) -> int:
        """Ring parameter L (blocks are 0..L)."""
        return self.size - 1


@dataclass(frozen=True, eq=False)
class CoupledProfile:
    """Per-block MSE values E_mu on the ring; seed blocks are pinned to 0."""
    values: np.ndarray
    seed: Tuple[int, ...] = ()

    @property
    def seed_mask(self) -> np.ndarray:
        mask = np.zeros(self.values.size, dtype=bool)
        mask[list(self.seed)] = True
        return mask


@dataclass(frozen=True, eq=False)
class CoupledRun:
    profile: CoupledProfile
    iterations: int
    status: RunStatus
    history: Optional[np.ndarray] = None  # (iterations + 1, L + 1) when recorded


@dataclass(frozen=True)
class SaturationPoint:
    delta: float
    max_interior: float
    e_good: float  # nan when no good branch exists at this delta
    saturated: bool
    status: RunStatus


@dataclass(frozen=True)
class SaturationResult:
    """Outcome of the threshold-saturation experiment for one (w, L)."""
    window: int
    length: int
    points: Tuple[SaturationPoint, ...]
    delta_amp_coupled: float
    bracketed: bool  # False when no saturated/unsaturated crossing was in the grid


@dataclass(frozen=True, eq=False)
class ShiftDiagnostic:
    """Saturated profile built from a coupled fixed point and its unit shift."""
    saturated: np.ndarray
    shifted: np.ndarray
    mu_infinity: int
    mu_max: int
    potential_difference: float
    predicted_difference: float  # i_RS(E_good) - i_RS(E_max)


@dataclass(frozen=True, eq=False)
class BlockStructure:
    """Block layout of a spatially coupled instance."""
    coupling: CouplingMatrix
    block_size: int
    block_of: np.ndarray  # block index of each coordinate
    seed_blocks: Tuple[int, ...]

    @property
    def seed_mask(self) -> np.ndarray:
        return np.isin(self.block_of, self.seed_blocks)


@dataclass(frozen=True, eq=False)
class Instance:
    """Symmetric observation W = s s^T / sqrt(n) + sqrt(delta) Z with ground truth."""
    n: int
    w_matrix: np.ndarray
    signal: np.ndarray
    delta: float
    blocks: Optional[BlockStructure] = None


@dataclass
class AmpState:
    """Mutable AMP iteration state; traces grow by one entry per iteration."""
    estimate: np.ndarray
    previous: np.ndarray
    effective_noise: List[np.ndarray] = field(default_factory=list)  # per-block sigma^2
    mse_trace: List[float] = field(default_factory=list)
    iterations: int = 0
    status: RunStatus = RunStatus.NOT_CONVERGED

    def is_complete(self) -> bool:
        """Check if the run is in a terminal state."""
        return self.status in (RunStatus.CONVERGED, RunStatus.DIVERGED)


@dataclass(frozen=True, eq=False)
class SpectralResult:
    estimate: np.ndarray
    overlap: float
    eigenvalue: float
    iterations: int
    status: RunStatus


class MonteCarloEstimate(NamedTuple):
    estimate: float
    stderr: float


class NishimoriResult(NamedTuple):
    lhs: float
    rhs: float
    stderr: float


@dataclass(frozen=True, eq=False)
class EnumerationResult:
    """Exact posterior quantities of one small instance."""
    posterior_mean: np.ndarray
    pairwise_mean: np.ndarray
    vector_error: float
    matrix_error: float
    log_partition: float
    states: int


@dataclass(frozen=True)
class FiniteSizeMmsePoint:
    delta: float
    matrix_mmse: float
    matrix_stderr: float
    vector_mmse: float
    vector_stderr: float


@dataclass(frozen=True)
class EffectiveNoise:
    """Inverse Fisher information of a channel at y = 0."""
    value: float
    stderr: float
    method: FisherMethod
    note: Optional[str] = None


@dataclass(frozen=True, eq=False)
class CommunityGraph:
    """Two-group graph plus its Gaussian-equivalent observation matrix."""
    adjacency: np.ndarray
    signal: np.ndarray
    in_first_group: np.ndarray
    equivalent_matrix: np.ndarray
    delta_eff: float
    rho: float
    p: float
    mu: float

    @property
    def n(self) -> int:
        return int(self.signal.size)


@dataclass
class SweepPoint:
    """One grid point of a sweep; failures keep the error message inline."""
    index: int
    parameter: object
    status: PointStatus = PointStatus.PENDING
    result: Optional[object] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status == PointStatus.DONE
