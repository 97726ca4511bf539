"""Configuration loaded from environment variables."""

import os


def _get_env_int(key: str, default: str) -> int:
    """Get integer environment variable with validation."""
    try:
        return int(os.getenv(key, default))
    except ValueError:
        raise ValueError(f"Invalid integer value for {key}")


def _get_env_float(key: str, default: str) -> float:
    """Get float environment variable with validation."""
    try:
        return float(os.getenv(key, default))
    except ValueError:
        raise ValueError(f"Invalid float value for {key}")


WORKERS_ENV = "RANK1_PHASE_WORKERS"


class Config:
    """Centralized configuration from environment variables."""

    # Parallelism: size of the sweep worker pool (RANK1_PHASE_WORKERS beats --workers)
    WORKERS: int = _get_env_int(WORKERS_ENV, str(os.cpu_count() or 1))
    # Sweeps with fewer points than this run sequentially
    PARALLEL_THRESHOLD: int = _get_env_int("RANK1_PHASE_PARALLEL_THRESHOLD", "2")

    # Quadrature
    QUAD_ORDER: int = _get_env_int("RANK1_PHASE_QUAD_ORDER", "61")

    # Stationary-point scan on E in [0, v]
    ROOT_SCAN_POINTS: int = _get_env_int("RANK1_PHASE_ROOT_SCAN_POINTS", "4096")
    ROOT_REFINE_FACTOR: int = _get_env_int("RANK1_PHASE_ROOT_REFINE_FACTOR", "8")
    ROOT_TOL: float = _get_env_float("RANK1_PHASE_ROOT_TOL", "1e-10")

    # Threshold search (brackets are multiples of v^2)
    CURVE_SNR_POINTS: int = _get_env_int("RANK1_PHASE_CURVE_SNR_POINTS", "4096")
    THRESHOLD_REL_TOL: float = _get_env_float("RANK1_PHASE_THRESHOLD_REL_TOL", "1e-6")
    DELTA_BRACKET_LOW: float = _get_env_float("RANK1_PHASE_DELTA_BRACKET_LOW", "1e-6")
    DELTA_BRACKET_HIGH: float = _get_env_float("RANK1_PHASE_DELTA_BRACKET_HIGH", "1e3")

    # Zero-mean priors get their mean shifted by eps * sqrt(v), then eps -> 0
    ZERO_MEAN_BIAS: float = _get_env_float("RANK1_PHASE_ZERO_MEAN_BIAS", "1e-6")
    ZERO_MEAN_BIAS_SECONDARY: float = _get_env_float("RANK1_PHASE_ZERO_MEAN_BIAS_SECONDARY", "1e-7")

    # State evolution
    SE_TOL: float = _get_env_float("RANK1_PHASE_SE_TOL", "1e-9")
    SE_MAX_ITER: int = _get_env_int("RANK1_PHASE_SE_MAX_ITER", "10000")
    SATURATION_TOL: float = _get_env_float("RANK1_PHASE_SATURATION_TOL", "1e-6")
    # Default ring length is L = BLOCKS_PER_WINDOW * w
    BLOCKS_PER_WINDOW: int = _get_env_int("RANK1_PHASE_BLOCKS_PER_WINDOW", "50")

    # AMP and spectral baseline
    AMP_INIT_SCALE: float = _get_env_float("RANK1_PHASE_AMP_INIT_SCALE", "1e-3")
    AMP_MAX_ITER: int = _get_env_int("RANK1_PHASE_AMP_MAX_ITER", "100")
    AMP_TOL: float = _get_env_float("RANK1_PHASE_AMP_TOL", "1e-8")
    POWER_ITER_TOL: float = _get_env_float("RANK1_PHASE_POWER_ITER_TOL", "1e-8")
    POWER_ITER_MAX: int = _get_env_int("RANK1_PHASE_POWER_ITER_MAX", "10000")

    # Channels
    FISHER_MC_SAMPLES: int = _get_env_int("RANK1_PHASE_FISHER_MC_SAMPLES", "1000000")
    FISHER_FD_STEP: float = _get_env_float("RANK1_PHASE_FISHER_FD_STEP", "1e-5")

    # Oracle
    ENUMERATION_MAX_STATES: int = _get_env_int("RANK1_PHASE_ENUMERATION_MAX_STATES", "200000")
    MC_CHUNK_SIZE: int = _get_env_int("RANK1_PHASE_MC_CHUNK_SIZE", "1000000")

    # Output
    OUTPUT_DIR: str = os.getenv("RANK1_PHASE_OUTPUT_DIR", "data/output")
    LOG_LEVEL: str = os.getenv("RANK1_PHASE_LOG_LEVEL", "INFO")


config = Config()
