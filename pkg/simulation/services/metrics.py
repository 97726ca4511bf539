"""Error and overlap metrics between an estimate and the planted signal."""

import numpy as np


def _check_lengths(estimate: np.ndarray, signal: np.ndarray) -> None:
    if estimate.shape != signal.shape:
        raise ValueError(f"Length mismatch: estimate {estimate.shape}, signal {signal.shape}")


def vector_mse(estimate: np.ndarray, signal: np.ndarray) -> float:
    """||s - x||^2 / n."""
    estimate, signal = np.asarray(estimate, dtype=float), np.asarray(signal, dtype=float)
    _check_lengths(estimate, signal)
    return float(np.mean((signal - estimate) ** 2))


def matrix_mse(estimate: np.ndarray, signal: np.ndarray) -> float:
    """||s s^T - x x^T||_F^2 / n^2, expanded so no n x n matrix is formed."""
    estimate, signal = np.asarray(estimate, dtype=float), np.asarray(signal, dtype=float)
    _check_lengths(estimate, signal)
    n = signal.size
    ss, sx, xx = signal @ signal, signal @ estimate, estimate @ estimate
    return float(max(ss**2 - 2.0 * sx**2 + xx**2, 0.0) / n**2)


def overlap(estimate: np.ndarray, signal: np.ndarray) -> float:
    """|<x, s>| / (||x|| ||s||); 0 when either vector vanishes."""
    estimate, signal = np.asarray(estimate, dtype=float), np.asarray(signal, dtype=float)
    _check_lengths(estimate, signal)
    norm = np.linalg.norm(estimate) * np.linalg.norm(signal)
    if norm == 0.0:
        return 0.0
    return float(abs(estimate @ signal) / norm)


def block_vector_mse(estimate: np.ndarray, signal: np.ndarray, block_of: np.ndarray,
                     blocks: int) -> np.ndarray:
    """Per-block vector MSE for coupled instances."""
    estimate, signal = np.asarray(estimate, dtype=float), np.asarray(signal, dtype=float)
    _check_lengths(estimate, signal)
    sums = np.bincount(block_of, weights=(signal - estimate) ** 2, minlength=blocks)
    counts = np.bincount(block_of, minlength=blocks)
    return sums / np.maximum(counts, 1)
