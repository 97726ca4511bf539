"""Finite-size experiments: synthetic instances, AMP, spectral baseline and oracles."""
