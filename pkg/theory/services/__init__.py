"""Asymptotic theory: priors, replica potential, thresholds and state evolution."""
