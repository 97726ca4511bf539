"""Single-letter formulas and state evolution for rank-one matrix estimation."""
