"""Command-line runner: config loading, sweeps and output files."""
