"""Sweep executor and subcommand drivers."""
