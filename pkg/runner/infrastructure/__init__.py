"""Experiment config loading and output writers."""
