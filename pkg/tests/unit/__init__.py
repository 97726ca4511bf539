"""Unit tests."""

