"""Test package for Pentera Password Cracker."""

