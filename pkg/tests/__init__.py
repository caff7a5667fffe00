"""Tests for isolab."""
