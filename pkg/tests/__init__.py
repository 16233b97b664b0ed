"""Tests for irs-skg."""
