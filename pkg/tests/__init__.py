"""Tests for nonbilocality."""
