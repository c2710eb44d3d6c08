"""Tests for building system identification."""
