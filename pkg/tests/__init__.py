"""
Tests for param-sweep.
"""
