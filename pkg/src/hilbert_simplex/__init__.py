"""Hilbert simplex geometry and center-based clustering."""
