"""Numerical engine for rsmaic."""
