"""Strict-inclusion laboratory for approximation and interpolation spaces."""
