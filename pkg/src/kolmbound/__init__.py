"""Kolmogorov-distance bounds from smooth Wasserstein distances."""

__version__ = "0.1.0"
