"""Median-of-means randomized quasi-Monte Carlo on scrambled base-2 digital nets."""

__version__ = "0.1.0"
