"""Exact and numerical verification of the q-binomial / quantum pentagon /
Rogers dilogarithm chain."""

__version__ = "0.1.0"
