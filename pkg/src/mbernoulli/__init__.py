"""Exact multiple Bernoulli series on lattices, with wall crossing,
decomposition and Euler-MacLaurin checks."""

__version__ = "0.1.0"
