"""Modularity search for S4-symmetric double octics over the first 25 primes."""

__version__ = "0.1.0"
