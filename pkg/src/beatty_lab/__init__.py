"""Primes in Beatty sequences: exact arithmetic, exponential sums and bound evaluators."""

__version__ = "0.1.0"
