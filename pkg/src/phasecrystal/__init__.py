"""Classical phase-space Monte Carlo for a 1-d harmonic quantum crystal."""

__version__ = "0.1.0"
