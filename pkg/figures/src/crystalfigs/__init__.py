"""Render figures from phasecrystal CSV output.

Consumes only the documented CSV schemas (energy_vs_beta.csv,
density_profile.csv); never imports the simulation library or recomputes
any physics.
"""

__version__ = "0.1.0"
