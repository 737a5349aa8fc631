"""Noisy quantum homodyne tomography: simulation, Bayesian nonparametric
reconstruction, and numeric verification of the supporting inequalities."""

__version__ = "0.1.0"
