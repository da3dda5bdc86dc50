"""Cosserat elasticity kinematics, variations and Legendre-Hadamard checks."""

__version__ = "0.1.0"
