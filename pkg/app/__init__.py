"""Libration Stability Toolkit Package."""

__version__ = "0.1.0"
__title__ = "Libration Stability Toolkit"
__description__ = "Triangular equilibrium points and their linear stability with radiation, oblateness and drag"
