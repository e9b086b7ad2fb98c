"""Elliptic curves over F_q(t): heights, regulators, conductors, L-functions
and explicit checks of the regulator/rank inequalities."""

__version__ = "0.1.0"
