"""Boundary torsion lab: rigidity, Steklov and shape-inequality numerics."""

__version__ = "1.0.0"
