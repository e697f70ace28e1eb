"""Numerical lab for the radial 2D nonlinear Dirac equation."""
from __future__ import annotations

__version__ = "0.1.0"
