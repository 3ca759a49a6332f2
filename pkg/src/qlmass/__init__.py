"""Quasi-local mass laboratory on spatial Schwarzschild backgrounds.

Modules:
  background   closed-form slice geometry (lapse, curvature, horizon)
  sphere_grid  Gauss-Legendre x periodic grid calculus on S^2
  surface      star-shaped graph geometry and integral-identity residuals
  flow         inverse curvature flow stepping and decay diagnostics
  shi_tam      scalar-flat extension lapse ratio w and mass aspect
  mass         Q functional, m0 extraction, quasi-local energy, Phi(m) curve
  oracle       rotationally symmetric closed-form reference solutions
  asymptotics  large-sphere energy and volume limits
  cli          batch experiment runner (JSON config -> CSV/JSON artifacts)
"""

from .background import Background, HorizonError, unit_sphere_area
from .sphere_grid import SphereGrid
from .surface import RadialGraph, SurfaceError, assemble

__version__ = "0.1.0"

__all__ = [
    "Background", "HorizonError", "unit_sphere_area",
    "SphereGrid", "RadialGraph", "SurfaceError", "assemble",
]
