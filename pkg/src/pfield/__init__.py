"""Particle-field model of tunneling, measurement and EPR pairs."""
from .core import EnergyLedger, PhysicalParams, default_params
from .errors import NumericsError, PFError, PhysicsDomainError
from .numerics import DEFAULT_QUADRATURE, Quadrature

__version__ = "0.1.0"

__all__ = ["DEFAULT_QUADRATURE", "EnergyLedger", "NumericsError", "PFError",
           "PhysicalParams", "PhysicsDomainError", "Quadrature", "default_params"]
