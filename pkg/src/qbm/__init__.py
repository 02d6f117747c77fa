"""Quantum Brownian motion in a Drude bath: memory kernels, resummed effective
action, Dekker-form diffusion constants and master-equation dynamics."""

from .bath import BathSpec, DomainError, NumericalError
from .coefficients import DiffusionSet, critical_temperature, delta, diffusion_constants

__all__ = [
    "BathSpec",
    "DiffusionSet",
    "DomainError",
    "NumericalError",
    "critical_temperature",
    "delta",
    "diffusion_constants",
]

__version__ = "0.1.0"
