"""Assouad and lower spectra of absolutely continuous measures with L^p densities."""
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
