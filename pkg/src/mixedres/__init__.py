"""Exact desk-scale computations with Thom-Sullivan cochains and mixed resolutions."""

__version__ = "0.1.0"
