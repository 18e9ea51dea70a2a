"""
finch - non-Riemannian curvature and first integrals of Finsler metrics
"""
from .config import _read_version

__version__ = _read_version()
