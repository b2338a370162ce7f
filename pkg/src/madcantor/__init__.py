"""Exact Cantor-scheme constructions of matrices that are multiplicatively
badly approximable on a finite range, with verifiable certificates."""

from .config import ConstructionConfig
from .construction import Certificate, Verdict, run_construction, verify_certificate
from .core import dist_nearest_int, mad_form_bounds, prod_plus, scan_min_form
from .geometry import Cube, DangerPoint, Hyperplane
from .numerics import LogBounds

__all__ = [
    "Certificate",
    "ConstructionConfig",
    "Cube",
    "DangerPoint",
    "Hyperplane",
    "LogBounds",
    "Verdict",
    "dist_nearest_int",
    "mad_form_bounds",
    "prod_plus",
    "run_construction",
    "scan_min_form",
    "verify_certificate",
]
