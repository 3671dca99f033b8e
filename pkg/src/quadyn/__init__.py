"""Numerical toolkit for quadratic polynomial dynamics: Green's functions,
external rays, Yoccoz puzzles, tableaux, renormalization, annulus moduli,
root-like maps and parameter-space search."""
from .dynamics import fixed_points, iterate, iterate_map, multiplier
from .errors import DomainError, NumericalError, QuadynError
from .modulus import annulus_modulus, moduli_series
from .paramspace import find_feigenbaum, find_misiurewicz, find_superstable, scan_windows
from .potential import equipotential, green, landing_points, trace_ray
from .puzzle import build_puzzle
from .renorm import (bounds_report, real_bounds_report, real_renorm_cascade, real_renorm_detect,
                     renorm_cascade)
from .sector import (distortion_constants, evaluate_chain, gamma_root, hyperbolic_nbhd,
                     sector_angle, sector_certificate, smallest_nbhd_radius, validate_chain)
from .tableau import check_rules, compute_tableau, detect_period, tau

__version__ = "0.1.0"

__all__ = [
    "DomainError", "NumericalError", "QuadynError",
    "annulus_modulus", "bounds_report", "build_puzzle", "check_rules", "compute_tableau",
    "detect_period", "distortion_constants", "equipotential", "evaluate_chain", "find_feigenbaum",
    "find_misiurewicz", "find_superstable", "fixed_points", "gamma_root", "green",
    "hyperbolic_nbhd", "iterate", "iterate_map", "landing_points", "moduli_series", "multiplier",
    "real_bounds_report", "real_renorm_cascade", "real_renorm_detect", "renorm_cascade",
    "scan_windows", "sector_angle", "sector_certificate", "smallest_nbhd_radius", "tau",
    "trace_ray", "validate_chain",
]
